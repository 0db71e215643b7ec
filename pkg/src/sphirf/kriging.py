"""Universal kriging for intrinsic random functions on the sphere.

The weights solve the bordered system

    [ Psi + sigma2 I   Q ] [eta]   [phi_vec(x0)]
    [ Q^T              0 ] [rho] = [q(x0)      ]

where ``Psi`` holds the intrinsic covariance between sites, ``Q`` is the
design matrix of the nil-space harmonics and ``rho`` are the Lagrange
multipliers of the unbiasedness constraints ``Q^T eta = q(x0)``.
"""
from __future__ import annotations

import warnings
from dataclasses import dataclass
from typing import Sequence

import numpy as np
from scipy.linalg import lapack
from scipy.spatial import cKDTree

from .core_sphere import PointsLike, SpherePoint, to_points, to_xyz
from .errors import RankDeficientDesign, SingularSystem, TooFewSites
from .harmonics import harmonic_design_matrix, numerical_rank
from .spectral_model import SpectralModel, cov_matrix, cross_cov

_DUPLICATE_CHORD = 1e-10
_RCOND_MIN = 1e-15
_VARIANCE_SLACK = 1e-10


@dataclass(frozen=True, eq=False)
class KrigingProblem:
    sites: Sequence[SpherePoint]
    values: np.ndarray
    model: SpectralModel
    target: SpherePoint


@dataclass(frozen=True, eq=False)
class KrigingSolution:
    eta: np.ndarray
    rho: np.ndarray
    prediction: float
    variance: float


def check_sites(sites: PointsLike, model: SpectralModel, noise: float) -> tuple[list, np.ndarray]:
    """Validate a site set for the bordered solve; returns the points and ``Q``."""
    pts = to_points(sites)
    n, d_n = len(pts), model.degrees.dim
    # n == d_n is allowed: the constraints alone then fix the weights.
    if n < max(d_n, 1):
        raise TooFewSites(f"need at least {max(d_n, 1)} sites for degrees {model.degrees}, got {n}")
    Q = harmonic_design_matrix(pts, model.degrees)
    if d_n and numerical_rank(Q) < d_n:
        raise RankDeficientDesign(
            f"sites are not unisolvent for {model.degrees}: design rank {numerical_rank(Q)} < {d_n}")
    if noise == 0.0:
        pairs = cKDTree(to_xyz(pts)).query_pairs(_DUPLICATE_CHORD)
        if pairs:
            i, j = sorted(pairs)[0]
            raise SingularSystem(f"duplicate sites {i} and {j} with zero noise variance")
    return pts, Q


class BorderedSystem:
    """Symmetric indefinite (Bunch-Kaufman) factorisation of the bordered matrix."""

    def __init__(self, psi: np.ndarray, Q: np.ndarray, noise: float):
        n, d_n = Q.shape
        a = np.zeros((n + d_n, n + d_n))
        a[:n, :n] = psi + noise * np.eye(n)
        a[:n, n:] = Q
        a[n:, :n] = Q.T
        self.n, self.d_n = n, d_n
        self.matrix = a
        self._ldu, self._ipiv, info = lapack.dsytrf(a, lower=1)
        if info != 0:
            raise SingularSystem(f"bordered matrix is exactly singular (dsytrf info={info})")
        anorm = np.linalg.norm(a, 1)
        rcond, info = lapack.dsycon(self._ldu, self._ipiv, anorm, lower=1)
        if info != 0 or rcond < _RCOND_MIN:
            raise SingularSystem(f"bordered matrix is numerically singular (rcond={rcond:.2e})")
        self.rcond = rcond

    def solve(self, rhs: np.ndarray) -> np.ndarray:
        x, info = lapack.dsytrs(self._ldu, self._ipiv, np.asarray(rhs, dtype=float), lower=1)
        if info != 0:
            raise SingularSystem(f"dsytrs failed (info={info})")
        return x


def _variances(eta: np.ndarray, psi: np.ndarray, phi_vec: np.ndarray, model: SpectralModel) -> np.ndarray:
    """Prediction error ``s2 eta'eta + eta'Psi eta - 2 eta'phi + phi(0)`` column-wise."""
    var = (model.sigma2 * np.sum(eta * eta, axis=0)
           + np.sum(eta * (psi @ eta), axis=0)
           - 2.0 * np.sum(eta * phi_vec, axis=0)
           + model.phi0)
    slack = _VARIANCE_SLACK * max(1.0, model.phi0)
    if np.any(var < -slack):
        raise SingularSystem(f"negative prediction variance {var.min():.3e}")
    # cancellation at data sites leaves ~1e-17 negatives that are not worth a warning
    if np.any(var < -1e-13 * max(1.0, model.phi0)):
        warnings.warn(f"clamping round-off negative variance {var.min():.3e} to 0", RuntimeWarning)
        var = np.maximum(var, 0.0)
    return var


class UniversalKriging:
    """Kriging predictor with one shared factorisation for many targets."""

    def __init__(self, sites: PointsLike, values, model: SpectralModel):
        self.model = model
        self.sites, self.Q = check_sites(sites, model, model.sigma2)
        self.values = np.asarray(values, dtype=float).ravel()
        if len(self.values) != len(self.sites):
            raise ValueError(f"{len(self.sites)} sites but {len(self.values)} values")
        self.psi = cov_matrix(model, self.sites).psi
        self.system = BorderedSystem(self.psi, self.Q, model.sigma2)

    def weights(self, targets: PointsLike) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        """Return ``(eta (n, m), rho (d_N, m), phi_vec (n, m))`` for ``m`` targets."""
        phi_vec = cross_cov(self.model, self.sites, targets)
        q = harmonic_design_matrix(targets, self.model.degrees).T
        sol = self.system.solve(np.vstack([phi_vec, q]))
        n = len(self.sites)
        return sol[:n], sol[n:], phi_vec

    def predict(self, targets: PointsLike) -> tuple[np.ndarray, np.ndarray]:
        eta, _, phi_vec = self.weights(targets)
        return self.values @ eta, _variances(eta, self.psi, phi_vec, self.model)


def solve_universal_kriging(p: KrigingProblem) -> KrigingSolution:
    uk = UniversalKriging(p.sites, p.values, p.model)
    eta, rho, phi_vec = uk.weights([p.target])
    var = _variances(eta, uk.psi, phi_vec, p.model)
    return KrigingSolution(eta[:, 0], rho[:, 0], float(uk.values @ eta[:, 0]), float(var[0]))


def predict_grid(sites: PointsLike, values, model: SpectralModel,
                 grid: PointsLike) -> tuple[np.ndarray, np.ndarray]:
    """Predictions and prediction variances at every grid point."""
    return UniversalKriging(sites, values, model).predict(grid)
