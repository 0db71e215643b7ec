"""Smoothing splines in the reproducing kernel Hilbert space of an IRF.

Functions handled here have the finite form

    f(x) = sum_nu b_nu q_nu(x) + sum_i c_i phi(d(x_i, x))

with ``q_nu`` the nil-space harmonics of the model's degree set.  The
smoothing fit solves

    (Psi + alpha I) c + Q b = w,    Q^T c = 0

by eliminating the constraint with a QR basis of ``null(Q^T)``.  Kriging
(:mod:`sphirf.kriging`) solves the same bordered matrix with a symmetric
indefinite factorisation instead, which is what makes
:func:`dual_kriging_equivalence` a two-path check.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple

import numpy as np
from scipy import linalg

from .core_sphere import NORTH_POLE, PointsLike, SpherePoint, as_angles, to_points
from .errors import NonUnisolvent, SingularSystem
from .harmonics import DegreeSet, as_degree_set, harmonic_design_matrix, numerical_rank
from .kriging import UniversalKriging, check_sites
from .spectral_model import SpectralModel, cov_matrix, cross_cov

_MAX_COND = 1e12


def fibonacci_points(n: int) -> list[SpherePoint]:
    """Deterministic, roughly uniform spiral of ``n`` points."""
    k = np.arange(n) + 0.5
    zeta = np.arccos(1.0 - 2.0 * k / n)
    psi = np.pi * (1.0 + 5.0 ** 0.5) * k
    return [SpherePoint(p, z) for p, z in zip(psi, zeta)]


def default_taus(degrees) -> list[SpherePoint]:
    """Well-separated cardinal points for ``degrees``.

    One point: the north pole.  Four points: the north pole plus three
    equatorial points at longitudes 0, 2pi/3 and 4pi/3.  Otherwise a
    Fibonacci spiral of ``d_N`` points.
    """
    d_n = as_degree_set(degrees).dim
    if d_n == 1:
        return [NORTH_POLE]
    if d_n == 4:
        return [NORTH_POLE] + [SpherePoint(2 * np.pi * k / 3, np.pi / 2) for k in range(3)]
    return fibonacci_points(d_n)


@dataclass(frozen=True, eq=False)
class CardinalBasis:
    """Nil-space functions ``p_nu`` with ``p_nu(tau_mu) = I(nu, mu)``.

    ``coeff[:, nu]`` holds ``p_nu`` in the harmonic basis ``q``.
    """

    taus: list
    degrees: DegreeSet
    coeff: np.ndarray
    cond: float

    def values(self, points: PointsLike) -> np.ndarray:
        """Matrix ``(n, d_N)`` of ``p_nu(x_i)``."""
        return harmonic_design_matrix(points, self.degrees) @ self.coeff


def cardinal_basis(taus: PointsLike | None, degrees) -> CardinalBasis:
    D = as_degree_set(degrees)
    taus = default_taus(D) if taus is None else to_points(taus)
    if len(taus) != D.dim:
        raise NonUnisolvent(f"need exactly {D.dim} cardinal points, got {len(taus)}")
    if D.dim == 0:
        return CardinalBasis([], D, np.zeros((0, 0)), 1.0)
    Qt = harmonic_design_matrix(taus, D)
    cond = float(np.linalg.cond(Qt))
    if numerical_rank(Qt) < D.dim or not cond < _MAX_COND:
        raise NonUnisolvent(f"cardinal points are not unisolvent for {D} (cond={cond:.3e})")
    coeff = np.linalg.solve(Qt, np.eye(D.dim))
    return CardinalBasis(taus, D, coeff, cond)


def kernel_matrix(a: PointsLike, b: PointsLike, basis: CardinalBasis, model: SpectralModel) -> np.ndarray:
    """Reproducing kernel ``H(a_i, b_j)``."""
    pa, pb = basis.values(a), basis.values(b)
    taus = basis.taus
    if not taus:
        return cross_cov(model, a, b)
    phi_at = cross_cov(model, a, taus)
    phi_tb = cross_cov(model, taus, b)
    phi_tt = cross_cov(model, taus)
    return (cross_cov(model, a, b)
            - phi_at @ pb.T - pa @ phi_tb
            + pa @ phi_tt @ pb.T
            + pa @ pb.T)


def reproducing_kernel(x: SpherePoint, y: SpherePoint, basis: CardinalBasis, model: SpectralModel) -> float:
    return float(kernel_matrix([x], [y], basis, model)[0, 0])


@dataclass(frozen=True, eq=False)
class KernelExpansion:
    """``sum b_nu q_nu(x) + sum c_i phi(d(center_i, x))``."""

    b: np.ndarray
    c: np.ndarray
    centers: np.ndarray
    model: SpectralModel

    def __call__(self, x: PointsLike):
        out = np.zeros(len(as_angles(x)[0]))
        if self.b.size:
            out += harmonic_design_matrix(x, self.model.degrees) @ self.b
        if self.c.size:
            out += cross_cov(self.model, x, self.centers) @ self.c
        return float(out[0]) if isinstance(x, SpherePoint) else out


@dataclass(frozen=True, eq=False)
class SmoothingFit(KernelExpansion):
    alpha: float = 0.0

    @property
    def sites(self) -> np.ndarray:
        return self.centers


def semi_inner(f: KernelExpansion, g: KernelExpansion) -> float:
    """Semi-inner product of the kernel parts, ``c_f' Phi(centers_f, centers_g) c_g``."""
    if not f.c.size or not g.c.size:
        return 0.0
    return float(f.c @ cross_cov(f.model, f.centers, g.centers) @ g.c)


def rkhs_inner(f: KernelExpansion, g: KernelExpansion, basis: CardinalBasis) -> float:
    """Full inner product ``sum_nu f(tau_nu) g(tau_nu) + <f, g>_semi``."""
    point_part = float(np.dot(f(basis.taus), g(basis.taus))) if basis.taus else 0.0
    return point_part + semi_inner(f, g)


def kernel_section(x: SpherePoint, basis: CardinalBasis, model: SpectralModel) -> KernelExpansion:
    """``H(x, .)`` written as a :class:`KernelExpansion`."""
    px = basis.values([x])[0]
    if not basis.taus:
        return KernelExpansion(np.zeros(0), np.array([1.0]), np.array([[x.psi, x.zeta]]), model)
    phi_xt = cross_cov(model, [x], basis.taus)[0]
    phi_tt = cross_cov(model, basis.taus)
    nil_in_p = -phi_xt + px @ phi_tt + px
    centers = np.vstack([[x.psi, x.zeta], np.column_stack(as_angles(basis.taus))])
    return KernelExpansion(basis.coeff @ nil_in_p, np.concatenate([[1.0], -px]), centers, model)


def fit_smoothing_spline(sites: PointsLike, values, model: SpectralModel, alpha: float) -> SmoothingFit:
    """Minimise ``sum (w_i - f(x_i))^2 + alpha |f|^2`` over the RKHS.

    ``model.sigma2`` is ignored; ``alpha`` plays the noise role.
    """
    if not alpha > 0:
        raise ValueError(f"alpha must be positive, got {alpha}")
    pts, Q = check_sites(sites, model, alpha)
    w = np.asarray(values, dtype=float).ravel()
    if len(w) != len(pts):
        raise ValueError(f"{len(pts)} sites but {len(w)} values")
    n, d_n = Q.shape
    psi = cov_matrix(model, pts).psi
    if d_n:
        qfull, r = np.linalg.qr(Q, mode="complete")
        Y, Z, R = qfull[:, :d_n], qfull[:, d_n:], r[:d_n]
    else:
        Y, Z, R = np.zeros((n, 0)), np.eye(n), np.zeros((0, 0))
    M = Z.T @ psi @ Z + alpha * np.eye(n - d_n)
    try:
        u = linalg.cho_solve(linalg.cho_factor(M, lower=True), Z.T @ w) if n > d_n else np.zeros(0)
    except linalg.LinAlgError as exc:
        raise SingularSystem(f"reduced smoothing system is not positive definite: {exc}") from exc
    c = Z @ u
    b = linalg.solve_triangular(R, Y.T @ (w - psi @ c)) if d_n else np.zeros(0)
    angles = np.column_stack(as_angles(pts))
    return SmoothingFit(b, c, angles, model, float(alpha))


def evaluate_fit(fit: KernelExpansion, x: PointsLike):
    return fit(x)


def semi_norm_sq(fit: KernelExpansion) -> float:
    """Squared roughness ``c' Psi c`` of the fitted surface."""
    return semi_inner(fit, fit)


class DualCheck(NamedTuple):
    smoothing: float | np.ndarray
    kriging: float | np.ndarray
    gap: float


def dual_kriging_equivalence(sites: PointsLike, values, model: SpectralModel, alpha: float,
                             x0: PointsLike) -> DualCheck:
    """Compare the smoothing fit with kriging at noise variance ``alpha``."""
    fit = fit_smoothing_spline(sites, values, model, alpha)
    smooth = np.atleast_1d(fit(x0))
    krig, _ = UniversalKriging(sites, values, model.with_sigma2(alpha)).predict(x0)
    gap = float(np.max(np.abs(smooth - krig)))
    if isinstance(x0, SpherePoint):
        return DualCheck(float(smooth[0]), float(krig[0]), gap)
    return DualCheck(smooth, krig, gap)
