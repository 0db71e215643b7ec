"""Finite signed measures on the sphere and allowable-measure checks.

A measure is a finite set of weighted atoms plus an optional band-limited
density ``rho(x) = sum c_lm Y_l^m(x)``.  The density is integrated with an
attached :class:`~sphirf.core_sphere.SphereQuadrature`, so every measure
reduces to a finite weighted point set (see :meth:`SphericalMeasure.discretize`).
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, NamedTuple

import numpy as np

from .core_sphere import PointsLike, Rotation, SphereQuadrature, SpherePoint, as_angles, from_xyz, to_xyz
from .errors import NotAllowable, ValidationError
from .harmonics import as_degree_set, harmonic_design_matrix, n_harmonics, sph_harm_table
from .spectral_model import SpectralModel, cross_cov


@dataclass(frozen=True, eq=False)
class SphericalMeasure:
    atom_angles: np.ndarray
    atom_weights: np.ndarray
    density: np.ndarray | None = None
    quad: SphereQuadrature | None = None

    def __post_init__(self):
        angles = np.asarray(self.atom_angles, dtype=float).reshape(-1, 2)
        weights = np.asarray(self.atom_weights, dtype=float).ravel()
        if len(angles) != len(weights):
            raise ValueError("one weight per atom required")
        object.__setattr__(self, "atom_angles", angles)
        object.__setattr__(self, "atom_weights", weights)
        if self.density is not None:
            dens = np.asarray(self.density, dtype=float).ravel()
            band = int(round(np.sqrt(dens.size))) - 1
            if n_harmonics(band) != dens.size:
                raise ValueError("density must hold (L+1)**2 harmonic coefficients")
            if self.quad is None:
                raise ValueError("a density needs a quadrature rule")
            object.__setattr__(self, "density", dens)

    @property
    def density_band(self) -> int:
        """Band limit of the density, or -1 when there is none."""
        if self.density is None:
            return -1
        return int(round(np.sqrt(self.density.size))) - 1

    def density_values(self, points: PointsLike) -> np.ndarray:
        if self.density is None:
            return np.zeros(len(as_angles(points)[0]))
        return sph_harm_table(points, self.density_band) @ self.density

    def discretize(self) -> tuple[np.ndarray, np.ndarray]:
        """Equivalent weighted point set ``(angles (N, 2), weights (N,))``."""
        if self.density is None:
            return self.atom_angles, self.atom_weights
        q = self.quad
        dw = q.weights * self.density_values(q.angles)
        return (np.vstack([self.atom_angles, q.angles]),
                np.concatenate([self.atom_weights, dw]))

    def __add__(self, other: "SphericalMeasure") -> "SphericalMeasure":
        density, quad = self.density, self.quad
        if other.density is not None:
            if density is None:
                density, quad = other.density, other.quad
            else:
                if other.quad is not quad:
                    raise ValueError("densities must share one quadrature rule to be added")
                size = max(density.size, other.density.size)
                density = np.pad(density, (0, size - density.size)) + np.pad(other.density, (0, size - other.density.size))
        return SphericalMeasure(np.vstack([self.atom_angles, other.atom_angles]),
                                np.concatenate([self.atom_weights, other.atom_weights]),
                                density, quad)

    def scaled(self, factor: float) -> "SphericalMeasure":
        density = None if self.density is None else factor * self.density
        return SphericalMeasure(self.atom_angles, factor * self.atom_weights, density, self.quad)


def dirac(x: SpherePoint, weight: float = 1.0) -> SphericalMeasure:
    return SphericalMeasure([[x.psi, x.zeta]], [weight])


def atomic(points: PointsLike, weights) -> SphericalMeasure:
    psi, zeta = as_angles(points)
    return SphericalMeasure(np.column_stack([psi, zeta]), weights)


def apply(mu: SphericalMeasure, f: Callable) -> float:
    """Integrate ``f(psi, zeta)`` (vectorised) against ``mu``."""
    angles, w = mu.discretize()
    if len(w) == 0:
        return 0.0
    vals = np.asarray(f(angles[:, 0], angles[:, 1]), dtype=float)
    return float(np.dot(w, vals))


def harmonic_moments(mu: SphericalMeasure, degrees) -> np.ndarray:
    """``Y_l^m(mu)`` for every ``(l, m)`` with ``l`` in ``degrees`` (design-matrix order)."""
    D = as_degree_set(degrees)
    angles, w = mu.discretize()
    if not len(D) or len(w) == 0:
        return np.zeros(D.dim)
    return w @ harmonic_design_matrix(angles, D)


class Allowability(NamedTuple):
    allowable: bool
    max_residual: float

    def __bool__(self) -> bool:
        return self.allowable


def is_allowable(mu: SphericalMeasure, degrees, tol: float = 1e-10) -> Allowability:
    if not tol > 0:
        raise ValueError("tol must be positive")
    moments = harmonic_moments(mu, degrees)
    resid = float(np.max(np.abs(moments))) if moments.size else 0.0
    return Allowability(resid <= tol, resid)


def annihilate(mu: SphericalMeasure, degrees, quad: SphereQuadrature) -> SphericalMeasure:
    """Subtract the projection of ``mu`` onto the harmonics of ``degrees``.

    The result is ``mu - sum_{l in D, m} Y_l^m(mu) Y_l^m(x) dx``, which is
    allowable whenever ``quad`` integrates products of the degree-``D``
    harmonics exactly.
    """
    D = as_degree_set(degrees)
    if not len(D):
        return mu
    if quad.degree < 2 * D.max_degree:
        raise ValidationError(
            f"quadrature degree {quad.degree} below required {2 * D.max_degree}")
    moments = harmonic_moments(mu, D)
    corr = np.zeros(n_harmonics(D.max_degree))
    corr[D.flat_indices()] = -moments
    return mu + SphericalMeasure(np.empty((0, 2)), [], corr, quad)


def kriging_measure(y: SpherePoint, degrees, quad: SphereQuadrature) -> SphericalMeasure:
    """Unit atom at ``y`` minus the nil-space projection of that atom."""
    return annihilate(dirac(y), degrees, quad)


def rotate_measure(g: Rotation, mu: SphericalMeasure) -> SphericalMeasure:
    """Push ``mu`` forward by ``g``: atoms move to ``g x``, the density becomes ``rho(g^-1 x)``."""
    atoms = g.apply_xyz(to_xyz(mu.atom_angles)) if len(mu.atom_weights) else np.empty((0, 3))
    angles = np.array([[p.psi, p.zeta] for p in from_xyz(atoms)]).reshape(-1, 2)
    if mu.density is None:
        return SphericalMeasure(angles, mu.atom_weights)
    q = mu.quad
    band = mu.density_band
    if q.degree < band:
        raise ValidationError(f"quadrature degree {q.degree} cannot re-expand a band-{band} density")
    back = g.inverse().apply_xyz(to_xyz(q.angles))
    back_angles = np.array([[p.psi, p.zeta] for p in from_xyz(back)])
    vals = mu.density_values(back_angles)
    coeffs = (q.weights * vals) @ sph_harm_table(q.angles, band)
    return SphericalMeasure(angles, mu.atom_weights, coeffs, q)


def measure_covariance(mu1: SphericalMeasure, mu2: SphericalMeasure, model: SpectralModel,
                       tol: float = 1e-10) -> float:
    """``int int phi(d(x, y)) mu1(dx) mu2(dy)`` for allowable measures."""
    for name, mu in (("mu1", mu1), ("mu2", mu2)):
        check = is_allowable(mu, model.degrees, tol)
        if not check:
            raise NotAllowable(f"{name} is not allowable for {model.degrees}: "
                               f"residual {check.max_residual:.3e}")
        if mu.density is not None and mu.quad.degree < max(model.lmax, mu.density_band):
            raise ValidationError(
                f"{name} quadrature degree {mu.quad.degree} does not cover model lmax {model.lmax}")
    a1, w1 = mu1.discretize()
    a2, w2 = mu2.discretize()
    if len(w1) == 0 or len(w2) == 0:
        return 0.0
    return float(w1 @ cross_cov(model, a1, a2) @ w2)
