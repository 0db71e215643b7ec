"""Legendre-coefficient tests of conditional positive definiteness.

A zonal kernel ``k(d) = sum_l b_l P_l(cos d)`` is conditionally positive
definite of order ``k0`` on the sphere iff ``b_l >= 0`` for all ``l >= k0``.
The thin-plate kernel ``d^2 log d`` evaluated with great-circle distance
fails this test; the Wahba spherical-spline kernel passes it.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, NamedTuple

import numpy as np
from numpy.polynomial import legendre as npleg

from .core_sphere import PointsLike, as_angles
from .errors import QuadratureOrderError
from .spectral_model import SpectralModel

DOUBLING_TOL = 1e-10


@dataclass(frozen=True, eq=False)
class LegendreExpansion:
    coeffs: np.ndarray
    kernel_name: str
    quad_order: int
    doubling_shift: float
    truncation_error: float = float("nan")

    @property
    def lmax(self) -> int:
        return len(self.coeffs) - 1

    def __call__(self, d):
        return npleg.legval(np.cos(np.asarray(d, dtype=float)), self.coeffs)


def _legendre_table(lmax: int, t: np.ndarray) -> np.ndarray:
    out = np.empty((lmax + 1, t.size))
    out[0] = 1.0
    if lmax >= 1:
        out[1] = t
    for k in range(1, lmax):
        out[k + 1] = ((2 * k + 1) * t * out[k] - k * out[k - 1]) / (k + 1)
    return out


def _project(kernel: Callable, lmax: int, order: int) -> np.ndarray:
    # Integrate in the angle with d = pi u^2: the thin-plate integrand (1-t) log(1-t)
    # near t = 1 becomes u^7 log u, which Gauss-Legendre handles to ~1e-14.
    x, w = np.polynomial.legendre.leggauss(order)
    u = 0.5 * (x + 1.0)
    d = np.pi * u * u
    wd = np.pi * w * u * np.sin(d)
    vals = np.asarray(kernel(d), dtype=float)
    pl = _legendre_table(lmax, np.cos(d))
    l = np.arange(lmax + 1)
    return 0.5 * (2 * l + 1) * (pl @ (wd * vals))


def legendre_coefficients(kernel: Callable, L: int, quad_order: int | None = None,
                          name: str | None = None) -> LegendreExpansion:
    """Coefficients ``b_l = (2l+1)/2 int_{-1}^{1} k(arccos t) P_l(t) dt`` for ``l <= L``.

    Raises :class:`QuadratureOrderError` when doubling ``quad_order`` moves any
    coefficient by more than 1e-10.
    """
    order = max(4 * L, 64) if quad_order is None else int(quad_order)
    if order < 2 * L or order < 1:
        raise ValueError(f"quad_order must be >= 2L = {2 * L}, got {order}")
    b = _project(kernel, L, order)
    shift = float(np.max(np.abs(_project(kernel, L, 2 * order) - b)))
    if shift > DOUBLING_TOL:
        raise QuadratureOrderError(
            f"quadrature order {order} too low: doubling shifts coefficients by {shift:.2e}")
    # Measured, not bounded: sup of the reconstruction error on a fine angle grid.
    d = np.linspace(0.0, np.pi, 4097)
    trunc = float(np.max(np.abs(npleg.legval(np.cos(d), b) - np.asarray(kernel(d), dtype=float))))
    return LegendreExpansion(b, name or getattr(kernel, "__name__", "kernel"), order, shift, trunc)


def tps_kernel(d):
    """Thin-plate radial function ``d^2 log d`` with ``E(0) = 0``."""
    d = np.asarray(d, dtype=float)
    safe = np.where(d > 0, d, 1.0)
    out = np.where(d > 0, d * d * np.log(safe), 0.0)
    return float(out) if out.ndim == 0 else out


@dataclass(frozen=True)
class PDVerdict:
    kernel_name: str
    min_degree: int
    verdict: str
    negatives: list = field(default_factory=list)
    coeffs: list = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return self.verdict == "PASS"

    def to_dict(self) -> dict:
        return {
            "kernel": self.kernel_name,
            "min_degree": self.min_degree,
            "verdict": self.verdict,
            "negative_coefficients": [{"l": l, "value": v} for l, v in self.negatives],
            "coefficients": self.coeffs,
        }


def check_conditional_pd(exp: LegendreExpansion, min_degree: int, tol: float = 1e-10) -> PDVerdict:
    if exp.lmax <= min_degree - 1:
        raise ValueError(f"expansion has no coefficients at or above degree {min_degree}")
    negatives = [(l, float(exp.coeffs[l])) for l in range(max(min_degree, 0), exp.lmax + 1)
                 if exp.coeffs[l] < -tol]
    return PDVerdict(exp.kernel_name, int(min_degree), "FAIL" if negatives else "PASS",
                     negatives, [float(v) for v in exp.coeffs])


def wahba_coefficients(m: int, lmax: int) -> np.ndarray:
    """Spectral coefficients ``1 / (l^m (l+1))`` for ``l >= 1``; zero at ``l = 0``."""
    if m < 2 or m % 2:
        raise ValueError(f"m must be an even integer >= 2, got {m}")
    l = np.arange(1, lmax + 1, dtype=float)
    return np.concatenate([[0.0], 1.0 / (l ** m * (l + 1.0))])


def wahba_tail_bound(m: int, lmax: int) -> float:
    """Bound on the truncation error of the kernel series beyond ``lmax``."""
    # (2l+1)/(l^m (l+1)) <= 2 l^-m; sum over l > lmax <= 2 lmax^(1-m)/(m-1).
    return 2.0 * max(lmax, 1) ** (1.0 - m) / (m - 1.0) / (4.0 * np.pi)


class WahbaValue(NamedTuple):
    value: float | np.ndarray
    tail_bound: float


def wahba_kernel(d, m: int = 2, lmax: int = 500) -> WahbaValue:
    """``K(d) = (1/4pi) sum_{l>=1} (2l+1)/(l^m (l+1)) P_l(cos d)`` truncated at ``lmax``."""
    a = wahba_coefficients(m, lmax)
    l = np.arange(lmax + 1)
    val = npleg.legval(np.cos(np.asarray(d, dtype=float)), (2 * l + 1) * a / (4.0 * np.pi))
    val = float(val) if np.ndim(val) == 0 else val
    return WahbaValue(val, wahba_tail_bound(m, lmax))


def wahba_model(m: int = 2, lmax: int = 500, sigma2: float = 0.0) -> SpectralModel:
    """The Wahba kernel as an intrinsic covariance with degree set ``{0}``."""
    return SpectralModel({0}, wahba_coefficients(m, lmax), sigma2, family="wahba",
                         params={"m": m}, tail_bound=4.0 * np.pi * wahba_tail_bound(m, lmax))


@dataclass(frozen=True, eq=False)
class WahbaSpline:
    """``f(x) = d + sum c_i K(x, x_i)``."""

    d: float
    c: np.ndarray
    sites: np.ndarray
    m: int
    lmax: int

    def __call__(self, x: PointsLike):
        k = wahba_kernel(_great_circle(x, self.sites), self.m, self.lmax).value
        return self.d + np.atleast_2d(k) @ self.c


def _great_circle(a: PointsLike, b: PointsLike) -> np.ndarray:
    pa, za = as_angles(a)
    pb, zb = as_angles(b)
    c = (np.cos(za)[:, None] * np.cos(zb)[None, :]
         + np.sin(za)[:, None] * np.sin(zb)[None, :] * np.cos(pa[:, None] - pb[None, :]))
    return np.arccos(np.clip(c, -1.0, 1.0))


def fit_wahba_spline(sites: PointsLike, values, m: int = 2, alpha: float = 1e-3,
                     lmax: int = 500) -> WahbaSpline:
    """Spherical spline with a constant nil space, solved as one dense LU system."""
    w = np.asarray(values, dtype=float).ravel()
    n = len(w)
    K = wahba_kernel(_great_circle(sites, sites), m, lmax).value
    a = np.zeros((n + 1, n + 1))
    a[:n, :n] = K + alpha * np.eye(n)
    a[:n, n] = 1.0
    a[n, :n] = 1.0
    sol = np.linalg.solve(a, np.concatenate([w, [0.0]]))
    psi, zeta = as_angles(sites)
    return WahbaSpline(float(sol[n]), sol[:n], np.column_stack([psi, zeta]), m, lmax)
