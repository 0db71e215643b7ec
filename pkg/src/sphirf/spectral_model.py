"""Intrinsic covariance functions defined by their Legendre spectrum.

A model is a degree set ``D`` together with spectral coefficients
``a_0, ..., a_L``.  Its intrinsic covariance is

    phi(d) = sum_{l not in D, l <= L} (2l+1)/(4 pi) a_l P_l(cos d)
"""
from __future__ import annotations

from dataclasses import dataclass, field, replace
from functools import cached_property
from typing import Sequence

import numpy as np

from .core_sphere import PointsLike, cos_angle_matrix, to_points
from .harmonics import DegreeSet, as_degree_set


@dataclass(frozen=True, eq=False)
class SpectralModel:
    degrees: DegreeSet
    coeffs: np.ndarray
    sigma2: float = 0.0
    family: str = "explicit"
    params: dict = field(default_factory=dict)
    tail_bound: float | None = 0.0
    """Upper bound on ``sum_{l > lmax} (2l+1) a_l`` of the untruncated family."""

    def __post_init__(self):
        object.__setattr__(self, "degrees", as_degree_set(self.degrees))
        a = np.array(self.coeffs, dtype=float).ravel()
        if a.size == 0:
            raise ValueError("need at least one coefficient")
        a.setflags(write=False)
        object.__setattr__(self, "coeffs", a)
        object.__setattr__(self, "sigma2", float(self.sigma2))

    @property
    def lmax(self) -> int:
        return len(self.coeffs) - 1

    @cached_property
    def active_coeffs(self) -> np.ndarray:
        """``a_l`` with the annihilated degrees forced to zero."""
        a = self.coeffs.copy()
        for l in self.degrees:
            if l <= self.lmax:
                a[l] = 0.0
        return a

    @cached_property
    def legendre_weights(self) -> np.ndarray:
        """Coefficients of ``phi`` in the Legendre basis, ``(2l+1) a_l / (4 pi)``."""
        l = np.arange(self.lmax + 1)
        return (2 * l + 1) * self.active_coeffs / (4.0 * np.pi)

    @cached_property
    def phi0(self) -> float:
        return float(np.sum(self.legendre_weights))

    @property
    def phi_tail_bound(self) -> float | None:
        """Bound on ``|phi_exact(d) - phi_truncated(d)|`` for every ``d``."""
        return None if self.tail_bound is None else self.tail_bound / (4.0 * np.pi)

    def with_sigma2(self, sigma2: float) -> "SpectralModel":
        return replace(self, sigma2=sigma2)


def power_law_model(degrees, c: float = 1.0, s: float = 3.0, sigma2: float = 0.0,
                    lmax: int = 50) -> SpectralModel:
    """``a_l = c (l+1)^(-s)`` off ``D``; requires ``s > 2`` for summability."""
    if not s > 2:
        raise ValueError(f"decay exponent must exceed 2, got s={s}")
    if not c > 0:
        raise ValueError(f"scale must be positive, got c={c}")
    if lmax < 0:
        raise ValueError("lmax must be nonnegative")
    D = as_degree_set(degrees)
    l = np.arange(lmax + 1)
    a = c * (l + 1.0) ** (-float(s))
    a[[d for d in D if d <= lmax]] = 0.0
    # (2l+1)(l+1)^-s <= 2 (l+1)^(1-s); sum over l > lmax bounded by the integral from lmax+1.
    tail = 2.0 * c * (lmax + 1.0) ** (2.0 - s) / (s - 2.0)
    return SpectralModel(D, a, sigma2, family="power_law",
                         params={"c": float(c), "s": float(s)}, tail_bound=tail)


def explicit_model(degrees, coeffs: Sequence[float], sigma2: float = 0.0) -> SpectralModel:
    """Finite user-supplied spectrum ``a_0..a_L`` (exact, so the tail bound is 0)."""
    return SpectralModel(degrees, np.asarray(coeffs, dtype=float), sigma2)


def phi_from_cos(model: SpectralModel, t) -> np.ndarray:
    """Evaluate ``phi`` at ``cos d = t`` with one forward Legendre recurrence."""
    t = np.clip(np.asarray(t, dtype=float), -1.0, 1.0)
    w = model.legendre_weights
    acc = np.full_like(t, w[0])
    if model.lmax == 0:
        return acc
    p_prev, p = np.ones_like(t), t.copy()
    acc = acc + w[1] * p
    for k in range(1, model.lmax):
        p_prev, p = p, ((2 * k + 1) * t * p - k * p_prev) / (k + 1)
        if w[k + 1] != 0.0:
            acc = acc + w[k + 1] * p
    return acc


def intrinsic_cov(model: SpectralModel, d):
    """Intrinsic covariance ``phi(d)`` for angle(s) ``d`` in ``[0, pi]``."""
    d = np.asarray(d, dtype=float)
    if np.any(d < -1e-12) or np.any(d > np.pi + 1e-12):
        raise ValueError("angle outside [0, pi]")
    out = phi_from_cos(model, np.cos(d))
    return float(out) if out.ndim == 0 else out


@dataclass(frozen=True, eq=False)
class CovarianceMatrix:
    psi: np.ndarray
    points: list


def cross_cov(model: SpectralModel, a: PointsLike, b: PointsLike | None = None) -> np.ndarray:
    """Matrix ``phi(d(a_i, b_j))`` (no noise)."""
    return phi_from_cos(model, cos_angle_matrix(a, b))


def cov_matrix(model: SpectralModel, points: PointsLike, add_noise: bool = False) -> CovarianceMatrix:
    pts = to_points(points)
    if not pts:
        raise ValueError("need at least one point")
    psi = cross_cov(model, pts)
    psi = 0.5 * (psi + psi.T)
    np.fill_diagonal(psi, model.phi0 + (model.sigma2 if add_noise else 0.0))
    return CovarianceMatrix(psi, pts)


@dataclass(frozen=True)
class ModelReport:
    ok: bool
    reasons: tuple

    def __bool__(self) -> bool:
        return self.ok

    def __str__(self) -> str:
        if self.ok:
            return "PASS"
        return "FAIL\n" + "\n".join(f"  - {r}" for r in self.reasons)


def validate_model(model: SpectralModel) -> ModelReport:
    reasons = []
    a = model.coeffs
    if not np.all(np.isfinite(a)):
        reasons.append("non-finite coefficient")
    for l in np.flatnonzero(a < 0):
        reasons.append(f"negative coefficient at l={int(l)}")
    for l in model.degrees:
        if l <= model.lmax and a[l] != 0.0:
            reasons.append(f"nonzero coefficient at annihilated degree l={l}")
    if model.tail_bound is None or not np.isfinite(model.tail_bound):
        reasons.append("no finite tail bound for the truncated series")
    if model.sigma2 < 0 or not np.isfinite(model.sigma2):
        reasons.append(f"noise variance must be >= 0, got {model.sigma2}")
    return ModelReport(not reasons, tuple(reasons))
