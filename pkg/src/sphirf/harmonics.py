"""Legendre functions and real orthonormal spherical harmonics.

The real harmonics are

    Y_l^m  = sqrt((2l+1)/(2 pi) (l-m)!/(l+m)!) P_l^m(cos zeta) cos(m psi),   m > 0
    Y_l^0  = sqrt((2l+1)/(4 pi)) P_l(cos zeta)
    Y_l^-m = sqrt((2l+1)/(2 pi) (l-m)!/(l+m)!) P_l^m(cos zeta) sin(m psi),   m > 0

with ``P_l^m`` taken *without* the Condon-Shortley phase.  Tables of
harmonics are laid out with flat column index ``l*l + l + m`` (degree
ascending, order ascending from ``-l``).
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Iterator

import numpy as np

from .core_sphere import PointsLike, SpherePoint, as_angles

_DOMAIN_SLACK = 1e-12


@dataclass(frozen=True)
class HarmonicIndex:
    l: int
    m: int

    def __post_init__(self):
        if self.l < 0 or abs(self.m) > self.l:
            raise ValueError(f"invalid harmonic index (l={self.l}, m={self.m})")

    @property
    def flat(self) -> int:
        return flat_index(self.l, self.m)


def flat_index(l: int, m: int) -> int:
    return l * l + l + m


def n_harmonics(lmax: int) -> int:
    """Number of harmonics with degree ``<= lmax``."""
    return (lmax + 1) ** 2


@dataclass(frozen=True)
class DegreeSet:
    """The finite set of harmonic degrees annihilated by allowable measures."""

    degrees: frozenset

    def __init__(self, degrees: Iterable[int] = ()):
        degs = frozenset(int(d) for d in degrees)
        if any(d < 0 for d in degs):
            raise ValueError("degrees must be nonnegative")
        object.__setattr__(self, "degrees", degs)

    @classmethod
    def kappa(cls, kappa: int) -> "DegreeSet":
        """Classic IRF of order ``kappa``: degrees ``0, ..., kappa-1``."""
        return cls(range(kappa))

    def __contains__(self, l) -> bool:
        return l in self.degrees

    def __iter__(self) -> Iterator[int]:
        return iter(sorted(self.degrees))

    def __len__(self) -> int:
        return len(self.degrees)

    @property
    def dim(self) -> int:
        """Dimension of the nil space, ``sum over l in D of (2l+1)``."""
        return sum(2 * l + 1 for l in self.degrees)

    @property
    def max_degree(self) -> int:
        return max(self.degrees) if self.degrees else -1

    def indices(self) -> list[HarmonicIndex]:
        return [HarmonicIndex(l, m) for l in self for m in range(-l, l + 1)]

    def flat_indices(self) -> np.ndarray:
        return np.array([flat_index(l, m) for l in self for m in range(-l, l + 1)], dtype=int)

    def __repr__(self) -> str:
        return f"DegreeSet({sorted(self.degrees)})"


def as_degree_set(d) -> DegreeSet:
    return d if isinstance(d, DegreeSet) else DegreeSet(d)


def _check_domain(t) -> np.ndarray:
    t = np.asarray(t, dtype=float)
    if np.any(np.abs(t) > 1.0 + _DOMAIN_SLACK):
        raise ValueError("argument outside [-1, 1]")
    return np.clip(t, -1.0, 1.0)


def legendre_p(l: int, t):
    """Legendre polynomial ``P_l(t)`` by the three-term recurrence."""
    if l < 0:
        raise ValueError("degree must be nonnegative")
    t = _check_domain(t)
    p_prev, p = np.ones_like(t), t.copy()
    if l == 0:
        return p_prev[()] if p_prev.ndim == 0 else p_prev
    for k in range(1, l):
        p_prev, p = p, ((2 * k + 1) * t * p - k * p_prev) / (k + 1)
    return p[()] if p.ndim == 0 else p


def assoc_legendre(l: int, m: int, t):
    """Associated Legendre function ``P_l^m(t)``, no Condon-Shortley phase.

    Upward recurrence in ``l`` at fixed ``m`` from
    ``P_m^m = (2m-1)!! (1-t^2)^(m/2)``.
    """
    if not 0 <= m <= l:
        raise ValueError(f"need 0 <= m <= l, got l={l}, m={m}")
    t = _check_domain(t)
    s = np.sqrt((1.0 - t) * (1.0 + t))
    pmm = np.ones_like(t)
    for k in range(1, m + 1):
        pmm = pmm * (2 * k - 1) * s
    if l == m:
        return pmm[()] if pmm.ndim == 0 else pmm
    p_prev, p = pmm, (2 * m + 1) * t * pmm
    for k in range(m + 2, l + 1):
        p_prev, p = p, ((2 * k - 1) * t * p - (k + m - 1) * p_prev) / (k - m)
    return p[()] if p.ndim == 0 else p


def _normalized_assoc(l: int, m: int, t: np.ndarray) -> np.ndarray:
    """``sqrt((2l+1)/(4 pi) (l-m)!/(l+m)!) P_l^m(t)`` via the normalised recurrence."""
    s = np.sqrt((1.0 - t) * (1.0 + t))
    p = np.full_like(t, 1.0 / np.sqrt(4.0 * np.pi))
    for k in range(1, m + 1):
        p = p * np.sqrt((2 * k + 1) / (2.0 * k)) * s
    if l == m:
        return p
    p_prev, p = p, np.sqrt(2 * m + 3.0) * t * p
    for k in range(m + 2, l + 1):
        a = np.sqrt((4.0 * k * k - 1.0) / (k * k - m * m))
        b = np.sqrt(((k - 1.0) ** 2 - m * m) / (4.0 * (k - 1.0) ** 2 - 1.0))
        p_prev, p = p, a * (t * p - b * p_prev)
    return p


def real_sph_harm(l: int, m: int, x: PointsLike):
    """Real orthonormal harmonic ``Y_l^m``.

    Returns a float for a single :class:`SpherePoint`, otherwise an array.
    """
    HarmonicIndex(l, m)
    psi, zeta = as_angles(x)
    base = _normalized_assoc(l, abs(m), np.cos(zeta))
    if m > 0:
        out = np.sqrt(2.0) * base * np.cos(m * psi)
    elif m < 0:
        out = np.sqrt(2.0) * base * np.sin(-m * psi)
    else:
        out = base
    return float(out[0]) if isinstance(x, SpherePoint) else out


def sph_harm_table(points: PointsLike, lmax: int) -> np.ndarray:
    """All real harmonics up to ``lmax``: array ``(n, (lmax+1)**2)``."""
    psi, zeta = as_angles(points)
    t = np.cos(zeta)
    s = np.sin(zeta)
    n = len(t)
    out = np.empty((n, n_harmonics(lmax)))
    cos_m = [np.cos(m * psi) for m in range(lmax + 1)]
    sin_m = [np.sin(m * psi) for m in range(lmax + 1)]
    pmm = np.full(n, 1.0 / np.sqrt(4.0 * np.pi))
    root2 = np.sqrt(2.0)
    for m in range(lmax + 1):
        if m > 0:
            pmm = pmm * np.sqrt((2 * m + 1) / (2.0 * m)) * s
        p_prev, p = None, pmm
        for l in range(m, lmax + 1):
            if l == m + 1:
                p_prev, p = p, np.sqrt(2 * m + 3.0) * t * p
            elif l > m + 1:
                a = np.sqrt((4.0 * l * l - 1.0) / (l * l - m * m))
                b = np.sqrt(((l - 1.0) ** 2 - m * m) / (4.0 * (l - 1.0) ** 2 - 1.0))
                p_prev, p = p, a * (t * p - b * p_prev)
            if m == 0:
                out[:, flat_index(l, 0)] = p
            else:
                out[:, flat_index(l, m)] = root2 * p * cos_m[m]
                out[:, flat_index(l, -m)] = root2 * p * sin_m[m]
    return out


def harmonic_design_matrix(points: PointsLike, degrees) -> np.ndarray:
    """Matrix ``Q`` with entries ``q_nu(x_i)``; columns ordered l ascending, m from -l to l."""
    D = as_degree_set(degrees)
    psi, _ = as_angles(points)
    if len(psi) == 0:
        raise ValueError("need at least one point")
    if not len(D):
        return np.zeros((len(psi), 0))
    return sph_harm_table(points, D.max_degree)[:, D.flat_indices()]


def harmonic_function(l: int, m: int):
    """``Y_l^m`` as a callable ``f(psi, zeta) -> array``."""
    HarmonicIndex(l, m)

    def f(psi, zeta):
        return real_sph_harm(l, m, np.column_stack([np.ravel(psi), np.ravel(zeta)]))

    f.__name__ = f"Y_{l}^{m}"
    return f


def numerical_rank(a: np.ndarray, rtol: float = 1e-10) -> int:
    """Rank from singular values relative to the largest one."""
    if a.size == 0:
        return 0
    s = np.linalg.svd(a, compute_uv=False)
    if s[0] == 0.0:
        return 0
    return int(np.sum(s > rtol * s[0]))
