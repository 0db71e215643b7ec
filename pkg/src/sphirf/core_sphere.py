"""Points, rotations, distances and quadrature on the unit sphere.

Coordinates are ``(psi, zeta)`` in radians: ``psi`` is longitude in
``[0, 2*pi)`` and ``zeta`` is colatitude in ``[0, pi]`` (0 at the north
pole).  Anything that needs trigonometry between points goes through unit
3-vectors.

Most vectorised helpers accept "points" in any of three forms: a single
:class:`SpherePoint`, a sequence of them, or an ``(n, 2)`` array whose
columns are ``psi`` and ``zeta``.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence, Union

import numpy as np
from scipy.spatial.transform import Rotation as _ScipyRotation

TWO_PI = 2.0 * np.pi


@dataclass(frozen=True)
class SpherePoint:
    psi: float
    zeta: float

    def __post_init__(self):
        zeta = min(max(float(self.zeta), 0.0), np.pi)
        psi = float(self.psi) % TWO_PI
        if psi >= TWO_PI:
            psi = 0.0
        if zeta == 0.0 or zeta == np.pi:
            psi = 0.0
        object.__setattr__(self, "psi", psi)
        object.__setattr__(self, "zeta", zeta)

    def to_vector(self) -> np.ndarray:
        s = np.sin(self.zeta)
        return np.array([s * np.cos(self.psi), s * np.sin(self.psi), np.cos(self.zeta)])

    @classmethod
    def from_vector(cls, v) -> "SpherePoint":
        x, y, z = (float(c) for c in v)
        zeta = np.arctan2(np.hypot(x, y), z)
        psi = np.arctan2(y, x) if (x != 0.0 or y != 0.0) else 0.0
        return cls(psi, zeta)

    @classmethod
    def from_lonlat_deg(cls, lon: float, lat: float) -> "SpherePoint":
        return cls(np.radians(lon), np.pi / 2 - np.radians(lat))

    def to_lonlat_deg(self) -> tuple[float, float]:
        return float(np.degrees(self.psi)), float(90.0 - np.degrees(self.zeta))


PointsLike = Union[SpherePoint, Sequence[SpherePoint], np.ndarray]

NORTH_POLE = SpherePoint(0.0, 0.0)
SOUTH_POLE = SpherePoint(0.0, np.pi)


def as_angles(points: PointsLike) -> tuple[np.ndarray, np.ndarray]:
    """Return ``(psi, zeta)`` float arrays of shape ``(n,)``."""
    if isinstance(points, SpherePoint):
        return np.array([points.psi]), np.array([points.zeta])
    if isinstance(points, np.ndarray):
        arr = np.atleast_2d(np.asarray(points, dtype=float))
        if arr.shape[-1] != 2:
            raise ValueError(f"expected an (n, 2) array of (psi, zeta), got shape {arr.shape}")
        return arr[:, 0].copy(), arr[:, 1].copy()
    pts = list(points)
    psi = np.array([p.psi for p in pts], dtype=float)
    zeta = np.array([p.zeta for p in pts], dtype=float)
    return psi, zeta


def to_xyz(points: PointsLike) -> np.ndarray:
    psi, zeta = as_angles(points)
    s = np.sin(zeta)
    return np.column_stack([s * np.cos(psi), s * np.sin(psi), np.cos(zeta)])


def from_xyz(xyz: np.ndarray) -> list[SpherePoint]:
    return [SpherePoint.from_vector(v) for v in np.atleast_2d(xyz)]


def to_points(points: PointsLike) -> list[SpherePoint]:
    if isinstance(points, SpherePoint):
        return [points]
    if isinstance(points, np.ndarray):
        psi, zeta = as_angles(points)
        return [SpherePoint(p, z) for p, z in zip(psi, zeta)]
    return list(points)


def spherical_distance(x: SpherePoint, y: SpherePoint) -> float:
    """Great-circle angle between two points, in ``[0, pi]``.

    Uses ``atan2(|u x v|, u . v)`` on unit vectors, which keeps full relative
    accuracy for nearly coincident and nearly antipodal pairs where
    ``arccos`` of the clamped cosine does not.
    """
    u, v = x.to_vector(), y.to_vector()
    return float(np.arctan2(np.linalg.norm(np.cross(u, v)), u @ v))


def cos_angle_matrix(a: PointsLike, b: PointsLike | None = None) -> np.ndarray:
    """Matrix of ``cos d(a_i, b_j)`` from 3-vector dot products, clipped to [-1, 1]."""
    xa = to_xyz(a)
    xb = xa if b is None else to_xyz(b)
    return np.clip(xa @ xb.T, -1.0, 1.0)


def distance_matrix(a: PointsLike, b: PointsLike | None = None) -> np.ndarray:
    xa = to_xyz(a)
    xb = xa if b is None else to_xyz(b)
    cross = np.linalg.norm(np.cross(xa[:, None, :], xb[None, :, :]), axis=-1)
    return np.arctan2(cross, xa @ xb.T)


@dataclass(frozen=True, eq=False)
class Rotation:
    """A proper rotation of the sphere, stored as a 3x3 orthogonal matrix."""

    matrix: np.ndarray

    def __post_init__(self):
        m = np.array(self.matrix, dtype=float)
        if m.shape != (3, 3):
            raise ValueError("rotation matrix must be 3x3")
        if not np.allclose(m @ m.T, np.eye(3), atol=1e-10) or abs(np.linalg.det(m) - 1.0) > 1e-10:
            raise ValueError("matrix is not a proper rotation")
        m.setflags(write=False)
        object.__setattr__(self, "matrix", m)

    @classmethod
    def identity(cls) -> "Rotation":
        return cls(np.eye(3))

    @classmethod
    def about_axis(cls, axis, angle: float) -> "Rotation":
        axis = np.asarray(axis, dtype=float)
        return cls(_ScipyRotation.from_rotvec(angle * axis / np.linalg.norm(axis)).as_matrix())

    @classmethod
    def random(cls, rng: np.random.Generator | int | None = None) -> "Rotation":
        """Haar-distributed random rotation."""
        rng = np.random.default_rng(rng)
        return cls(_ScipyRotation.random(random_state=rng).as_matrix())

    def inverse(self) -> "Rotation":
        return Rotation(self.matrix.T)

    def __matmul__(self, other: "Rotation") -> "Rotation":
        return Rotation(self.matrix @ other.matrix)

    def apply_xyz(self, xyz: np.ndarray) -> np.ndarray:
        return np.atleast_2d(xyz) @ self.matrix.T


def rotate(g: Rotation, x):
    """Apply ``g`` to a point (returns a point) or to many points (returns a list)."""
    if isinstance(x, SpherePoint):
        return SpherePoint.from_vector(g.matrix @ x.to_vector())
    return from_xyz(g.apply_xyz(to_xyz(x)))


@dataclass(frozen=True, eq=False)
class SphereQuadrature:
    """Tensor quadrature rule on the sphere.

    ``degree`` is the largest ``L`` such that products ``Y_l^m Y_l'^m'`` with
    ``l, l' <= L`` are integrated exactly.
    """

    psi: np.ndarray
    zeta: np.ndarray
    weights: np.ndarray
    degree: int

    @property
    def nodes(self) -> list[SpherePoint]:
        return [SpherePoint(p, z) for p, z in zip(self.psi, self.zeta)]

    @property
    def angles(self) -> np.ndarray:
        return np.column_stack([self.psi, self.zeta])

    def __len__(self) -> int:
        return len(self.weights)

    def integrate(self, values) -> float:
        return float(np.dot(self.weights, np.asarray(values, dtype=float)))


def gauss_sphere_quadrature(n_theta: int, n_phi: int) -> SphereQuadrature:
    """Gauss-Legendre nodes in ``cos(zeta)`` times equispaced longitudes."""
    if int(n_theta) != n_theta or int(n_phi) != n_phi or n_theta < 1 or n_phi < 1:
        raise ValueError(f"n_theta and n_phi must be positive integers, got {n_theta}, {n_phi}")
    n_theta, n_phi = int(n_theta), int(n_phi)
    t, wt = np.polynomial.legendre.leggauss(n_theta)
    zeta = np.arccos(t)
    psi = TWO_PI * np.arange(n_phi) / n_phi
    zz, pp = np.meshgrid(zeta, psi, indexing="ij")
    weights = np.outer(wt, np.full(n_phi, TWO_PI / n_phi))
    degree = min(n_theta - 1, (n_phi - 1) // 2)
    return SphereQuadrature(pp.ravel(), zz.ravel(), weights.ravel(), degree)


def default_quadrature(degree: int) -> SphereQuadrature:
    """Smallest tensor rule of :func:`gauss_sphere_quadrature` exact to ``degree``."""
    return gauss_sphere_quadrature(degree + 1, 2 * degree + 1)
