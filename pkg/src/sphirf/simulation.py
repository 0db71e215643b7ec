"""Band-limited Gaussian IRF synthesis and stationarity diagnostics."""
from __future__ import annotations

from dataclasses import dataclass, replace
from typing import Mapping

import numpy as np

from .core_sphere import PointsLike, Rotation, SpherePoint, from_xyz
from .harmonics import as_degree_set, flat_index, n_harmonics, sph_harm_table
from .spectral_model import SpectralModel, phi_from_cos


@dataclass(frozen=True, eq=False)
class HarmonicField:
    """Finite harmonic sum ``Z(x) = sum Z_lm Y_l^m(x)``, coefficients in flat order."""

    coeffs: np.ndarray
    model: SpectralModel
    seed: int | None = None

    @property
    def lmax(self) -> int:
        return int(round(np.sqrt(self.coeffs.size))) - 1

    def __call__(self, x: PointsLike):
        vals = sph_harm_table(x, self.lmax) @ self.coeffs
        return float(vals[0]) if isinstance(x, SpherePoint) else vals

    def coefficient(self, l: int, m: int) -> float:
        return float(self.coeffs[flat_index(l, m)])


def coefficient_variances(model: SpectralModel) -> np.ndarray:
    """Variance of each ``Z_lm`` (flat order): ``a_l`` off ``D``, 0 on ``D``."""
    a = model.active_coeffs
    return np.concatenate([np.full(2 * l + 1, a[l]) for l in range(model.lmax + 1)])


def simulate_irf(model: SpectralModel, low_coeffs: Mapping[tuple, float] | None = None,
                 seed: int | None = None) -> HarmonicField:
    """Draw ``Z_lm ~ N(0, a_l)`` for ``l`` not in ``D``; set ``l`` in ``D`` from ``low_coeffs``."""
    rng = np.random.default_rng(seed)
    coeffs = np.sqrt(coefficient_variances(model)) * rng.standard_normal(n_harmonics(model.lmax))
    for l in model.degrees:
        for m in range(-l, l + 1):
            if l <= model.lmax:
                coeffs[flat_index(l, m)] = 0.0
    for (l, m), v in (low_coeffs or {}).items():
        if l not in model.degrees:
            raise ValueError(f"low_coeffs entry (l={l}, m={m}) is not on the degree set")
        if l > model.lmax:
            raise ValueError(f"degree {l} exceeds lmax {model.lmax}")
        coeffs[flat_index(l, m)] = float(v)
    return HarmonicField(coeffs, model, seed)


def truncate_field(f: HarmonicField, degrees) -> HarmonicField:
    """Zero every coefficient whose degree lies in ``degrees``."""
    coeffs = f.coeffs.copy()
    for l in as_degree_set(degrees):
        if l <= f.lmax:
            coeffs[flat_index(l, -l):flat_index(l, l) + 1] = 0.0
    return replace(f, coeffs=coeffs)


def analytic_covariance(model: SpectralModel, x: PointsLike, y: PointsLike) -> np.ndarray:
    """``E[Z_D(x_i) Z_D(y_j)]`` computed from the sampler's coefficient variances."""
    var = coefficient_variances(model)
    return (sph_harm_table(x, model.lmax) * var) @ sph_harm_table(y, model.lmax).T


@dataclass(frozen=True)
class StationarityReport:
    distance: float
    phi: float
    estimates: np.ndarray
    std_errors: np.ndarray
    rotated_estimates: np.ndarray
    rotated_std_errors: np.ndarray
    max_abs_deviation: float
    max_z: float
    max_rotated_z: float

    def passed(self, z_bound: float = 4.0) -> bool:
        return self.max_z < z_bound and self.max_rotated_z < z_bound


def _pairs_at_distance(d: float, n_pairs: int, rng: np.random.Generator) -> tuple[np.ndarray, np.ndarray]:
    """``n_pairs`` random point pairs, each separated by angle ``d``."""
    start = SpherePoint(0.0, 0.0).to_vector()
    other = SpherePoint(0.0, d).to_vector()
    xs, ys = [], []
    for _ in range(n_pairs):
        g = Rotation.random(rng)
        xs.append(g.matrix @ start)
        ys.append(g.matrix @ other)
    return np.array(xs), np.array(ys)


def _angles(xyz: np.ndarray) -> np.ndarray:
    return np.array([[p.psi, p.zeta] for p in from_xyz(xyz)])


def empirical_stationarity_check(model: SpectralModel, n_reps: int = 20000, n_pairs: int = 10,
                                 seed: int | None = 0, distance: float | None = None,
                                 batch: int = 2000) -> StationarityReport:
    """Monte-Carlo check that ``cov(Z_D(x), Z_D(y))`` depends only on ``d(x, y)``.

    Pairs share one separation angle but have random orientations; each pair
    is also rotated by a random rotation and estimated again.
    """
    rng = np.random.default_rng(seed)
    d = float(rng.uniform(0.2, 2.5)) if distance is None else float(distance)
    xs, ys = _pairs_at_distance(d, n_pairs, rng)
    g = Rotation.random(rng)
    gx, gy = g.apply_xyz(xs), g.apply_xyz(ys)
    pts = _angles(np.vstack([xs, ys, gx, gy]))
    table = sph_harm_table(pts, model.lmax)
    sd = np.sqrt(coefficient_variances(model))

    sums = np.zeros(2 * n_pairs)
    sq = np.zeros(2 * n_pairs)
    done = 0
    while done < n_reps:
        k = min(batch, n_reps - done)
        z = (rng.standard_normal((k, sd.size)) * sd) @ table.T
        prod = np.hstack([z[:, :n_pairs] * z[:, n_pairs:2 * n_pairs],
                          z[:, 2 * n_pairs:3 * n_pairs] * z[:, 3 * n_pairs:]])
        sums += prod.sum(axis=0)
        sq += (prod * prod).sum(axis=0)
        done += k
    mean = sums / n_reps
    var = np.maximum(sq / n_reps - mean ** 2, 0.0) * n_reps / max(n_reps - 1, 1)
    se = np.sqrt(var / n_reps)

    phi = float(phi_from_cos(model, np.cos(d)))
    est, rest = mean[:n_pairs], mean[n_pairs:]
    se1, se2 = se[:n_pairs], se[n_pairs:]
    with np.errstate(divide="ignore", invalid="ignore"):
        z1 = np.abs(est - phi) / se1
        z2 = np.abs(est - rest) / np.sqrt(se1 ** 2 + se2 ** 2)
    z1 = np.where(np.isfinite(z1), z1, 0.0)
    z2 = np.where(np.isfinite(z2), z2, 0.0)
    return StationarityReport(
        distance=d, phi=phi, estimates=est, std_errors=se1,
        rotated_estimates=rest, rotated_std_errors=se2,
        max_abs_deviation=float(np.max(np.abs(est - phi))),
        max_z=float(np.max(z1)), max_rotated_z=float(np.max(z2)),
    )
