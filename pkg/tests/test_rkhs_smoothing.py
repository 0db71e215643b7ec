import numpy as np
import pytest
from scipy import linalg

from sphirf.core_sphere import SpherePoint, to_points
from sphirf.errors import NonUnisolvent, RankDeficientDesign
from sphirf.harmonics import DegreeSet, harmonic_design_matrix
from sphirf.rkhs_smoothing import (
    KernelExpansion, cardinal_basis, default_taus, dual_kriging_equivalence, evaluate_fit,
    fit_smoothing_spline, kernel_matrix, kernel_section, reproducing_kernel, rkhs_inner,
    semi_norm_sq,
)
from sphirf.spectral_model import explicit_model, power_law_model

import oracles
from conftest import random_angles


def residual_ss(fit, sites, w):
    return float(np.sum((w - fit(sites)) ** 2))


def test_cardinal_constant():
    basis = cardinal_basis(None, {0})
    pts = random_angles(np.random.default_rng(1), 10)
    assert np.abs(basis.values(pts) - 1.0).max() < 1e-14


def test_cardinal_degree_one(rng):
    basis = cardinal_basis(None, {0, 1})
    assert np.abs(basis.values(basis.taus) - np.eye(4)).max() < 1e-10
    taus = random_angles(rng, 4)
    assert np.abs(cardinal_basis(taus, {0, 1}).values(taus) - np.eye(4)).max() < 1e-10


def test_default_taus_layout():
    taus = default_taus({0, 1})
    assert taus[0].zeta == 0.0
    assert [t.zeta for t in taus[1:]] == pytest.approx([np.pi / 2] * 3)
    assert len(default_taus({0, 1, 2})) == 9
    assert np.abs(cardinal_basis(None, {0, 1, 2}).values(default_taus({0, 1, 2})) - np.eye(9)).max() < 1e-10


def test_great_circle_not_unisolvent():
    taus = [SpherePoint(k * 0.7, np.pi / 2) for k in range(4)]
    with pytest.raises(NonUnisolvent):
        cardinal_basis(taus, {0, 1})
    with pytest.raises(NonUnisolvent):
        cardinal_basis(taus[:3], {0, 1})


def model01():
    return power_law_model({0, 1}, 1.0, 3.0, 0.0, 30)


def test_kernel_symmetry_and_psd(rng):
    model, basis = model01(), cardinal_basis(None, {0, 1})
    pts = random_angles(rng, 15)
    H = kernel_matrix(pts, pts, basis, model)
    assert np.abs(H - H.T).max() < 1e-12
    assert np.linalg.eigvalsh(H).min() >= -1e-9
    x, y = to_points(pts[:2])
    assert reproducing_kernel(x, y, basis, model) == pytest.approx(reproducing_kernel(y, x, basis, model), abs=1e-12)


def test_kernel_at_cardinal_points(rng):
    model, basis = model01(), cardinal_basis(None, {0, 1})
    pts = random_angles(rng, 50)
    H = kernel_matrix(basis.taus, pts, basis, model)
    assert np.abs(H - basis.values(pts).T).max() < 1e-10


def test_kernel_section_reproduces(rng):
    model, basis = model01(), cardinal_basis(None, {0, 1})
    pts = to_points(random_angles(rng, 6))
    x = pts[0]
    sec = kernel_section(x, basis, model)
    # H(x, .) evaluated pointwise
    assert np.abs(sec(pts) - kernel_matrix([x], pts, basis, model)[0]).max() < 1e-10
    # <f, H(x, .)> = f(x) for a representable f with a kernel part orthogonal to the nil space
    fit = fit_smoothing_spline(random_angles(rng, 12), rng.normal(size=12), model, 0.1)
    assert rkhs_inner(fit, sec, basis) == pytest.approx(fit(x), abs=1e-9)


def test_nil_space_data_fits_exactly(rng):
    D = DegreeSet([0, 1])
    model = power_law_model(D, lmax=30)
    sites = random_angles(rng, 20)
    b_true = rng.normal(size=4)
    w = harmonic_design_matrix(sites, D) @ b_true
    for alpha in (1e-4, 1.0, 100.0):
        fit = fit_smoothing_spline(sites, w, model, alpha)
        assert np.abs(fit.c).max() < 1e-9
        assert np.abs(fit.b - b_true).max() < 1e-9
        assert residual_ss(fit, sites, w) < 1e-16


def test_side_condition(rng):
    model = model01()
    sites = random_angles(rng, 25)
    fit = fit_smoothing_spline(sites, rng.normal(size=25), model, 0.01)
    assert np.abs(harmonic_design_matrix(sites, model.degrees).T @ fit.c).max() < 1e-9


def test_large_alpha_is_harmonic_regression(rng):
    model = model01()
    sites, w = random_angles(rng, 30), rng.normal(size=30)
    fit = fit_smoothing_spline(sites, w, model, 1e12)
    assert np.linalg.norm(fit.c) < 1e-6 * np.linalg.norm(w)
    ref = oracles.harmonic_least_squares(sites, w, model.degrees)
    assert np.abs(fit.b - ref).max() < 1e-6


def test_small_alpha_interpolates(rng):
    model = model01()
    sites, w = random_angles(rng, 20), rng.normal(size=20)
    fit = fit_smoothing_spline(sites, w, model, 1e-12)
    assert np.abs(evaluate_fit(fit, sites) - w).max() < 1e-6


def test_objective_optimality(rng):
    model = model01()
    sites, w = random_angles(rng, 20), rng.normal(size=20)
    alpha = 0.05
    fit = fit_smoothing_spline(sites, w, model, alpha)
    Q = harmonic_design_matrix(sites, model.degrees)
    Psi = oracles.phi_matrix(model, sites, sites)
    N = linalg.null_space(Q.T)

    def objective(b, c):
        f = Q @ b + Psi @ c
        return np.sum((w - f) ** 2) + alpha * c @ Psi @ c

    base = objective(fit.b, fit.c)
    for _ in range(50):
        db = rng.normal(size=4)
        dc = N @ rng.normal(size=N.shape[1])
        scale = 1e-4 / np.sqrt(db @ db + dc @ dc)
        assert objective(fit.b + scale * db, fit.c + scale * dc) >= base - 1e-13


def test_evaluate_nil_only():
    model = model01()
    fit = KernelExpansion(np.array([1.0, 0, 0, 0]), np.zeros(0), np.zeros((0, 2)), model)
    pts = random_angles(np.random.default_rng(3), 5)
    assert np.allclose(evaluate_fit(fit, pts), 1.0 / np.sqrt(4 * np.pi), atol=1e-15)
    assert semi_norm_sq(fit) == 0.0


def test_semi_norm_single_mode():
    model = explicit_model({0}, [0.0, 0.0, 0.7])
    fit = KernelExpansion(np.zeros(1), np.array([1.0]), np.array([[0.4, 1.1]]), model)
    assert semi_norm_sq(fit) == pytest.approx(5 * 0.7 / (4 * np.pi), rel=1e-14)


def test_semi_norm_spectral_oracle(rng):
    lmax = 12
    model = power_law_model({0, 1}, 1.0, 3.0, 0.0, lmax)
    sites = random_angles(rng, 15)
    fit = fit_smoothing_spline(sites, rng.normal(size=15), model, 0.1)
    kernel_part = KernelExpansion(np.zeros(4), fit.c, fit.centers, model)
    # exact product rule for degree <= 2*lmax integrands
    t, wt = np.polynomial.legendre.leggauss(lmax + 2)
    nphi = 2 * lmax + 3
    zz, pp = np.meshgrid(np.arccos(t), 2 * np.pi * np.arange(nphi) / nphi, indexing="ij")
    nodes = np.column_stack([pp.ravel(), zz.ravel()])
    weights = np.outer(wt, np.full(nphi, 2 * np.pi / nphi)).ravel()
    g = kernel_part(nodes)
    total = 0.0
    for l in range(2, lmax + 1):
        Y = oracles.real_harmonics(nodes, {l})
        a_lm = (weights * g) @ Y
        total += a_lm @ a_lm / model.coeffs[l]
    assert semi_norm_sq(fit) == pytest.approx(total, rel=1e-8, abs=1e-12)


def test_dual_equivalence_random_instances(rng):
    worst = 0.0
    for _ in range(100):
        D = [{0}, {0, 1}, {0, 1, 2}][rng.integers(3)]
        d_n = DegreeSet(D).dim
        n = int(rng.integers(d_n + 2, 61))
        alpha = float(10 ** rng.uniform(-6, 2))
        model = power_law_model(D, 1.0, float(rng.uniform(2.5, 4.0)), 0.0, 30)
        sites, w = random_angles(rng, n), rng.normal(size=n)
        check = dual_kriging_equivalence(sites, w, model, alpha, random_angles(rng, 5))
        worst = max(worst, check.gap)
    assert worst < 1e-9


def test_dual_interpolation_limit(rng):
    model = model01()
    sites, w = random_angles(rng, 15), rng.normal(size=15)
    check = dual_kriging_equivalence(sites, w, model, 1e-12, to_points(sites[3:4])[0])
    assert check.smoothing == pytest.approx(w[3], abs=1e-6)
    assert check.kriging == pytest.approx(w[3], abs=1e-6)


def test_dual_trend_only(rng):
    D = DegreeSet([0, 1])
    model = power_law_model(D, lmax=30)
    sites, x0 = random_angles(rng, 12), random_angles(rng, 4)
    b = rng.normal(size=4)
    check = dual_kriging_equivalence(sites, harmonic_design_matrix(sites, D) @ b, model, 0.3, x0)
    trend = harmonic_design_matrix(x0, D) @ b
    assert np.abs(check.smoothing - trend).max() < 1e-9
    assert np.abs(check.kriging - trend).max() < 1e-9


def test_monotone_in_alpha(rng):
    model = model01()
    sites, w = random_angles(rng, 30), rng.normal(size=30)
    rough, resid = [], []
    for alpha in np.logspace(-5, 4, 10):
        fit = fit_smoothing_spline(sites, w, model, alpha)
        rough.append(semi_norm_sq(fit))
        resid.append(residual_ss(fit, sites, w))
    assert all(b <= a * (1 + 1e-9) + 1e-14 for a, b in zip(rough, rough[1:]))
    assert all(b >= a * (1 - 1e-9) - 1e-14 for a, b in zip(resid, resid[1:]))


def test_errors(rng):
    model = model01()
    sites = [SpherePoint(2 * np.pi * k / 6, np.pi / 2) for k in range(6)]
    with pytest.raises(RankDeficientDesign):
        fit_smoothing_spline(sites, np.ones(6), model, 0.1)
    with pytest.raises(ValueError):
        fit_smoothing_spline(random_angles(rng, 6), np.ones(6), model, 0.0)
