import numpy as np
import pytest

from sphirf.core_sphere import default_quadrature, distance_matrix, to_points
from sphirf.harmonics import DegreeSet
from sphirf.measures import annihilate, apply, atomic, kriging_measure
from sphirf.simulation import (
    analytic_covariance, coefficient_variances, empirical_stationarity_check, simulate_irf,
    truncate_field,
)
from sphirf.spectral_model import explicit_model, phi_from_cos, power_law_model

import oracles
from conftest import random_angles


def as_func(field):
    return lambda psi, zeta: field(np.column_stack([psi, zeta]))


def test_zero_field(rng):
    model = explicit_model({0}, [0.0] * 8)
    f = simulate_irf(model, seed=1)
    assert np.all(f(random_angles(rng, 20)) == 0.0)


def test_seed_determinism():
    model = power_law_model({0, 1}, lmax=20)
    a, b = simulate_irf(model, seed=42), simulate_irf(model, seed=42)
    assert np.array_equal(a.coeffs, b.coeffs)
    assert not np.array_equal(a.coeffs, simulate_irf(model, seed=43).coeffs)


def test_degree_set_coefficients_zero_unless_given():
    model = power_law_model({0, 1}, lmax=10)
    f = simulate_irf(model, seed=0)
    assert all(f.coefficient(l, m) == 0.0 for l in (0, 1) for m in range(-l, l + 1))
    g = simulate_irf(model, low_coeffs={(1, -1): 2.5}, seed=0)
    assert g.coefficient(1, -1) == 2.5
    with pytest.raises(ValueError):
        simulate_irf(model, low_coeffs={(2, 0): 1.0})


def test_truncation(rng):
    model = power_law_model({0, 1}, lmax=12)
    f = simulate_irf(model, low_coeffs={(0, 0): 1.0, (1, 1): -0.5}, seed=3)
    pts = random_angles(rng, 10)
    assert np.array_equal(truncate_field(f, DegreeSet([])).coeffs, f.coeffs)
    once = truncate_field(f, model.degrees)
    assert np.array_equal(truncate_field(once, model.degrees).coeffs, once.coeffs)
    assert np.abs(once(pts) - simulate_irf(model, seed=3)(pts)).max() < 1e-14


def test_kriging_measure_applied_to_field(rng):
    L = 15
    model = power_law_model({0, 1, 2}, lmax=L)
    low = {(l, m): float(rng.normal()) for l in (0, 1, 2) for m in range(-l, l + 1)}
    f = simulate_irf(model, low_coeffs=low, seed=5)
    trunc = truncate_field(f, model.degrees)
    quad = default_quadrature(L)
    for y in to_points(random_angles(rng, 5)):
        lam = kriging_measure(y, model.degrees, quad)
        assert apply(lam, as_func(f)) == pytest.approx(trunc(y), abs=1e-9)


def test_analytic_covariance_equals_phi(rng):
    model = power_law_model({0, 1}, 1.0, 3.0, 0.0, 40)
    x, y = random_angles(rng, 30), random_angles(rng, 30)
    cov = analytic_covariance(model, x, y)
    ref = oracles.phi_matrix(model, x, y)
    assert np.abs(cov - ref).max() < 1e-11
    assert np.abs(cov - phi_from_cos(model, np.cos(distance_matrix(x, y)))).max() < 1e-11


def test_single_mode_covariance(rng):
    model = explicit_model({0}, [0.0, 0.6])
    x, y = random_angles(rng, 8), random_angles(rng, 8)
    expected = 3 * 0.6 / (4 * np.pi) * np.cos(distance_matrix(x, y))
    assert np.abs(analytic_covariance(model, x, y) - expected).max() < 1e-13
    assert np.all(coefficient_variances(model) == [0.0, 0.6, 0.6, 0.6])


def test_equivalence_class_under_allowable_measures(rng):
    L = 10
    D = DegreeSet([0, 1])
    model = power_law_model(D, lmax=L)
    quad = default_quadrature(L)
    f = simulate_irf(model, low_coeffs={(0, 0): 3.0, (1, 0): -1.0}, seed=9)
    g = simulate_irf(model, low_coeffs={(1, 1): 7.0, (1, -1): 0.25}, seed=9)
    for _ in range(20):
        n = int(rng.integers(1, 6))
        mu = annihilate(atomic(random_angles(rng, n), rng.normal(size=n)), D, quad)
        assert apply(mu, as_func(f)) == pytest.approx(apply(mu, as_func(g)), abs=1e-9)


def test_monte_carlo_stationarity():
    model = explicit_model({0}, [0.0, 0.0, 1.0])
    report = empirical_stationarity_check(model, n_reps=20000, n_pairs=10, seed=11)
    assert report.max_z < 4.0
    assert report.max_rotated_z < 4.0
    assert report.passed()
