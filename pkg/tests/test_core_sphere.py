import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from sphirf.core_sphere import (
    NORTH_POLE,
    SOUTH_POLE,
    Rotation,
    SpherePoint,
    cos_angle_matrix,
    default_quadrature,
    distance_matrix,
    gauss_sphere_quadrature,
    rotate,
    spherical_distance,
    to_xyz,
)
from sphirf.harmonics import real_sph_harm, sph_harm_table

from conftest import random_angles, random_point

points = st.builds(SpherePoint,
                   st.floats(0.0, 2 * np.pi, allow_nan=False),
                   st.floats(0.0, np.pi, allow_nan=False))


def test_point_normalisation():
    p = SpherePoint(-np.pi / 2, 0.3)
    assert p.psi == pytest.approx(1.5 * np.pi)
    assert SpherePoint(1.0, 4.0).zeta == np.pi
    assert SpherePoint(2.5, 0.0).psi == 0.0
    assert SpherePoint(2.5, np.pi).psi == 0.0
    assert 0.0 <= SpherePoint(-1e-17, 1.0).psi < 2 * np.pi


def test_vector_round_trip(rng):
    for psi, zeta in random_angles(rng, 200):
        p = SpherePoint(psi, zeta)
        q = SpherePoint.from_vector(p.to_vector())
        assert q.zeta == pytest.approx(p.zeta, abs=1e-12)
        assert abs(np.angle(np.exp(1j * (q.psi - p.psi)))) < 1e-12


def test_distance_trivial_cases():
    x = SpherePoint(1.2, 0.7)
    assert spherical_distance(x, x) == 0.0
    assert spherical_distance(NORTH_POLE, SOUTH_POLE) == pytest.approx(np.pi)
    for psi in (0.0, 1.0, 4.0):
        assert spherical_distance(NORTH_POLE, SpherePoint(psi, np.pi / 2)) == pytest.approx(np.pi / 2)


def test_distance_matches_dot_product(rng):
    a, b = random_angles(rng, 100), random_angles(rng, 100)
    xa, xb = to_xyz(a), to_xyz(b)
    expected = np.arccos(np.clip(np.sum(xa * xb, axis=1), -1, 1))
    got = [spherical_distance(SpherePoint(*p), SpherePoint(*q)) for p, q in zip(a, b)]
    np.testing.assert_allclose(got, expected, atol=1e-12)
    np.testing.assert_allclose(np.diag(distance_matrix(a, b)), expected, atol=1e-12)


@settings(max_examples=200, deadline=None)
@given(points, points, points)
def test_triangle_inequality(x, y, z):
    assert spherical_distance(x, z) <= spherical_distance(x, y) + spherical_distance(y, z) + 1e-12


@settings(max_examples=100, deadline=None)
@given(points, points)
def test_distance_symmetric_and_bounded(x, y):
    d = spherical_distance(x, y)
    assert d == spherical_distance(y, x)
    assert 0.0 <= d <= np.pi


def test_rotation_constructors(rng):
    g = Rotation.random(rng)
    m = g.matrix
    assert np.abs(m @ m.T - np.eye(3)).max() < 1e-12
    assert abs(np.linalg.det(m) - 1) < 1e-12
    with pytest.raises(ValueError):
        Rotation(np.diag([1.0, 1.0, -1.0]))
    with pytest.raises(ValueError):
        Rotation(2 * np.eye(3))


def test_rotate_identity_and_polar_half_turn():
    x = SpherePoint(0.4, 1.1)
    y = rotate(Rotation.identity(), x)
    assert y.psi == pytest.approx(x.psi, abs=1e-14) and y.zeta == pytest.approx(x.zeta, abs=1e-14)
    z = rotate(Rotation.about_axis([0, 0, 1], np.pi), x)
    assert z.psi == pytest.approx((x.psi + np.pi) % (2 * np.pi), abs=1e-12)
    assert z.zeta == pytest.approx(x.zeta, abs=1e-12)


def test_rotation_preserves_distance(rng):
    for _ in range(100):
        g = Rotation.random(rng)
        x, y = random_point(rng), random_point(rng)
        gx, gy = rotate(g, x), rotate(g, y)
        # compare cosines: arccos amplifies rounding near 0 and pi
        c0 = x.to_vector() @ y.to_vector()
        c1 = gx.to_vector() @ gy.to_vector()
        assert abs(c1 - c0) < 1e-12
        assert abs(spherical_distance(gx, gy) - spherical_distance(x, y)) < 1e-7


def test_rotate_many_points(rng):
    a = random_angles(rng, 10)
    g = Rotation.random(rng)
    rotated = rotate(g, a)
    np.testing.assert_allclose(cos_angle_matrix(rotated), cos_angle_matrix(a), atol=1e-12)


def test_single_ring_quadrature():
    q = gauss_sphere_quadrature(1, 1)
    assert len(q) == 1
    assert q.weights.sum() == pytest.approx(4 * np.pi, rel=1e-15)
    assert q.degree == 0


def test_quadrature_gram_identity():
    q = gauss_sphere_quadrature(16, 33)
    assert q.degree == 15
    Y = sph_harm_table(q.angles, 10)
    gram = (Y * q.weights[:, None]).T @ Y
    assert np.abs(gram - np.eye(len(gram))).max() < 1e-10


def test_quadrature_of_single_harmonic():
    q = default_quadrature(4)
    assert abs(q.integrate(real_sph_harm(2, 1, q.angles))) < 1e-12


def test_default_quadrature_budget():
    for L in range(0, 12):
        assert default_quadrature(L).degree == L


@pytest.mark.parametrize("args", [(0, 3), (3, 0), (2.5, 3), (-1, -1)])
def test_quadrature_rejects_bad_sizes(args):
    with pytest.raises(ValueError):
        gauss_sphere_quadrature(*args)
