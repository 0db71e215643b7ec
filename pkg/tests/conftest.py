import numpy as np
import pytest

from sphirf.core_sphere import SpherePoint

ACCEPTANCE_RESULTS = []


def random_angles(rng, n):
    """Uniform random points on the sphere as an (n, 2) array of (psi, zeta)."""
    return np.column_stack([rng.uniform(0.0, 2.0 * np.pi, n), np.arccos(rng.uniform(-1.0, 1.0, n))])


def random_point(rng):
    psi, zeta = random_angles(rng, 1)[0]
    return SpherePoint(psi, zeta)


@pytest.fixture
def rng():
    return np.random.default_rng(20261019)


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for number, ok, detail in sorted(ACCEPTANCE_RESULTS):
        terminalreporter.write_line(f"criterion {number:>2}: {'PASS' if ok else 'FAIL'}  {detail}")
