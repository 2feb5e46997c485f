import numpy as np
import pytest
from hypothesis import settings

from kerrwave.config import RunConfig
from kerrwave.fem import FeSpace1D, Mesh1D

settings.register_profile("kerrwave", derandomize=True, deadline=None, max_examples=60)
settings.load_profile("kerrwave")


def make_spaces(cells, p):
    mesh = Mesh1D(cells)
    return FeSpace1D(mesh, p, True), FeSpace1D(mesh, p - 1, False)


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


@pytest.fixture
def pulse_config():
    """Gaussian pulse in a Kerr medium on a small mesh."""
    return RunConfig(p=2, k=1, cells=16, tau=0.01, T=0.1, chi3=0.1, snapshots=(0.0, 0.1))


# criterion number -> (passed, detail); filled by test_acceptance
ACCEPTANCE = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(ACCEPTANCE):
        passed, detail = ACCEPTANCE[n]
        terminalreporter.write_line(f"criterion {n:2d}: {'PASS' if passed else 'FAIL'}  {detail}")
