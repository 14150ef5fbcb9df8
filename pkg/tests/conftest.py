import functools
import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

from polwitness import discretize, make_lorentzian  # noqa: E402
from polwitness.spectrum import Quantile, UniformTruncated  # noqa: E402
from polwitness.units import LINEWIDTH_PS, WAVELENGTH_NM, wavelength_to_omega  # noqa: E402


@functools.lru_cache(maxsize=None)
def lab_spectrum():
    return make_lorentzian(wavelength_to_omega(WAVELENGTH_NM), 1.0 / LINEWIDTH_PS)


@functools.lru_cache(maxsize=None)
def quantile_grid(n=4096):
    return discretize(lab_spectrum(), Quantile(n))


@functools.lru_cache(maxsize=None)
def uniform_grid(n=4096, kappa=100.0):
    return discretize(lab_spectrum(), UniformTruncated(kappa, n))


@pytest.fixture
def spec():
    return lab_spectrum()


@pytest.fixture
def grid():
    return quantile_grid(4096)


@pytest.fixture
def small_grid():
    return quantile_grid(256)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


#: one line per acceptance criterion, filled in by tests/test_acceptance.py
ACCEPTANCE_LINES = {}


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for key in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(ACCEPTANCE_LINES[key])
