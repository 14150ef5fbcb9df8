import math

import numpy as np
import pytest

from oracles import abs_sin_average
from polwitness import InvalidParameterError
from polwitness.quadrature import lorentzian_quad

DW = 1 / 9.703


def test_normalization():
    value, err = lorentzian_quad(lambda x: np.ones_like(x), DW)
    assert value == pytest.approx(1.0, abs=1e-10) and err <= 1e-10


@pytest.mark.parametrize("t", [1 / DW, 0.3 / DW, 7 / DW])
def test_fourier_transform(t):
    value, err = lorentzian_quad(lambda x: np.exp(1j * x * t), DW, period=math.pi / t)
    assert abs(value - math.exp(-DW * t)) <= 1e-10
    assert err <= 1e-10


def test_second_moment_of_truncated_quadratic():
    # int G(x) x^2/(x^2 + a^2) dx = dw / (dw + a) for a Lorentzian, a > 0
    a = 0.37
    value, _ = lorentzian_quad(lambda x: x ** 2 / (x ** 2 + a ** 2), DW)
    assert value == pytest.approx(DW / (DW + a), abs=1e-10)


def test_abs_sine_two_tolerances():
    t = 2.2104 / DW
    f = lambda x: np.abs(np.sin(x * t))  # noqa: E731
    coarse, _ = lorentzian_quad(f, DW, abs_tol=1e-6, period=math.pi / t, tail_mean=2 / math.pi)
    fine, _ = lorentzian_quad(f, DW, abs_tol=1e-11, period=math.pi / t, tail_mean=2 / math.pi)
    assert abs(coarse - fine) <= 1e-6
    assert fine == pytest.approx(abs_sin_average(t), abs=1e-11)


def test_rejects_tiny_tolerance():
    with pytest.raises(InvalidParameterError):
        lorentzian_quad(lambda x: x * 0 + 1, DW, abs_tol=1e-13)
