import math

import numpy as np
import pytest

from oracles import C_MM_PER_PS
from polwitness import (FitFailure, InvalidParameterError, VisibilityTrace,
                        estimate_birefringence, fit_linewidth, synthesize_visibility)
from polwitness.estimation import envelope_shift

DW = 1 / 9.703


def scan(decays=4.0, points=50, x0=0.0):
    half = decays * C_MM_PER_PS / (4 * DW)
    return np.linspace(-half, half, points) + x0


def test_visibility_at_zero_delay():
    tr = synthesize_visibility(DW, [0.0, 0.3], x0_mm=0.3)
    assert tr.visibility[1] == 1.0


def test_visibility_one_linewidth():
    x = C_MM_PER_PS * 9.703 / 2
    assert synthesize_visibility(DW, [x]).visibility[0] == pytest.approx(math.exp(-1), rel=1e-14)


def test_reproducible_noise():
    a = synthesize_visibility(DW, scan(), 0.01, seed=4)
    b = synthesize_visibility(DW, scan(), 0.01, seed=4)
    assert np.array_equal(a.visibility, b.visibility)
    assert np.all(a.visibility >= 0)


def test_noiseless_recovery():
    fit = fit_linewidth(synthesize_visibility(DW, scan(x0=0.4), x0_mm=0.4))
    assert fit.linewidth_ps == pytest.approx(9.703, rel=1e-3)
    assert fit.x0_mm == pytest.approx(0.4, rel=1e-3)
    assert fit.amplitude == pytest.approx(1.0, rel=1e-3)
    lw, err = fit
    assert lw == fit.linewidth_ps and err >= 0


def test_noisy_recovery_rate():
    hits = sum(abs(fit_linewidth(synthesize_visibility(DW, scan(), 0.01, seed=s)).linewidth_ps
                   / 9.703 - 1) <= 0.02 for s in range(100))
    assert hits >= 95


def test_constant_trace_fails():
    with pytest.raises(FitFailure):
        fit_linewidth(VisibilityTrace(scan(), np.ones(50)))


def test_too_few_points():
    with pytest.raises(FitFailure):
        fit_linewidth(synthesize_visibility(DW, scan(points=7)))


def test_short_scan_fails():
    with pytest.raises(FitFailure):
        fit_linewidth(synthesize_visibility(DW, scan(decays=1.0)))


def test_birefringence_examples():
    assert estimate_birefringence(0.0, 35.92) == 0.0
    shift = envelope_shift(35.92, 0.179)
    assert shift == pytest.approx(3.2148, abs=1e-4)
    assert estimate_birefringence(shift, 35.92) == pytest.approx(0.179, abs=1e-12)
    assert envelope_shift(2 * 35.92, 0.179) == pytest.approx(2 * shift, rel=1e-15)


@pytest.mark.parametrize("length,dn", [(1.0, 0.001), (8.98, 0.179), (120e3, 3e-4), (53.88, 0.5)])
def test_birefringence_roundtrip(length, dn):
    assert estimate_birefringence(envelope_shift(length, dn), length) == pytest.approx(dn,
                                                                                       abs=1e-12)


def test_shift_matches_crystal_delay():
    # the mirror shift's round-trip delay equals L dn / c
    shift = envelope_shift(35.92, 0.179)
    assert 2 * shift / C_MM_PER_PS == pytest.approx(35.92 * 0.179 / C_MM_PER_PS, rel=1e-15)


def test_shift_recovered_from_fits():
    shift = envelope_shift(35.92, 0.179)
    a = fit_linewidth(synthesize_visibility(DW, scan()))
    b = fit_linewidth(synthesize_visibility(DW, scan(x0=shift), x0_mm=shift))
    assert estimate_birefringence(b.x0_mm - a.x0_mm, 35.92) == pytest.approx(0.179, rel=1e-6)


def test_invalid_inputs():
    with pytest.raises(InvalidParameterError):
        estimate_birefringence(1.0, 0.0)
    with pytest.raises(InvalidParameterError):
        synthesize_visibility(0.0, [0.0])
    with pytest.raises(InvalidParameterError):
        VisibilityTrace([0.0, 1.0], [1.0])
