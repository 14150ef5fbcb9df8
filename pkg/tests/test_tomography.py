import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from oracles import random_density, trace_norm_2x2
from polwitness import CountRecord, InvalidParameterError, reconstruct, simulate_counts
from polwitness.states import H, projector
from polwitness.tomography import bloch_vector, from_bloch

HH = projector(H)


def td(a, b):
    return 0.5 * trace_norm_2x2(a - b)


def test_eigenstate_counts_are_certain():
    for n in (1, 17, 10 ** 6):
        rec = simulate_counts(HH, n, seed=3)
        assert tuple(rec.counts[0]) == (n, 0)


def test_maximally_mixed_counts():
    n = 10 ** 6
    rec = simulate_counts(np.eye(2) / 2, n, seed=1)
    assert np.all(np.abs(rec.counts - n / 2) <= 2500)


def test_seeded_counts_reproducible():
    rho = random_density(np.random.default_rng(0))
    a = simulate_counts(rho, 1000, seed=42)
    b = simulate_counts(rho, 1000, seed=42)
    assert np.array_equal(a.counts, b.counts)


def test_exact_inversion():
    n = 1000
    rec = CountRecord([[n, 0], [n // 2, n // 2], [n // 2, n // 2]], n)
    assert np.allclose(reconstruct(rec), HH, atol=0)


def test_settings_axes():
    # D/A probes sigma_x and R/L probes sigma_y
    d = projector(np.array([1, 1]) / math.sqrt(2))
    r = projector(np.array([1, 1j]) / math.sqrt(2))
    assert tuple(simulate_counts(d, 50, seed=0).counts[1]) == (50, 0)
    assert tuple(simulate_counts(r, 50, seed=0).counts[2]) == (50, 0)


def test_large_n_recovers_pure_state():
    psi = np.array([math.cos(0.3), math.sin(0.3) * np.exp(0.4j)])
    rho = projector(psi)
    # radial noise is not undone for |r| < 1, so infidelity falls like 1/sqrt(n)
    infidelity = [np.mean([1 - np.real(psi.conj() @ reconstruct(simulate_counts(rho, n, s)) @ psi)
                           for s in range(20)]) for n in (10 ** 5, 10 ** 7, 10 ** 9)]
    assert infidelity[0] > infidelity[1] > infidelity[2]
    assert infidelity[2] < 1e-4


def test_calibrated_reduced_state_accuracy():
    c = math.exp(-1)
    rho = np.array([[0.5, 0.5 * c], [0.5 * c, 0.5]])
    errs = [td(reconstruct(simulate_counts(rho, 10 ** 5, seed=s)), rho) for s in range(100)]
    assert np.mean(errs) <= 0.01


@given(st.integers(0, 2 ** 32 - 1), st.integers(1, 200))
@settings(max_examples=80, deadline=None)
def test_reconstruction_is_physical(seed, n):
    rng = np.random.default_rng(seed)
    est = reconstruct(simulate_counts(random_density(rng), n, rng))
    assert np.allclose(est, est.conj().T, atol=1e-15)
    assert abs(np.trace(est) - 1) <= 1e-12
    assert np.linalg.eigvalsh(est)[0] >= -1e-12


def test_rescaling_of_unphysical_counts():
    n = 10
    rec = CountRecord([[10, 0], [10, 0], [5, 5]], n)
    est = reconstruct(rec)
    assert np.linalg.norm(bloch_vector(est)) == pytest.approx(1.0, abs=1e-12)
    assert np.linalg.eigvalsh(est)[0] >= -1e-12


def test_error_scaling():
    rng = np.random.default_rng(2024)
    rho = random_density(rng, rank=2)
    ns = np.array([1e3, 1e4, 1e5])
    errs = [np.mean([td(reconstruct(simulate_counts(rho, int(n), rng)), rho)
                     for _ in range(200)]) for n in ns]
    slope = np.polyfit(np.log(ns), np.log(errs), 1)[0]
    assert slope == pytest.approx(-0.5, abs=0.15)


def test_stacked_states():
    rng = np.random.default_rng(1)
    rhos = np.stack([random_density(rng) for _ in range(6)]).reshape(2, 3, 2, 2)
    rec = simulate_counts(rhos, 100, seed=0)
    assert rec.counts.shape == (2, 3, 3, 2)
    assert reconstruct(rec).shape == (2, 3, 2, 2)


def test_bloch_roundtrip():
    rho = random_density(np.random.default_rng(9))
    assert np.allclose(from_bloch(bloch_vector(rho)), rho, atol=1e-15)


def test_invalid_records():
    with pytest.raises(InvalidParameterError):
        CountRecord([[5, 4], [5, 5], [5, 5]], 10)
    with pytest.raises(InvalidParameterError):
        CountRecord([[5, 5], [5, 5]], 10)
    with pytest.raises(InvalidParameterError):
        simulate_counts(HH, 0)
