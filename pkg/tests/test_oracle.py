import numpy as np
import pytest

from conftest import lab_spectrum
from oracles import lorentz_coherence, random_density, total_trace_norm
from polwitness import (IncompatibleStatesError, InvalidParameterError, JointBlockState,
                        PreparationParams, apply_controlled_phase, trace_distance_joint)
from polwitness.channels import BasisSpec
from polwitness.oracle import (DenseJointState, adaptive_quad, controlled_phase_matrix,
                               dense_apply_unitary, dense_embed, dense_extract_blocks,
                               dense_trace_distance, run_equivalence_suite, small_grid)
from polwitness.spectrum import FrequencyGrid


def random_joint(rng, grid):
    return JointBlockState(grid, np.stack([random_density(rng) for _ in range(grid.n)]))


@pytest.fixture
def g32():
    return small_grid(lab_spectrum(), 32)


def test_single_bin_embedding():
    g = FrequencyGrid([0.0], [1.0], 2000.0)
    rho = random_density(np.random.default_rng(0))
    assert np.array_equal(dense_embed(JointBlockState(g, rho[None])).matrix, rho)


def test_embedding_trace_and_roundtrip(rng, g32):
    s = random_joint(rng, g32)
    d = dense_embed(s).check()
    assert np.trace(d.matrix) == pytest.approx(1.0, abs=1e-12)
    assert np.max(np.abs(dense_extract_blocks(d).blocks - s.blocks)) <= 1e-15


def test_size_guard():
    g = FrequencyGrid(np.arange(257.0), np.full(257, 1 / 257), 2000.0)
    with pytest.raises(InvalidParameterError):
        dense_embed(JointBlockState(g, np.broadcast_to(np.eye(2) / 2, (257, 2, 2))))


def test_identity_and_spectrum(rng, g32):
    d = dense_embed(random_joint(rng, g32))
    assert np.array_equal(dense_apply_unitary(d, np.eye(64)).matrix, d.matrix)
    q, _ = np.linalg.qr(rng.normal(size=(64, 64)) + 1j * rng.normal(size=(64, 64)))
    out = dense_apply_unitary(d, q)
    assert np.allclose(np.linalg.eigvalsh(out.matrix), np.linalg.eigvalsh(d.matrix), atol=1e-10)


def test_rejects_non_unitary(rng, g32):
    d = dense_embed(random_joint(rng, g32))
    with pytest.raises(InvalidParameterError):
        dense_apply_unitary(d, 2 * np.eye(64))


def test_controlled_phase_equivalence(rng, g32):
    s = random_joint(rng, g32)
    for eta, tau in [(0.0, 10.0), (0.9, -33.0), (2.5, 120.0)]:
        b = BasisSpec.eta(eta)
        block = dense_embed(apply_controlled_phase(s, b, tau)).matrix
        dense = dense_apply_unitary(dense_embed(s), controlled_phase_matrix(g32, b, tau)).matrix
        assert np.max(np.abs(block - dense)) <= 1e-12


def test_trace_distance(rng, g32):
    a, b = random_joint(rng, g32), random_joint(rng, g32)
    da, db = dense_embed(a), dense_embed(b)
    assert dense_trace_distance(da, da) == 0
    assert dense_trace_distance(da, db) == pytest.approx(trace_distance_joint(a, b), abs=1e-12)
    hh = np.diag([1.0, 0, 0, 0]).astype(complex)
    vv = np.diag([0, 0, 1.0, 0]).astype(complex)
    assert dense_trace_distance(hh, vv) == pytest.approx(1.0)


def test_trace_distance_dimension_check(rng, g32):
    with pytest.raises(IncompatibleStatesError):
        dense_trace_distance(np.eye(4) / 4, np.eye(2) / 2)


def test_dense_state_check():
    g = FrequencyGrid([0.0], [1.0], 2000.0)
    with pytest.raises(InvalidParameterError):
        DenseJointState(np.diag([1.5, -0.5]).astype(complex), g).check()


def test_adaptive_quad_examples():
    spec = lab_spectrum()
    one, err = adaptive_quad(lambda x: np.ones_like(x), spec, abs_tol=1e-12)
    assert one == pytest.approx(1.0, abs=1e-12) and err <= 1e-12
    t = 1 / spec.delta_omega
    val, _ = adaptive_quad(lambda x: np.exp(1j * x * t), spec, period=np.pi / t)
    assert abs(val - lorentz_coherence(t)) <= 1e-10


def test_adaptive_quad_fig4_value_two_tolerances():
    spec = lab_spectrum()
    t = 35.92 * 0.179 / 0.299792458
    f = lambda x: np.abs(np.sin(x * t))  # noqa: E731
    kw = dict(period=np.pi / t, tail_mean=2 / np.pi)
    lo, _ = adaptive_quad(f, spec, abs_tol=1e-7, **kw)
    hi, _ = adaptive_quad(f, spec, abs_tol=1e-11, **kw)
    assert abs(lo - hi) <= 1e-7
    assert hi == pytest.approx(total_trace_norm(t), abs=1e-11)


def test_equivalence_suite_passes():
    results = run_equivalence_suite()
    assert len(results) == 18
    for r in results:
        assert r.passed, (r.name, r.deviation)


def test_equivalence_suite_corrupted_tolerance():
    assert not any(r.passed for r in run_equivalence_suite(sizes=(8,), tolerance_scale=-1.0))
