import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from conftest import quantile_grid
from oracles import random_density, trace_norm_2x2
from polwitness import (IncompatibleStatesError, InvalidParameterError, JointBlockState,
                        PreparationParams, apply_controlled_phase, dephase_exact,
                        prepare_pre_initial, product_state, qubit_eigenbasis,
                        reduce_environment, reduce_system, trace_distance_joint,
                        trace_distance_qubit)
from polwitness.channels import BasisSpec
from polwitness.states import H, V, check_qubit_density, projector

HH = projector(H)
VV = projector(V)
MIXED = np.eye(2) / 2


def crystal_state(grid, t, d=0.5, phi=0.0):
    pre = prepare_pre_initial(PreparationParams(d, phi, t=t), grid)
    return apply_controlled_phase(pre, BasisSpec.hv(), t)


def random_joint(rng, grid):
    blocks = np.stack([random_density(rng) for _ in range(grid.n)])
    return JointBlockState(grid, blocks)


class TestQubitDensity:
    def test_accepts_valid(self):
        check_qubit_density(HH)

    @pytest.mark.parametrize("m", [
        np.array([[0.5, 0.1], [0.2, 0.5]]),
        np.array([[0.6, 0], [0, 0.5]]),
        np.array([[1.2, 0], [0, -0.2]]),
        np.eye(3) / 3,
    ])
    def test_rejects_invalid(self, m):
        with pytest.raises(InvalidParameterError):
            check_qubit_density(m)


class TestReductions:
    def test_product_state_reduces_to_factor(self):
        g = quantile_grid(256)
        rho0 = np.array([[0.7, 0.2 - 0.1j], [0.2 + 0.1j, 0.3]])
        assert np.allclose(reduce_system(product_state(rho0, g)), rho0, rtol=0, atol=1e-14)

    def test_initial_state_coherence_is_half_c(self):
        g = quantile_grid(4096)
        t = 9.703
        rho = reduce_system(crystal_state(g, t))
        expected = 0.5 * np.sum(g.weight * np.exp(1j * g.detuning * t))
        assert rho[0, 1] == pytest.approx(expected, abs=1e-14)
        assert abs(rho[0, 1].imag) < 1e-12
        assert rho[0, 1].real == pytest.approx(0.5 * math.exp(-1), abs=1e-3)

    def test_dephasing_keeps_reduced_state(self):
        g = quantile_grid(4096)
        state = crystal_state(g, 21.447)
        basis = BasisSpec(qubit_eigenbasis(reduce_system(state)).top)
        assert np.max(np.abs(reduce_system(dephase_exact(state, basis))
                             - reduce_system(state))) <= 1e-12

    def test_environment_weights(self, rng):
        g = quantile_grid(256)
        state = random_joint(rng, g)
        w = reduce_environment(state)
        assert w.sum() == pytest.approx(1.0, abs=1e-12)
        dephased = dephase_exact(state, BasisSpec.eta(0.3))
        assert np.max(np.abs(reduce_environment(dephased) - w)) <= 1e-14

    def test_pre_initial_environment_is_uniform(self):
        g = quantile_grid(256)
        pre = prepare_pre_initial(PreparationParams(0.5), g)
        assert np.allclose(reduce_environment(pre), 1 / 256, rtol=0, atol=1e-16)

    def test_block_shape_checked(self):
        with pytest.raises(InvalidParameterError):
            JointBlockState(quantile_grid(256), np.zeros((3, 2, 2)))

    def test_validate(self, rng):
        g = quantile_grid(256)
        random_joint(rng, g).validate()
        bad = np.broadcast_to(np.diag([1.2, -0.2]).astype(complex), (256, 2, 2))
        with pytest.raises(InvalidParameterError):
            JointBlockState(g, bad).validate()


class TestTraceDistance:
    def test_identical(self):
        assert trace_distance_qubit(HH, HH) == 0

    def test_orthogonal(self):
        assert trace_distance_qubit(HH, VV) == pytest.approx(1.0, abs=1e-15)

    def test_pure_vs_mixed(self):
        assert trace_distance_qubit(HH, MIXED) == pytest.approx(0.5, abs=1e-15)

    @given(st.integers(0, 2 ** 32 - 1))
    @settings(max_examples=50, deadline=None)
    def test_matches_singular_values(self, seed):
        rng = np.random.default_rng(seed)
        a, b = random_density(rng), random_density(rng)
        assert trace_distance_qubit(a, b) == pytest.approx(0.5 * trace_norm_2x2(a - b),
                                                           abs=1e-12)

    @given(st.integers(0, 2 ** 32 - 1))
    @settings(max_examples=50, deadline=None)
    def test_metric_axioms(self, seed):
        rng = np.random.default_rng(seed)
        a, b, c = (random_density(rng) for _ in range(3))
        assert trace_distance_qubit(a, b) == pytest.approx(trace_distance_qubit(b, a), abs=1e-14)
        assert trace_distance_qubit(a, c) <= (trace_distance_qubit(a, b)
                                              + trace_distance_qubit(b, c) + 1e-12)
        assert 0 <= trace_distance_qubit(a, b) <= 1 + 1e-12

    def test_joint_identical(self, rng):
        s = random_joint(rng, quantile_grid(256))
        assert trace_distance_joint(s, s) == 0

    def test_joint_grid_mismatch(self):
        a = prepare_pre_initial(PreparationParams(0.5), quantile_grid(256))
        b = prepare_pre_initial(PreparationParams(0.5), quantile_grid(1024))
        with pytest.raises(IncompatibleStatesError):
            trace_distance_joint(a, b)

    def test_joint_no_crystal_is_zero(self):
        g = quantile_grid(256)
        s = crystal_state(g, 0.0)
        basis = BasisSpec(qubit_eigenbasis(reduce_system(s)).top)
        assert trace_distance_joint(s, dephase_exact(s, basis)) <= 1e-12

    def test_joint_is_weighted_block_sum(self, rng):
        g = quantile_grid(256)
        a, b = random_joint(rng, g), random_joint(rng, g)
        expected = 0.5 * sum(w * trace_norm_2x2(x - y)
                             for w, x, y in zip(g.weight, a.blocks, b.blocks))
        assert trace_distance_joint(a, b) == pytest.approx(expected, abs=1e-12)

    @given(st.integers(0, 2 ** 32 - 1), st.floats(-50, 50), st.floats(0, math.pi))
    @settings(max_examples=25, deadline=None)
    def test_joint_unitary_invariance(self, seed, T, eta):
        rng = np.random.default_rng(seed)
        g = quantile_grid(256)
        a, b = random_joint(rng, g), random_joint(rng, g)
        basis = BasisSpec.eta(eta % math.pi)
        ua, ub = (apply_controlled_phase(s, basis, T) for s in (a, b))
        assert trace_distance_joint(ua, ub) == pytest.approx(trace_distance_joint(a, b),
                                                             abs=1e-12)

    @given(st.integers(0, 2 ** 32 - 1))
    @settings(max_examples=25, deadline=None)
    def test_contraction_under_partial_trace(self, seed):
        rng = np.random.default_rng(seed)
        g = quantile_grid(256)
        a, b = random_joint(rng, g), random_joint(rng, g)
        assert (trace_distance_qubit(reduce_system(a), reduce_system(b))
                <= trace_distance_joint(a, b) + 1e-12)

    @given(st.integers(0, 2 ** 32 - 1))
    @settings(max_examples=20, deadline=None)
    def test_joint_triangle(self, seed):
        rng = np.random.default_rng(seed)
        g = quantile_grid(256)
        a, b, c = (random_joint(rng, g) for _ in range(3))
        assert trace_distance_joint(a, c) <= (trace_distance_joint(a, b)
                                              + trace_distance_joint(b, c) + 1e-12)


class TestEigenbasis:
    def test_crystal_reduced_state(self):
        c = math.exp(-1)
        rho = np.array([[0.5, 0.5 * c], [0.5 * c, 0.5]])
        eig = qubit_eigenbasis(rho)
        assert eig.eigenvalues[0] == pytest.approx(0.5 + 0.5 * c, abs=1e-12)
        assert eig.eigenvalues[0] == pytest.approx(0.68394, abs=1e-5)
        assert np.allclose(eig.top, np.array([1, 1]) / math.sqrt(2), atol=1e-12)
        assert np.allclose(eig.bottom, np.array([1, -1]) / math.sqrt(2), atol=1e-12)
        assert not eig.degenerate

    def test_maximally_mixed(self):
        eig = qubit_eigenbasis(MIXED)
        assert eig.degenerate
        assert np.allclose(eig.eigenvalues, 0.5)
        assert np.array_equal(eig.vectors, np.eye(2))

    def test_diagonal(self):
        eig = qubit_eigenbasis(np.diag([0.7, 0.3]))
        assert np.allclose(eig.eigenvalues, [0.7, 0.3])
        assert np.allclose(eig.top, H) and np.allclose(eig.bottom, V)

    def test_diagonal_reversed(self):
        eig = qubit_eigenbasis(np.diag([0.2, 0.8]))
        assert np.allclose(eig.top, V) and np.allclose(eig.bottom, H)

    @given(st.integers(0, 2 ** 32 - 1))
    @settings(max_examples=60, deadline=None)
    def test_reconstructs_and_conventions(self, seed):
        rho = random_density(np.random.default_rng(seed))
        eig = qubit_eigenbasis(rho)
        l0, l1 = eig.eigenvalues
        assert l0 >= l1
        assert l0 + l1 == pytest.approx(1.0, abs=1e-12)
        u = eig.vectors
        assert np.allclose(u.conj().T @ u, np.eye(2), atol=1e-12)
        if not eig.degenerate:
            rebuilt = l0 * projector(eig.top) + l1 * projector(eig.bottom)
            assert np.allclose(rebuilt, rho, atol=1e-12)
            for k in range(2):
                v = u[:, k]
                first = v[np.flatnonzero(np.abs(v) > 1e-14)[0]]
                assert abs(first.imag) < 1e-15 and first.real > 0
