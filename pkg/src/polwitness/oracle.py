"""Brute-force reference implementations used to cross-check the block path.

Joint states are embedded as full ``2N x 2N`` density matrices in the basis
``|H, omega_1> ... |H, omega_N>, |V, omega_1> ... |V, omega_N>`` and every map is
applied as a dense matrix, with no use of the frequency-diagonal structure.
"""
from dataclasses import dataclass

import numpy as np

from .channels import (ROTATING, BasisSpec, PreparationParams, apply_controlled_phase,
                       branch_phases, dephase_exact)
from .errors import IncompatibleStatesError, InvalidParameterError
from .quadrature import lorentzian_quad
from .spectrum import FrequencyGrid, make_lorentzian
from .states import JointBlockState, projector, reduce_system, trace_distance_joint
from .units import CALCITE_BIREFRINGENCE, CALCITE_LENGTH_MM, LINEWIDTH_PS, wavelength_to_omega
from .witness import build_reference, local_distance_curve, experiment_sweep, prepare_alice_state

MAX_DENSE_BINS = 256


@dataclass(frozen=True, eq=False)
class DenseJointState:
    matrix: np.ndarray
    grid: object

    def check(self, atol=1e-10):
        m = self.matrix
        if np.max(np.abs(m - m.conj().T)) > atol:
            raise InvalidParameterError("dense state is not Hermitian")
        if abs(np.trace(m) - 1) > atol:
            raise InvalidParameterError("dense state does not have unit trace")
        if np.linalg.eigvalsh(m)[0] < -atol:
            raise InvalidParameterError("dense state is not positive")
        return self


def dense_embed(state):
    """Full matrix of a block state; cross-frequency entries are zero."""
    n = state.grid.n
    if n > MAX_DENSE_BINS:
        raise InvalidParameterError(f"dense embedding limited to {MAX_DENSE_BINS} bins, got {n}")
    m = np.zeros((2, n, 2, n), dtype=complex)
    idx = np.arange(n)
    weighted = state.grid.weight[:, None, None] * state.blocks
    for a in range(2):
        for b in range(2):
            m[a, idx, b, idx] = weighted[:, a, b]
    return DenseJointState(m.reshape(2 * n, 2 * n), state.grid)


def dense_extract_blocks(dense):
    """Inverse of :func:`dense_embed` (reads only the frequency-diagonal entries)."""
    n = dense.grid.n
    m = dense.matrix.reshape(2, n, 2, n)
    idx = np.arange(n)
    blocks = np.empty((n, 2, 2), dtype=complex)
    for a in range(2):
        for b in range(2):
            blocks[:, a, b] = m[a, idx, b, idx]
    return JointBlockState(dense.grid, blocks / dense.grid.weight[:, None, None])


def dense_apply_unitary(state, unitary, atol=1e-10):
    """``U rho U^dagger`` for a full ``2N x 2N`` unitary."""
    u = np.asarray(unitary, dtype=complex)
    if u.shape != state.matrix.shape:
        raise InvalidParameterError("unitary does not match the state dimension")
    if np.max(np.abs(u @ u.conj().T - np.eye(u.shape[0]))) > atol:
        raise InvalidParameterError("matrix is not unitary")
    return DenseJointState(u @ state.matrix @ u.conj().T, state.grid)


def dense_trace_distance(a, b):
    """``1/2 Tr|a - b|`` from a full eigen-decomposition."""
    ma = a.matrix if isinstance(a, DenseJointState) else np.asarray(a)
    mb = b.matrix if isinstance(b, DenseJointState) else np.asarray(b)
    if ma.shape != mb.shape:
        raise IncompatibleStatesError(f"dimension mismatch {ma.shape} vs {mb.shape}")
    diff = ma - mb
    return 0.5 * float(np.sum(np.abs(np.linalg.eigvalsh(0.5 * (diff + diff.conj().T)))))


def local_operator(op, n):
    """``op (x) I_E`` in the dense ordering."""
    return np.kron(np.asarray(op, dtype=complex), np.eye(n))


def controlled_phase_matrix(grid, basis, T, carrier=ROTATING):
    """``|u><u| (x) I + |u_perp><u_perp| (x) diag(exp(-i phi_i))``."""
    phases = branch_phases(grid, T, carrier)
    return (np.kron(projector(basis.vector), np.eye(grid.n))
            + np.kron(projector(basis.perp), np.diag(np.exp(-1j * phases))))


def dense_dephase(state, basis):
    """``sum_mu Pi_mu rho Pi_mu`` with ``Pi_mu = |mu><mu| (x) I``."""
    n = state.grid.n
    out = np.zeros_like(state.matrix)
    for vec in (basis.vector, basis.perp):
        pi = local_operator(projector(vec), n)
        out += pi @ state.matrix @ pi
    return DenseJointState(out, state.grid)


def dense_reduce_system(state):
    n = state.grid.n
    return np.einsum("aibi->ab", state.matrix.reshape(2, n, 2, n))


def dense_local_distance(state, reference, eta, tau, carrier=ROTATING):
    """Trace norm of the reduced difference after ``U(eta, tau)``, all dense."""
    u = controlled_phase_matrix(state.grid, BasisSpec.eta(eta), tau, carrier)
    a = dense_reduce_system(dense_apply_unitary(state, u))
    b = dense_reduce_system(dense_apply_unitary(reference, u))
    return 2.0 * dense_trace_distance(a, b)


def paired_spectrum_deviation(a, b):
    """How far the spectrum of ``a - b`` is from being symmetric about zero."""
    diff = a.matrix - b.matrix
    ev = np.sort(np.linalg.eigvalsh(0.5 * (diff + diff.conj().T)))
    return float(np.max(np.abs(ev + ev[::-1])))


def adaptive_quad(f, spec, abs_tol=1e-10, period=None, tail_mean=0.0):
    """``int G(omega) f(omega - omega0) d omega`` for a Lorentzian ``spec``.

    :return: ``(value, error_estimate)``
    """
    return lorentzian_quad(f, spec.delta_omega, abs_tol=abs_tol, period=period,
                           tail_mean=tail_mean)


# -- equivalence suite -------------------------------------------------------

@dataclass(frozen=True)
class CheckResult:
    name: str
    deviation: float
    tolerance: float

    @property
    def passed(self):
        return self.deviation <= self.tolerance


def small_grid(spec, n):
    """``n`` equal-mass bins at the Lorentzian quantile midpoints."""
    u = (np.arange(n) + 0.5) / n
    x = spec.delta_omega * np.tan(np.pi * (u - 0.5))
    return FrequencyGrid(x, np.full(n, 1.0 / n), spec.omega0, source=spec)


def _small_protocol(n, seed):
    spec = make_lorentzian(wavelength_to_omega(914.0), 1.0 / LINEWIDTH_PS)
    grid = small_grid(spec, n)
    params = PreparationParams(0.5, length_mm=CALCITE_LENGTH_MM,
                               birefringence=CALCITE_BIREFRINGENCE)
    state, _ = prepare_alice_state(params, grid, seed=seed)
    return spec, grid, state, build_reference(state)


def run_equivalence_suite(sizes=(8, 32, 64), seed=0, tolerance_scale=1.0):
    """Compare dense and block computations; one :class:`CheckResult` per quantity."""
    results = []
    for n in sizes:
        spec, grid, state, ref = _small_protocol(n, seed)
        dense = dense_embed(state)
        dense_ref = dense_dephase(dense, ref.basis)

        block_ref = dense_embed(ref.state)
        results.append(CheckResult(
            f"N={n} dephasing dense vs block",
            float(np.max(np.abs(dense_ref.matrix - block_ref.matrix))), 1e-12 * tolerance_scale))

        sweep = experiment_sweep(spec.delta_omega)
        curve = local_distance_curve(state, ref, sweep)
        worst = 0.0
        for i, eta in enumerate(sweep.etas):
            for j, tau in enumerate(sweep.taus):
                worst = max(worst, abs(dense_local_distance(dense, dense_ref, eta, tau)
                                       - curve.values[i, j]))
        results.append(CheckResult(f"N={n} Delta(eta,tau) dense vs block", worst,
                                   1e-11 * tolerance_scale))

        results.append(CheckResult(f"N={n} +/- pairing of rho - rho' spectrum",
                                   paired_spectrum_deviation(dense, dense_ref),
                                   1e-12 * tolerance_scale))

        results.append(CheckResult(
            f"N={n} joint trace distance dense vs block",
            abs(dense_trace_distance(dense, dense_ref) - trace_distance_joint(state, ref.state)),
            1e-12 * tolerance_scale))

        basis = BasisSpec.eta(3 * np.pi / 16)
        tau = 1.7 / spec.delta_omega
        via_blocks = dense_embed(apply_controlled_phase(state, basis, tau))
        via_dense = dense_apply_unitary(dense, controlled_phase_matrix(grid, basis, tau))
        results.append(CheckResult(
            f"N={n} controlled phase dense vs block",
            float(np.max(np.abs(via_blocks.matrix - via_dense.matrix))), 1e-12 * tolerance_scale))

        rs = reduce_system(state)
        results.append(CheckResult(
            f"N={n} reduced states of rho and rho' coincide",
            float(np.max(np.abs(rs - reduce_system(dephase_exact(state, ref.basis))))),
            1e-12 * tolerance_scale))
    return results
