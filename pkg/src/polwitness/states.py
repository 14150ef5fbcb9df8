"""Qubit and frequency-block-diagonal joint density operators.

A joint state of polarization and frequency is stored as
``sum_i w_i B_i (x) |omega_i><omega_i|``: one 2x2 block per frequency bin together
with the bin's probability ``w_i`` taken from its :class:`FrequencyGrid`.
Qubit densities are plain 2x2 complex arrays in the ``{|H>, |V>}`` basis.
"""
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .errors import IncompatibleStatesError, InvalidParameterError

H = np.array([1.0, 0.0], dtype=complex)
V = np.array([0.0, 1.0], dtype=complex)

DEGENERACY_GAP = 1e-10


def dagger(m):
    return np.conj(np.swapaxes(m, -1, -2))


def check_qubit_density(rho, atol=1e-12):
    """Return ``rho`` as a 2x2 complex array, raising if it is not a density matrix."""
    rho = np.asarray(rho, dtype=complex)
    if rho.shape != (2, 2):
        raise InvalidParameterError(f"expected a 2x2 matrix, got shape {rho.shape}")
    if np.max(np.abs(rho - rho.conj().T)) > atol:
        raise InvalidParameterError("density matrix is not Hermitian")
    if abs(np.trace(rho) - 1) > atol:
        raise InvalidParameterError(f"trace is {np.trace(rho).real:.15g}, expected 1")
    if np.linalg.eigvalsh(rho)[0] < -atol:
        raise InvalidParameterError("density matrix has a negative eigenvalue")
    return rho


def projector(vec):
    vec = np.asarray(vec, dtype=complex)
    return np.outer(vec, vec.conj())


@dataclass(frozen=True, eq=False)
class JointBlockState:
    """Polarization-frequency state diagonal in frequency.

    ``blocks`` has shape ``(N, 2, 2)``; each block is a unit-trace polarization
    density, and the state is ``sum_i grid.weight[i] * blocks[i] (x) |omega_i><omega_i|``.
    """

    grid: object
    blocks: np.ndarray

    def __post_init__(self):
        b = np.array(self.blocks, dtype=complex)
        if b.shape != (self.grid.n, 2, 2):
            raise InvalidParameterError(
                f"expected {self.grid.n} blocks of shape 2x2, got array of shape {b.shape}")
        b.setflags(write=False)
        object.__setattr__(self, "blocks", b)

    def validate(self, atol=1e-10):
        """Raise unless every block is Hermitian, PSD and of unit trace."""
        b = self.blocks
        if np.max(np.abs(b - dagger(b)), initial=0.0) > atol:
            raise InvalidParameterError("a frequency block is not Hermitian")
        traces = np.trace(b, axis1=1, axis2=2)
        if np.max(np.abs(traces - 1)) > atol:
            raise InvalidParameterError("a frequency block does not have unit trace")
        if np.min(np.linalg.eigvalsh(b)) < -atol:
            raise InvalidParameterError("a frequency block has a negative eigenvalue")
        return self

    def with_blocks(self, blocks):
        return JointBlockState(self.grid, blocks)


def product_state(rho0, grid):
    """``rho0 (x) rho_E`` where ``rho_E`` is the diagonal state of ``grid``."""
    rho0 = check_qubit_density(rho0)
    return JointBlockState(grid, np.broadcast_to(rho0, (grid.n, 2, 2)))


def reduce_system(state):
    """Polarization state ``Tr_E rho_SE = sum_i w_i B_i``."""
    return np.einsum("i,ijk->jk", state.grid.weight, state.blocks)


def reduce_environment(state):
    """Frequency populations ``w_i Tr B_i``."""
    return state.grid.weight * np.trace(state.blocks, axis1=1, axis2=2).real


def _trace_norms(m):
    # Hermitian stack (..., 2, 2)
    return np.sum(np.abs(np.linalg.eigvalsh(m)), axis=-1)


def trace_distance_qubit(a, b):
    """Trace distance ``1/2 Tr|a - b|`` between two qubit states, in [0, 1]."""
    diff = np.asarray(a, dtype=complex) - np.asarray(b, dtype=complex)
    return 0.5 * float(_trace_norms(0.5 * (diff + dagger(diff))))


def _require_same_grid(a, b):
    if not a.grid.same_as(b.grid):
        raise IncompatibleStatesError("states are defined on different frequency grids")


def trace_distance_joint(a, b):
    """Trace distance ``1/2 Tr|a - b|`` of two joint states on a common grid.

    Both states are block-diagonal in frequency, so the trace norm is the
    weighted sum of the 2x2 block trace norms.
    """
    _require_same_grid(a, b)
    diff = a.blocks - b.blocks
    return 0.5 * float(a.grid.weight @ _trace_norms(0.5 * (diff + dagger(diff))))


class EigenDecomposition(NamedTuple):
    """Eigenvalues in descending order and the matching orthonormal vectors.

    ``vectors[:, k]`` belongs to ``eigenvalues[k]``.
    """
    eigenvalues: np.ndarray
    vectors: np.ndarray
    degenerate: bool

    @property
    def top(self):
        return self.vectors[:, 0]

    @property
    def bottom(self):
        return self.vectors[:, 1]


def _fix_phase(vec):
    k = np.flatnonzero(np.abs(vec) > 1e-14)[0]
    return vec * (abs(vec[k]) / vec[k])


def qubit_eigenbasis(rho):
    """Diagonalize a qubit density.

    Each eigenvector is normalized so that its first nonzero entry is real and
    positive.  If the eigenvalues differ by less than 1e-10 the canonical
    ``{|H>, |V>}`` basis is returned and ``degenerate`` is set.
    """
    rho = check_qubit_density(rho, atol=1e-10)
    herm = 0.5 * (rho + rho.conj().T)
    vals, vecs = np.linalg.eigh(herm)
    vals = vals[::-1].copy()
    if vals[0] - vals[1] < DEGENERACY_GAP:
        mean = 0.5 * (vals[0] + vals[1])
        return EigenDecomposition(np.array([mean, mean]), np.eye(2, dtype=complex), True)
    vecs = np.column_stack([_fix_phase(vecs[:, 1]), _fix_phase(vecs[:, 0])])
    return EigenDecomposition(vals, vecs, False)
