"""Simulated polarization tomography with finite photon numbers.

Three settings are measured, in this order: H/V, D/A and R/L.  Each yields a
pair of click counts ``(n_plus, n_minus)`` summing to the photons per setting.
"""
from dataclasses import dataclass

import numpy as np

from .errors import InvalidParameterError

SETTINGS = ("HV", "DA", "RL")

PAULI = np.array([
    [[0, 1], [1, 0]],
    [[0, -1j], [1j, 0]],
    [[1, 0], [0, -1]],
], dtype=complex)

# Bloch-vector component measured by each setting: z, x, y
_AXIS = (2, 0, 1)


def bloch_vector(rho):
    """Bloch vector ``(x, y, z)`` of one density matrix or a stack of them."""
    rho = np.asarray(rho, dtype=complex)
    return np.stack([2 * rho[..., 0, 1].real,
                     -2 * rho[..., 0, 1].imag,
                     (rho[..., 0, 0] - rho[..., 1, 1]).real], axis=-1)


def from_bloch(r):
    """Density matrix ``(I + r . sigma) / 2``; works on stacks of vectors."""
    r = np.asarray(r, dtype=float)
    return 0.5 * (np.eye(2) + np.tensordot(r, PAULI, axes=([-1], [0])))


@dataclass(frozen=True)
class CountRecord:
    """Click counts, shape ``(..., 3, 2)`` for the settings in :data:`SETTINGS`."""

    counts: np.ndarray
    n: int

    def __post_init__(self):
        c = np.asarray(self.counts, dtype=np.int64)
        if c.shape[-2:] != (3, 2):
            raise InvalidParameterError(f"counts must end in shape (3, 2), got {c.shape}")
        if np.any(c < 0) or np.any(c.sum(axis=-1) != self.n):
            raise InvalidParameterError("each setting's counts must be non-negative and sum to n")
        c.setflags(write=False)
        object.__setattr__(self, "counts", c)


def simulate_counts(rho, n, seed=None):
    """Binomial click statistics for each setting, for one state or a stack of states.

    The ``+`` outcome of the setting probing Bloch axis ``k`` occurs with
    probability ``(1 + r_k) / 2``.  ``seed`` may be an int or a ``numpy`` Generator.
    """
    n = int(n)
    if n < 1:
        raise InvalidParameterError(f"need at least one photon per setting, got {n}")
    rng = np.random.default_rng(seed)
    r = bloch_vector(rho)[..., _AXIS]
    p_plus = np.clip(0.5 * (1 + r), 0.0, 1.0)
    plus = rng.binomial(n, p_plus)
    return CountRecord(np.stack([plus, n - plus], axis=-1), n)


def reconstruct(counts):
    """Linear-inversion estimate, scaled back onto the Bloch ball if unphysical."""
    c = counts.counts
    r_meas = (c[..., 0] - c[..., 1]) / counts.n
    r = np.empty_like(r_meas, dtype=float)
    r[..., list(_AXIS)] = r_meas
    length = np.linalg.norm(r, axis=-1, keepdims=True)
    r = np.where(length > 1, r / np.maximum(length, 1e-300), r)
    return from_bloch(r)
