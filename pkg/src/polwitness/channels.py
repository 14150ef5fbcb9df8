"""Maps acting on joint polarization-frequency states.

Every unitary here is a frequency-controlled phase: in a polarization basis
``{|u>, |u_perp>}`` the ``|u_perp>`` branch of bin ``i`` acquires ``exp(-i phi_i)``
with ``phi_i = omega_i * T`` (full carrier) or ``(omega_i - omega0) * T``
(rotating frame).  The birefringent crystal, the fiber and the Michelson delay are
all of this form and differ only in basis and delay.
"""
import math
from dataclasses import dataclass

import numpy as np
from scipy.stats import unitary_group

from .errors import GridResolutionError, InvalidParameterError
from .states import H, JointBlockState, dagger, projector
from .units import crystal_time

ROTATING = "rotating"
FULL_CARRIER = "full"

#: largest phase step (rad) allowed between neighbouring bins for the fiber map
FIBER_PHASE_STEP = 0.2


@dataclass(frozen=True)
class PreparationParams:
    """Alice's preparation: polarizer coherence ``d``, phase ``phi`` and crystal.

    The crystal delay ``t`` (ps) may be given directly or through
    ``length_mm`` and ``birefringence`` (``t = L dn / c``).
    """

    d: float = 0.5
    phi: float = 0.0
    t: float = None
    length_mm: float = None
    birefringence: float = None

    def __post_init__(self):
        if not (0.0 <= self.d <= 0.5):
            raise InvalidParameterError(f"d must lie in [0, 1/2], got {self.d}")
        if not math.isfinite(self.phi):
            raise InvalidParameterError("phi must be finite")
        from_crystal = None
        if self.length_mm is not None or self.birefringence is not None:
            if self.length_mm is None or self.birefringence is None:
                raise InvalidParameterError("give both length_mm and birefringence")
            if self.length_mm < 0:
                raise InvalidParameterError("crystal length must be non-negative")
            from_crystal = crystal_time(self.length_mm, self.birefringence)
        if self.t is None:
            object.__setattr__(self, "t", 0.0 if from_crystal is None else from_crystal)
        elif from_crystal is not None and abs(self.t - from_crystal) > 1e-9 * max(1.0, abs(self.t)):
            raise InvalidParameterError(
                f"t = {self.t} ps is inconsistent with L*dn/c = {from_crystal} ps")
        if not math.isfinite(self.t):
            raise InvalidParameterError("t must be finite")


@dataclass(frozen=True)
class BasisSpec:
    """Orthonormal polarization basis ``{|u>, |u_perp>}`` given by ``|u>``."""

    vector: np.ndarray
    label: str = "custom"
    angle: float = None

    def __post_init__(self):
        v = np.array(self.vector, dtype=complex).reshape(2)
        if abs(np.linalg.norm(v) - 1) > 1e-12:
            raise InvalidParameterError("basis vector must be normalized")
        v.setflags(write=False)
        object.__setattr__(self, "vector", v)

    @property
    def perp(self):
        a, b = self.vector
        return np.array([-np.conj(b), np.conj(a)])

    @property
    def matrix(self):
        """Unitary whose columns are ``|u>`` and ``|u_perp>``."""
        return np.column_stack([self.vector, self.perp])

    @classmethod
    def hv(cls):
        return cls(H, "HV", 0.0)

    @classmethod
    def eta(cls, angle):
        """Half-wave-plate basis ``|eta> = (cos eta, sin eta)``."""
        return cls(np.array([math.cos(angle), math.sin(angle)]), "eta", float(angle))

    @classmethod
    def custom(cls, vector):
        v = np.asarray(vector, dtype=complex)
        return cls(v / np.linalg.norm(v), "custom")


@dataclass(frozen=True)
class RotationRecord:
    """Local unitary applied by Alice to hide her eigenbasis."""

    matrix: np.ndarray
    seed: object = None
    mode: str = "hwp"
    angle: float = None

    def to_dict(self):
        m = np.asarray(self.matrix)
        return {"mode": self.mode, "seed": self.seed, "angle": self.angle,
                "matrix_real": m.real.tolist(), "matrix_imag": m.imag.tolist()}


def prepare_pre_initial(params, grid):
    """Product state ``rho_0 (x) rho_E`` behind the 45-degree polarizer.

    ``rho_0 = [[1/2, d e^{i phi}], [d e^{-i phi}, 1/2]]`` in every frequency bin.
    """
    off = params.d * np.exp(1j * params.phi)
    rho0 = np.array([[0.5, off], [np.conj(off), 0.5]], dtype=complex)
    return JointBlockState(grid, np.broadcast_to(rho0, (grid.n, 2, 2)))


def branch_phases(grid, T, carrier=ROTATING):
    """Per-bin phase ``phi_i`` (reduced mod 2 pi) applied to the ``|u_perp>`` branch."""
    if carrier == ROTATING:
        phases = grid.detuning * T
    elif carrier == FULL_CARRIER:
        carrier_phase = math.fmod(grid.omega0 * T, 2 * math.pi)
        phases = carrier_phase + grid.detuning * T
    else:
        raise InvalidParameterError(f"unknown carrier mode {carrier!r}")
    return np.mod(phases, 2 * np.pi)


def controlled_phase_unitaries(grid, basis, T, carrier=ROTATING):
    """Stack of per-bin unitaries ``|u><u| + exp(-i phi_i) |u_perp><u_perp|``."""
    phases = branch_phases(grid, T, carrier)
    pu = projector(basis.vector)
    pp = projector(basis.perp)
    return pu[None] + np.exp(-1j * phases)[:, None, None] * pp[None]


def apply_controlled_phase(state, basis, T, carrier=ROTATING):
    """Conjugate every block by its frequency-controlled phase unitary."""
    if T == 0:
        return state
    u = controlled_phase_unitaries(state.grid, basis, T, carrier)
    return state.with_blocks(u @ state.blocks @ dagger(u))


def apply_local_unitary(state, unitary):
    """Apply the same polarization unitary ``U (x) I`` to every block."""
    u = np.asarray(unitary, dtype=complex)
    return state.with_blocks(u @ state.blocks @ u.conj().T)


def dephase_exact(state, basis):
    """Projective dephasing ``P B P + Q B Q`` in the basis ``{|u>, |u_perp>}``."""
    p = projector(basis.vector)
    q = projector(basis.perp)
    b = state.blocks
    return state.with_blocks(p @ b @ p + q @ b @ q)


def dephase_fiber(state, basis, s, max_phase_step=FIBER_PHASE_STEP):
    """Dephasing by a polarization-maintaining fiber of differential delay ``s`` (ps).

    The fiber is the unitary ``exp(-i omega s)`` on ``|u_perp>`` with full carrier
    phases; averaging over many bins then suppresses cross-basis coherence.

    :raises GridResolutionError: if neighbouring bins differ in phase by more
        than ``max_phase_step`` rad.
    """
    step = state.grid.max_spacing() * abs(s)
    if step > max_phase_step:
        needed = max_phase_step / abs(s)
        raise GridResolutionError(
            f"fiber delay {s:g} ps needs bin width <= {needed:.4g} rad/ps, "
            f"grid has {state.grid.max_spacing():.4g} rad/ps")
    return apply_controlled_phase(state, basis, s, carrier=FULL_CARRIER)


def half_wave_plate(angle):
    """Jones matrix of a half-wave plate with fast axis at ``angle`` to H."""
    c, s = math.cos(2 * angle), math.sin(2 * angle)
    return np.array([[c, s], [s, -c]], dtype=complex)


def random_rotation(state, seed=None, mode="hwp"):
    """Hide the state's local eigenbasis behind a random polarization rotation.

    ``mode`` is ``"hwp"`` (half-wave plate at a uniform angle in [0, pi)),
    ``"haar"`` (Haar-random 2x2 unitary) or ``"identity"``.
    Output is fully determined by ``seed``.
    """
    rng = np.random.default_rng(seed)
    angle = None
    if mode == "hwp":
        angle = float(rng.uniform(0.0, math.pi))
        u = half_wave_plate(angle)
    elif mode == "haar":
        u = unitary_group.rvs(2, random_state=rng)
    elif mode == "identity":
        u = np.eye(2, dtype=complex)
    else:
        raise InvalidParameterError(f"unknown rotation mode {mode!r}")
    record = RotationRecord(u, seed, mode, angle)
    return apply_local_unitary(state, u), record
