"""Local detection of polarization-frequency correlations.

Alice prepares ``rho_SE`` (polarizer, birefringent crystal, hiding rotation).  Bob
builds the dephased reference ``rho'_SE`` from the eigenbasis of the reduced
state, sends both through the Michelson delay ``U(eta, tau)`` and compares the
reduced polarization states.

Distances reported in this module are trace norms ``||A||_1 = Tr|A|`` of state
differences, the scale on which the closed forms below are written:
``Delta(tau) = ||rho_S(tau) - rho'_S(tau)||_1`` and ``delta = ||rho_SE - rho'_SE||_1``.
They equal twice the trace distances returned by :mod:`polwitness.states`.
"""
import math
import warnings
from dataclasses import dataclass, field, replace

import numpy as np
from scipy.optimize import least_squares

from .channels import (ROTATING, BasisSpec, FULL_CARRIER, apply_controlled_phase,
                       branch_phases, dephase_exact, dephase_fiber,
                       prepare_pre_initial, random_rotation)
from .errors import (DegenerateBasisWarning, FitFallbackWarning, IncompatibleStatesError,
                     InvalidParameterError)
from .quadrature import lorentzian_quad
from .spectrum import TABULATED
from .states import (EigenDecomposition, dagger, qubit_eigenbasis, reduce_system,
                     trace_distance_joint)
from .tomography import reconstruct, simulate_counts
from .units import delay_to_mirror

EXPERIMENT_ETA_STEPS = 8
EXPERIMENT_TAU_STEPS = 24

#: curves whose largest sample is below this are rounding noise around zero
ZERO_CURVE = 1e-12


@dataclass(frozen=True)
class DelaySweep:
    """Half-wave-plate angles ``etas`` (rad) and Michelson delays ``taus`` (ps)."""

    etas: np.ndarray
    taus: np.ndarray

    def __post_init__(self):
        etas = np.atleast_1d(np.asarray(self.etas, dtype=float))
        taus = np.atleast_1d(np.asarray(self.taus, dtype=float))
        if not (np.all(np.isfinite(etas)) and np.all(np.isfinite(taus))):
            raise InvalidParameterError("sweep values must be finite")
        if np.any(etas < 0) or np.any(etas >= np.pi):
            raise InvalidParameterError("eta angles must lie in [0, pi)")
        if np.any(np.diff(taus) < 0):
            raise InvalidParameterError("taus must be sorted")
        etas.setflags(write=False)
        taus.setflags(write=False)
        object.__setattr__(self, "etas", etas)
        object.__setattr__(self, "taus", taus)

    @property
    def x_mm(self):
        """Mirror displacement ``c tau / 2`` for each delay."""
        return delay_to_mirror(self.taus)

    @property
    def shape(self):
        return (self.etas.size, self.taus.size)


def experiment_sweep(delta_omega):
    """``eta = m pi/16`` (m = 0..7) and ``tau = (n - 12) / (2 delta_omega)`` (n = 0..23)."""
    etas = np.arange(EXPERIMENT_ETA_STEPS) * np.pi / 16
    taus = (np.arange(EXPERIMENT_TAU_STEPS) - 12) / (2 * delta_omega)
    return DelaySweep(etas, taus)


def dense_sweep(delta_omega, etas=(0.0,), n_points=481, span=6.0):
    """``n_points`` delays evenly covering ``[-span/delta_omega, span/delta_omega]``."""
    taus = np.linspace(-span / delta_omega, span / delta_omega, n_points)
    return DelaySweep(np.asarray(etas, dtype=float), taus)


@dataclass(frozen=True)
class CurveFit:
    """Least-squares fit of the Lorentzian local-distance curve."""

    t_hat: float
    d_hat: float
    residual: float
    witness: float
    converged: bool = True


@dataclass(frozen=True, eq=False)
class WitnessCurve:
    """Local distances ``values[i, j] = Delta(etas[i], taus[j])``."""

    sweep: DelaySweep
    values: np.ndarray
    fit: CurveFit = None
    metadata: dict = field(default_factory=dict)

    def __post_init__(self):
        v = np.array(self.values, dtype=float)
        if v.shape != self.sweep.shape:
            raise InvalidParameterError(
                f"values of shape {v.shape} do not match sweep {self.sweep.shape}")
        v.setflags(write=False)
        object.__setattr__(self, "values", v)

    def with_fit(self, fit):
        return replace(self, fit=fit)

    def eta_spread(self):
        """Largest difference across ``eta`` at any fixed ``tau``."""
        return float(np.max(np.ptp(self.values, axis=0)))


@dataclass(frozen=True, eq=False)
class Reference:
    """Dephased reference state and the basis it was dephased in."""

    state: object
    basis: BasisSpec
    eigen: EigenDecomposition
    degenerate: bool
    estimated_rho: np.ndarray
    dephasing: str


def prepare_alice_state(params, grid, seed=None, rotation="hwp", carrier=ROTATING):
    """Polarizer, crystal along H/V for time ``params.t``, then a hiding rotation.

    In the rotating frame the polarizer phase is taken as given (default 0).  With
    ``carrier="full"`` and no explicit phase, ``phi = -omega0 t`` so that the
    reduced state has a real coherence.

    :return: ``(state, rotation_record)``
    """
    if carrier == FULL_CARRIER and params.phi == 0.0:
        params = replace(params, phi=-math.fmod(grid.omega0 * params.t, 2 * math.pi))
    state = prepare_pre_initial(params, grid)
    state = apply_controlled_phase(state, BasisSpec.hv(), params.t, carrier)
    return random_rotation(state, seed, mode=rotation)


def build_reference(state, counts=None, seed=None, fiber_delay=None):
    """First protocol step: find the reduced-state eigenbasis and dephase in it.

    :param counts: photons per tomography setting; None uses the exact reduced state.
    :param seed: seed or Generator for the tomography counts.
    :param fiber_delay: fiber delay ``s`` in ps; None applies the ideal projective map.
    """
    rho = reduce_system(state)
    if counts is not None:
        rho = reconstruct(simulate_counts(rho, counts, seed))
    eigen = qubit_eigenbasis(rho)
    if eigen.degenerate:
        warnings.warn("reduced state is degenerate; dephasing in the H/V basis",
                      DegenerateBasisWarning, stacklevel=2)
    basis = BasisSpec(eigen.top, "eigen")
    if fiber_delay is None:
        dephased, mode = dephase_exact(state, basis), "projective"
    else:
        dephased, mode = dephase_fiber(state, basis, fiber_delay), "fiber"
    return Reference(dephased, basis, eigen, eigen.degenerate, rho, mode)


def _as_state(s):
    return s.state if isinstance(s, Reference) else s


def _require_same_grid(a, b):
    if not a.grid.same_as(b.grid):
        raise IncompatibleStatesError("state and reference live on different grids")


def evolved_reduced_states(state, sweep, carrier=ROTATING, chunk=64):
    """Reduced states ``Tr_E U(eta, tau) rho U(eta, tau)^dagger`` on the whole sweep.

    Returns an array of shape ``(n_eta, n_tau, 2, 2)``.  Equivalent to applying
    :func:`apply_controlled_phase` point by point and tracing out the frequency,
    but written in the ``eta`` basis where the delay only rephases one coherence.
    """
    grid = state.grid
    w = grid.weight
    r = np.stack([BasisSpec.eta(eta).matrix for eta in sweep.etas])  # (n_eta, 2, 2)
    rotated = dagger(r)[:, None] @ state.blocks[None] @ r[:, None]  # (n_eta, N, 2, 2)
    diag0 = rotated[..., 0, 0] @ w
    diag1 = rotated[..., 1, 1] @ w
    coh = (w * rotated[..., 0, 1]).T  # (N, n_eta)
    local = np.zeros(sweep.shape + (2, 2), dtype=complex)
    local[..., 0, 0] = diag0[:, None]
    local[..., 1, 1] = diag1[:, None]
    for start in range(0, sweep.taus.size, chunk):
        taus = sweep.taus[start:start + chunk]
        phases = np.stack([branch_phases(grid, tau, carrier) for tau in taus])
        c01 = (np.exp(1j * phases) @ coh).T  # (n_eta, chunk)
        local[:, start:start + taus.size, 0, 1] = c01
        local[:, start:start + taus.size, 1, 0] = np.conj(c01)
    return r[:, None] @ local @ dagger(r)[:, None]


def _trace_norm_stack(diff):
    herm = 0.5 * (diff + dagger(diff))
    return np.sum(np.abs(np.linalg.eigvalsh(herm)), axis=-1)


def local_distance_curve(state, reference, sweep, carrier=ROTATING, counts=None,
                         seed=None, metadata=None):
    """Second protocol step: ``Delta(eta, tau)`` for every sweep point.

    With ``counts`` set, both reduced states at every point are replaced by
    finite-count tomographic reconstructions drawn from ``seed``.
    """
    state, ref_state = _as_state(state), _as_state(reference)
    _require_same_grid(state, ref_state)
    rho = evolved_reduced_states(state, sweep, carrier)
    rho_ref = evolved_reduced_states(ref_state, sweep, carrier)
    if counts is not None:
        rng = np.random.default_rng(seed)
        rho = reconstruct(simulate_counts(rho, counts, rng))
        rho_ref = reconstruct(simulate_counts(rho_ref, counts, rng))
    meta = {"carrier": carrier, "counts": counts, "seed": seed, "n_bins": state.grid.n}
    source = state.grid.source
    if source is not None and source.delta_omega is not None:
        meta["delta_omega"] = source.delta_omega
    if isinstance(reference, Reference):
        meta["dephasing"] = reference.dephasing
        meta["degenerate"] = reference.degenerate
    meta.update(metadata or {})
    return WitnessCurve(sweep, _trace_norm_stack(rho - rho_ref), metadata=meta)


def fit_curve(curve, delta_omega=None):
    """Fit ``d |exp(-dw|t + tau|) - exp(-dw|t - tau|)|`` to all curve samples.

    ``delta_omega`` defaults to the value stored in the curve metadata.  Returns a
    :class:`CurveFit`; ``converged`` is False when the optimizer failed.
    """
    dw = curve.metadata.get("delta_omega") if delta_omega is None else delta_omega
    if dw is None or not dw > 0:
        raise InvalidParameterError("fitting needs the spectral half-width delta_omega")
    taus = np.tile(curve.sweep.taus, curve.sweep.etas.size)
    data = curve.values.ravel()
    peak = float(np.max(data))
    if peak <= ZERO_CURVE:
        return CurveFit(0.0, 0.0, 0.0, 0.0)
    t0 = abs(float(taus[np.argmax(data)]))
    t0 = max(t0, 0.1 / dw)
    d0 = min(max(peak / (1 - math.exp(-2 * dw * t0)), 1e-6), 0.5)

    def residuals(p):
        t, d = p
        return analytic_Delta_lorentzian(d, dw, t, taus) - data

    try:
        res = least_squares(residuals, [t0, d0], bounds=([0.0, 0.0], [np.inf, 0.5]),
                            method="trf", x_scale=[1 / dw, 0.1], xtol=1e-14, ftol=1e-14,
                            gtol=1e-14, max_nfev=2000)
    except (ValueError, np.linalg.LinAlgError):
        return CurveFit(t0, d0, float("nan"), peak, converged=False)
    t_hat, d_hat = (float(v) for v in res.x)
    rms = float(np.sqrt(np.mean(res.fun ** 2)))
    ok = bool(res.success) and np.all(np.isfinite(res.x))
    return CurveFit(t_hat, d_hat, rms, analytic_max_lorentzian(d_hat, dw, t_hat), ok)


def witness_max(curve, method="fit", delta_omega=None):
    """Estimate ``max_tau Delta(tau)``.

    ``method="grid"`` returns the largest sample.  ``method="fit"`` fits the
    Lorentzian closed form and returns ``d_hat (1 - exp(-2 dw t_hat))``; if the fit
    fails a :class:`FitFallbackWarning` is issued and the sample maximum returned.
    """
    grid_max = float(np.max(curve.values)) if curve.values.size else 0.0
    if method == "grid":
        return grid_max
    if method != "fit":
        raise InvalidParameterError(f"unknown method {method!r}")
    fit = fit_curve(curve, delta_omega)
    if not fit.converged:
        warnings.warn("curve fit did not converge; using the sample maximum",
                      FitFallbackWarning, stacklevel=2)
        return grid_max
    return fit.witness


def delta_total(state, reference):
    """Correlation measure ``||rho_SE - rho'_SE||_1`` of the simulated states."""
    return 2.0 * trace_distance_joint(_as_state(state), _as_state(reference))


# -- closed forms and quadrature oracles -------------------------------------

def analytic_Delta_lorentzian(d, delta_omega, t, tau):
    """``d |exp(-dw |t + tau|) - exp(-dw |t - tau|)|``; broadcasts over arrays."""
    if not delta_omega > 0:
        raise InvalidParameterError("delta_omega must be positive")
    tau = np.asarray(tau, dtype=float)
    out = d * np.abs(np.exp(-delta_omega * np.abs(t + tau))
                     - np.exp(-delta_omega * np.abs(t - tau)))
    return out if out.ndim else float(out)


def analytic_max_lorentzian(d, delta_omega, t):
    """``d (1 - exp(-2 dw t))``, the largest local distance for crystal delay ``t``."""
    if not delta_omega > 0:
        raise InvalidParameterError("delta_omega must be positive")
    t = np.asarray(t, dtype=float)
    if np.any(t < 0):
        raise InvalidParameterError("crystal delay must be non-negative")
    out = d * (1 - np.exp(-2 * delta_omega * t))
    return out if out.ndim else float(out)


def _fourier(spec, T, abs_tol):
    """``int G(x) exp(i x T) dx`` over the detuning."""
    if spec.shape == TABULATED:
        return complex(spec.weights @ np.exp(1j * (spec.omegas - spec.omega0) * T))
    if abs(T) * spec.delta_omega < 1e-200:
        return 1.0 + 0.0j
    value, _ = lorentzian_quad(lambda x: np.exp(1j * x * T), spec.delta_omega,
                               abs_tol=abs_tol, period=np.pi / abs(T))
    return complex(value)


def analytic_Delta_general(spec, d, t, tau, abs_tol=1e-8):
    """``d |int G (exp(i x t) - exp(-i x t)) exp(i omega tau) d omega|`` by quadrature.

    The carrier factor ``exp(i omega0 tau)`` has unit modulus and is dropped.
    """
    if spec.shape != TABULATED and not spec.delta_omega > 0:
        raise InvalidParameterError("spectrum needs a positive width")
    if t == 0 or d == 0:
        return 0.0
    tol = max(abs_tol / (2 * max(d, 1e-300)) / 2, 1e-12)
    diff = _fourier(spec, t + tau, tol) - _fourier(spec, tau - t, tol)
    return float(d * abs(diff))


# -- whole protocol ----------------------------------------------------------

@dataclass(frozen=True, eq=False)
class ProtocolRun:
    """Everything produced by one simulated run of the detection protocol."""

    state: object
    rotation: object
    reference: Reference
    curve: WitnessCurve
    delta: float


def simulate_protocol(params, grid, sweep, seed=None, rotation="hwp", counts=None,
                      fiber_delay=None, carrier=ROTATING):
    """Alice's preparation followed by both of Bob's steps.

    One generator seeded with ``seed`` drives the hiding rotation, the eigenbasis
    tomography and the curve tomography, in that order.
    """
    rng = np.random.default_rng(seed)
    rot_seed, tomo_seed, curve_seed = (int(s) for s in rng.integers(0, 2 ** 63, size=3))
    state, record = prepare_alice_state(params, grid, rot_seed, rotation, carrier)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", DegenerateBasisWarning)
        reference = build_reference(state, counts, tomo_seed, fiber_delay)
    curve = local_distance_curve(
        state, reference, sweep, carrier, counts, curve_seed,
        metadata={"seed": seed, "rotation": rotation, "t_ps": params.t, "d": params.d})
    return ProtocolRun(state, record, reference, curve, delta_total(state, reference))
