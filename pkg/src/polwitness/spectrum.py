"""Environment spectra: analytic line shapes, discretized frequency grids and the
coherence / correlation integrals built on them.

Frequencies are angular, in rad/ps; times in ps.  Grids store the detuning
``x = omega - omega0`` separately from the carrier so that phases stay accurate.
"""
import math
import warnings
from dataclasses import dataclass, field

import numpy as np

from .errors import InvalidParameterError
from .quadrature import lorentzian_quad

LORENTZIAN = "lorentzian"
TABULATED = "tabulated"


def _readonly(a, dtype=float):
    a = np.array(a, dtype=dtype)
    a.setflags(write=False)
    return a


def _check_positive(name, value):
    if not (isinstance(value, (int, float, np.floating, np.integer))
            and math.isfinite(value) and value > 0):
        raise InvalidParameterError(f"{name} must be positive and finite, got {value!r}")


@dataclass(frozen=True)
class SpectralDensity:
    """Normalized frequency distribution ``G(omega)`` of the photon.

    For ``shape == "lorentzian"`` only ``omega0`` and ``delta_omega`` (half-width at
    half maximum) are used.  A tabulated density carries its own ``omegas`` and
    probability ``weights``; no symmetry is assumed for it.
    """

    shape: str
    omega0: float
    delta_omega: float = None
    omegas: np.ndarray = field(default=None, repr=False, compare=False)
    weights: np.ndarray = field(default=None, repr=False, compare=False)

    def __call__(self, omega):
        if self.shape != LORENTZIAN:
            raise TypeError("a tabulated spectrum has no continuous density")
        x = np.asarray(omega, dtype=float) - self.omega0
        return self.delta_omega / np.pi / (self.delta_omega ** 2 + x ** 2)

    @property
    def linewidth(self):
        """``1 / delta_omega`` in ps."""
        return 1.0 / self.delta_omega


def make_lorentzian(omega0, delta_omega):
    """Lorentzian line of centre ``omega0`` and half-width ``delta_omega`` (rad/ps)."""
    _check_positive("omega0", omega0)
    _check_positive("delta_omega", delta_omega)
    if omega0 < 100.0 * delta_omega:
        warnings.warn(
            f"omega0 = {omega0:g} is not much larger than delta_omega = {delta_omega:g}; "
            "negative-frequency tail is not negligible", stacklevel=2)
    return SpectralDensity(LORENTZIAN, float(omega0), float(delta_omega))


def make_tabulated(omegas, weights, omega0=None):
    """Spectrum given directly as discrete frequencies and probability masses.

    ``omega0`` defaults to the mean frequency.
    """
    omegas = np.asarray(omegas, dtype=float)
    weights = np.asarray(weights, dtype=float)
    if omegas.ndim != 1 or omegas.shape != weights.shape or omegas.size == 0:
        raise InvalidParameterError("omegas and weights must be equal-length 1-d arrays")
    if np.any(weights < 0) or not np.all(np.isfinite(weights)) or weights.sum() <= 0:
        raise InvalidParameterError("weights must be finite, non-negative and not all zero")
    if np.any(np.diff(omegas) <= 0):
        raise InvalidParameterError("omegas must be strictly increasing")
    weights = weights / weights.sum()
    if omega0 is None:
        omega0 = float(omegas @ weights)
    _check_positive("omega0", omega0)
    return SpectralDensity(TABULATED, float(omega0), None,
                           _readonly(omegas), _readonly(weights))


# -- discretization ---------------------------------------------------------

@dataclass(frozen=True)
class UniformTruncated:
    """Equally spaced bins over ``omega0 +/- span_kappa * delta_omega``."""
    span_kappa: float = 100.0
    n_bins: int = 4096


@dataclass(frozen=True)
class Quantile:
    """Bins of equal probability mass ``1 / n_bins``."""
    n_bins: int = 4096


@dataclass(frozen=True, eq=False)
class FrequencyGrid:
    """Discrete frequencies ``omega0 + detuning[i]`` with probability ``weight[i]``."""

    detuning: np.ndarray
    weight: np.ndarray
    omega0: float
    scheme: object = None
    source: SpectralDensity = None

    def __post_init__(self):
        det = _readonly(self.detuning)
        w = _readonly(self.weight)
        if det.ndim != 1 or det.shape != w.shape or det.size == 0:
            raise InvalidParameterError("detuning and weight must be equal-length 1-d arrays")
        if np.any(w < 0) or abs(w.sum() - 1.0) > 1e-12:
            raise InvalidParameterError("weights must be non-negative and sum to 1")
        if np.any(np.diff(det) <= 0):
            raise InvalidParameterError("frequencies must be strictly increasing")
        object.__setattr__(self, "detuning", det)
        object.__setattr__(self, "weight", w)

    @property
    def omega(self):
        return self.omega0 + self.detuning

    @property
    def n(self):
        return self.detuning.size

    def __len__(self):
        return self.detuning.size

    def same_as(self, other):
        """True when both grids describe the same frequencies and weights."""
        return self is other or (
            self.omega0 == other.omega0
            and np.array_equal(self.detuning, other.detuning)
            and np.array_equal(self.weight, other.weight))

    def max_spacing(self):
        if self.n < 2:
            return 0.0
        return float(np.max(np.diff(self.detuning)))


def _normalized(w):
    w = np.asarray(w, dtype=float)
    w = w / w.sum()
    # one more pass pins the sum to 1 to the last ulp in most cases
    return w / math.fsum(w)


def _lorentzian_quantile_points(delta_omega, n):
    u = np.arange(n + 1) / n
    edges = delta_omega * np.tan(np.pi * (u - 0.5))  # +/- inf at the ends
    # int x G(x) dx = (delta_omega / 2 pi) log(delta_omega^2 + x^2)
    antideriv = delta_omega / (2 * np.pi) * np.log(delta_omega ** 2 + edges[1:-1] ** 2)
    x = np.empty(n)
    x[1:-1] = n * np.diff(antideriv)
    # the two outermost bins have no finite centroid; use their median
    x[-1] = delta_omega * np.tan(np.pi * (0.5 - 0.5 / n))
    x[0] = -x[-1]
    return x


def discretize(spec, scheme=None):
    """Represent ``spec`` by a finite set of frequency bins.

    ``Quantile`` (the default) gives every bin mass ``1/N`` and puts its point at the
    bin's mass centroid.  ``UniformTruncated`` uses equal spacing on
    ``[-kappa*dw, kappa*dw]`` with midpoint weights, renormalized to 1.
    A tabulated spectrum is returned as-is.
    """
    if spec.shape == TABULATED:
        return FrequencyGrid(spec.omegas - spec.omega0, spec.weights, spec.omega0,
                             scheme=None, source=spec)
    scheme = Quantile() if scheme is None else scheme
    dw = spec.delta_omega
    if isinstance(scheme, Quantile):
        if scheme.n_bins < 64:
            raise InvalidParameterError(f"need at least 64 bins, got {scheme.n_bins}")
        x = _lorentzian_quantile_points(dw, scheme.n_bins)
        w = np.full(scheme.n_bins, 1.0 / scheme.n_bins)
    elif isinstance(scheme, UniformTruncated):
        if scheme.n_bins < 64:
            raise InvalidParameterError(f"need at least 64 bins, got {scheme.n_bins}")
        if scheme.span_kappa < 10:
            raise InvalidParameterError(f"span_kappa must be >= 10, got {scheme.span_kappa}")
        half_span = scheme.span_kappa * dw
        h = 2 * half_span / scheme.n_bins
        x = -half_span + h * (np.arange(scheme.n_bins) + 0.5)
        w = _normalized(h * spec(spec.omega0 + x))
    else:
        raise InvalidParameterError(f"unknown discretization scheme {scheme!r}")
    return FrequencyGrid(x, w, spec.omega0, scheme=scheme, source=spec)


def uniform_for_delay(spec, delay, max_phase_step=0.2, span_kappa=100.0):
    """Smallest ``UniformTruncated`` grid resolving phases ``exp(-i omega delay)``."""
    n = math.ceil(2 * span_kappa * spec.delta_omega * abs(delay) / max_phase_step) + 1
    return discretize(spec, UniformTruncated(span_kappa, max(n, 64)))


# -- coherence and correlation integrals -------------------------------------

def coherence(spec_or_grid, t):
    """Coherence function ``C(t) = sum_i w_i exp(i (omega_i - omega0) t)``.

    For a Lorentzian descriptor this is exactly ``exp(-delta_omega |t|)``.
    ``t`` may be an array.
    """
    t_arr = np.asarray(t, dtype=float)
    if not np.all(np.isfinite(t_arr)):
        raise InvalidParameterError("t must be finite")
    if isinstance(spec_or_grid, SpectralDensity):
        if spec_or_grid.shape == LORENTZIAN:
            out = np.exp(-spec_or_grid.delta_omega * np.abs(t_arr)).astype(complex)
            return out if out.ndim else complex(out)
        spec_or_grid = discretize(spec_or_grid)
    grid = spec_or_grid
    phases = np.multiply.outer(t_arr, grid.detuning)
    out = np.exp(1j * phases) @ grid.weight
    return out if out.ndim else complex(out)


def quad_correlation_integral(spec, t, d, abs_tol=1e-8):
    """Total correlation ``2 d int G(omega) |sin((omega - omega0) t)| d omega``.

    This is the trace norm of ``rho_SE - rho'_SE`` for the crystal-prepared state.
    Lorentzian spectra go through adaptive quadrature; tabulated spectra are summed.

    :raises NumericFailure: when quadrature misses ``abs_tol``.
    """
    if not 0.0 <= d <= 0.5:
        raise InvalidParameterError(f"d must lie in [0, 1/2], got {d}")
    if not math.isfinite(t):
        raise InvalidParameterError("t must be finite")
    if t == 0 or d == 0:
        return 0.0
    if spec.shape == TABULATED:
        x = spec.omegas - spec.omega0
        return float(2 * d * (spec.weights @ np.abs(np.sin(x * t))))
    if spec.delta_omega * abs(t) < 1e-200:
        # the integral is of order dw|t| log(1/(dw|t|)), far below any tolerance
        return 0.0
    value, _ = lorentzian_quad(lambda x: np.abs(np.sin(x * t)), spec.delta_omega,
                               abs_tol=abs_tol / (2 * d), period=np.pi / abs(t),
                               tail_mean=2.0 / np.pi)
    return float(2 * d * value)
