"""Characterization of the photon source from Michelson-interferometer scans.

The visibility of a Lorentzian line at arm displacement ``x`` is
``exp(-delta_omega |2 (x - x0) / c|)``; the calcite shifts the centre ``x0`` by
``L dn / 2``.
"""
from dataclasses import dataclass

import numpy as np
from scipy.optimize import curve_fit

from .errors import FitFailure, InvalidParameterError
from .units import C_MM_PER_PS


@dataclass(frozen=True)
class VisibilityTrace:
    """Visibility samples versus mirror displacement ``x_mm``."""

    x_mm: np.ndarray
    visibility: np.ndarray
    sigma: np.ndarray = None

    def __post_init__(self):
        x = np.asarray(self.x_mm, dtype=float)
        v = np.asarray(self.visibility, dtype=float)
        if x.ndim != 1 or x.shape != v.shape:
            raise InvalidParameterError("x_mm and visibility must be equal-length 1-d arrays")
        if not np.all(np.isfinite(x)):
            raise InvalidParameterError("x_mm must be finite")
        object.__setattr__(self, "x_mm", x)
        object.__setattr__(self, "visibility", v)
        if self.sigma is not None:
            s = np.broadcast_to(np.asarray(self.sigma, dtype=float), x.shape).copy()
            object.__setattr__(self, "sigma", s)


def visibility_model(x_mm, delta_omega, x0_mm=0.0, amplitude=1.0):
    return amplitude * np.exp(-delta_omega * np.abs(2 * (x_mm - x0_mm) / C_MM_PER_PS))


def synthesize_visibility(delta_omega, x_mm, sigma=0.0, seed=None, x0_mm=0.0):
    """Synthetic scan with additive Gaussian noise of width ``sigma``, clipped at 0."""
    if not delta_omega > 0:
        raise InvalidParameterError("delta_omega must be positive")
    x = np.asarray(x_mm, dtype=float)
    v = visibility_model(x, delta_omega, x0_mm)
    if sigma > 0:
        v = v + np.random.default_rng(seed).normal(0.0, sigma, size=x.shape)
    v = np.clip(v, 0.0, None)
    return VisibilityTrace(x, v, None if sigma == 0 else np.full(x.shape, float(sigma)))


@dataclass(frozen=True)
class LinewidthFit:
    """Fitted envelope parameters with one-sigma errors from the covariance."""

    linewidth_ps: float
    linewidth_err: float
    delta_omega: float
    x0_mm: float
    amplitude: float

    def __iter__(self):
        # unpacks as (1/delta_omega, standard error)
        return iter((self.linewidth_ps, self.linewidth_err))


def fit_linewidth(trace, min_decays=2.0):
    """Fit ``A exp(-dw |2(x - x0)/c|)`` and return the linewidth ``1/dw`` in ps.

    Needs at least 8 samples covering ``min_decays`` decay constants of the
    fitted envelope.

    :raises FitFailure: too few points, too short a scan, or no decay.
    """
    x, v = trace.x_mm, trace.visibility
    if x.size < 8:
        raise FitFailure(f"need at least 8 samples, got {x.size}")
    span_ps = 2 * np.ptp(x) / C_MM_PER_PS
    if span_ps == 0:
        raise FitFailure("all samples at the same delay")
    peak = int(np.argmax(v))
    area = np.trapezoid(v[np.argsort(x)], np.sort(x))
    amp0 = max(float(v[peak]), 1e-3)
    # int exp(-dw |2x/c|) dx = c / dw
    dw0 = C_MM_PER_PS * amp0 / area if area > 0 else 1.0 / span_ps
    p0 = [dw0, float(x[peak]), amp0]
    bounds = ([0.0, x.min(), 0.0], [np.inf, x.max(), 1.0])
    p0[2] = min(p0[2], 1.0)
    try:
        popt, pcov = curve_fit(visibility_model, x, v, p0=p0, sigma=trace.sigma,
                               absolute_sigma=trace.sigma is not None, bounds=bounds,
                               max_nfev=10000, xtol=1e-15, ftol=1e-15, gtol=1e-15)
    except (RuntimeError, ValueError) as exc:
        raise FitFailure(f"linewidth fit did not converge: {exc}") from exc
    dw, x0, amp = popt
    if not (dw > 0 and np.all(np.isfinite(pcov))):
        raise FitFailure("fit found no decay in the visibility")
    if span_ps * dw < min_decays:
        raise FitFailure(
            f"scan covers {span_ps * dw:.3g} decay constants, need {min_decays}")
    err_dw = float(np.sqrt(pcov[0, 0]))
    return LinewidthFit(1.0 / dw, err_dw / dw ** 2, float(dw), float(x0), float(amp))


def envelope_shift(length_mm, birefringence):
    """Mirror shift (mm) that compensates the crystal delay ``L dn / c``."""
    return length_mm * birefringence / 2.0


def estimate_birefringence(x_shift_mm, length_mm):
    """Birefringence ``2 x_shift / L`` from the displacement of the zero delay."""
    if not length_mm > 0:
        raise InvalidParameterError(f"crystal length must be positive, got {length_mm}")
    return 2.0 * x_shift_mm / length_mm
