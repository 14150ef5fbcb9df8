"""Adaptive quadrature against a Lorentzian line shape.

Integrals of the form ``int G(x) f(x) dx`` over the detuning ``x = omega - omega0``
are computed in the tangent-mapped variable ``u in (-1/2, 1/2)`` with
``x = delta_omega * tan(pi * u)``.  For the Lorentzian ``G(x) dx = du`` exactly, so
the weight disappears and only ``f(x(u))`` is integrated.

Oscillatory integrands (``period`` given) are split into panels at every multiple
of the period in ``x``, which also places a panel edge on each kink of integrands
such as ``|sin(x t)|``.  Beyond a cut-off ``X`` the integrand is replaced by its
period average ``tail_mean``; the cut-off is chosen so that the second mean value
theorem bounds the neglected oscillatory part below the requested tolerance.
"""
import math

import numpy as np

from .errors import InvalidParameterError, NumericFailure

_LOW_ORDER = 8
_HIGH_ORDER = 16
_NODES_LO, _WEIGHTS_LO = np.polynomial.legendre.leggauss(_LOW_ORDER)
_NODES_HI, _WEIGHTS_HI = np.polynomial.legendre.leggauss(_HIGH_ORDER)

_CHUNK = 65536


def _panel_rule(f, delta_omega, a, b, mapped):
    """High-order estimate and error estimate on each panel ``[a, b]``.

    Panels live in the tangent variable ``u`` when ``mapped`` is true and in the
    detuning ``x`` otherwise; far-tail panels must stay in ``x`` because
    ``tan`` near its pole cannot resolve narrow ``u`` intervals in double precision.
    """
    values = np.empty(a.shape, dtype=complex)
    errors = np.empty(a.shape)
    for start in range(0, a.size, _CHUNK):
        lo = a[start:start + _CHUNK, None]
        hi = b[start:start + _CHUNK, None]
        half = 0.5 * (hi - lo)
        mid = 0.5 * (hi + lo)
        estimates = []
        for nodes, weights in ((_NODES_LO, _WEIGHTS_LO), (_NODES_HI, _WEIGHTS_HI)):
            s = mid + half * nodes
            if mapped:
                vals = np.asarray(f(delta_omega * np.tan(np.pi * s)))
            else:
                with np.errstate(over="ignore"):
                    density = 1.0 / (np.pi * delta_omega * (1.0 + (s / delta_omega) ** 2))
                vals = density * np.asarray(f(s))
            estimates.append(half[:, 0] * (vals @ weights))
        values[start:start + _CHUNK] = estimates[1]
        errors[start:start + _CHUNK] = np.abs(estimates[1] - estimates[0])
    return values, errors


def _sup_deviation(f, delta_omega, period, tail_mean):
    # sample a few periods around the centre and far out in the tail
    base = np.linspace(0.0, 4.0 * period, 257)
    probes = np.concatenate([base, -base, base + 1e3 * delta_omega, -base - 1e3 * delta_omega])
    return float(np.max(np.abs(np.asarray(f(probes)) - tail_mean)))


def lorentzian_quad(f, delta_omega, abs_tol=1e-10, period=None, tail_mean=0.0,
                    max_panels=4_000_000, max_depth=40):
    """Integrate ``f`` against a unit-normalized Lorentzian of half-width ``delta_omega``.

    :param f: vectorized callable of the detuning (rad/ps); may return complex values.
    :param delta_omega: Lorentzian half-width (rad/ps).
    :param abs_tol: requested absolute accuracy, at least 1e-12.
    :param period: oscillation period of ``f`` in detuning, or None for integrands
        that are smooth and bounded at infinity.
    :param tail_mean: average of ``f`` over one period far in the tails.
    :return: ``(value, error_estimate)``; value is real when ``f`` is real.
    :raises NumericFailure: if the panel budget is exhausted before ``abs_tol``.
    """
    if not abs_tol >= 1e-12:
        raise InvalidParameterError(f"abs_tol must be >= 1e-12, got {abs_tol}")
    if not (delta_omega > 0 and math.isfinite(delta_omega)):
        raise InvalidParameterError(f"delta_omega must be positive, got {delta_omega}")

    tail_value = 0.0
    tail_error = 0.0
    mapped = period is None
    if mapped:
        edges = np.linspace(-0.5, 0.5, 33)
    else:
        if not (period > 0 and math.isfinite(period)):
            raise InvalidParameterError(f"period must be positive, got {period}")
        spread = max(_sup_deviation(f, delta_omega, period, tail_mean), 1e-300)
        # 2 * G(X) * spread * period <= abs_tol / 4
        g_cut = abs_tol / (8.0 * spread * period)
        x_cut = math.sqrt(max(delta_omega / (math.pi * g_cut) - delta_omega ** 2, 0.0))
        x_cut = max(x_cut, 50.0 * delta_omega)
        k = math.ceil(x_cut / period)
        # over budget: integrate what fits; the tail bound then reports the shortfall
        k = max(1, min(k, max_panels // 2))
        x_cut = k * period
        edges = period * np.arange(-k, k + 1, dtype=float)
        # geometric edges keep G smooth on every panel when the period is long
        n_geo = math.ceil(math.log2(max(x_cut / delta_omega, 1.0))) + 1
        geo = delta_omega * 2.0 ** np.arange(-3, n_geo)
        geo = geo[geo < x_cut]
        edges = np.unique(np.concatenate([edges, geo, -geo]))
        outside = 1.0 - 2.0 * math.atan(x_cut / delta_omega) / math.pi
        tail_value = tail_mean * outside
        ratio = delta_omega / x_cut
        g_at_cut = ratio / x_cut / (math.pi * (1.0 + ratio ** 2))
        tail_error = 2.0 * g_at_cut * spread * period

    is_complex = np.iscomplexobj(np.asarray(f(np.array([0.0, delta_omega]))))
    a, b = edges[:-1], edges[1:]
    budget = (abs_tol - tail_error) / (b[-1] - a[0])
    total = 0.0 + 0.0j
    total_err = 0.0
    for depth in range(max_depth + 1):
        values, errors = _panel_rule(f, delta_omega, a, b, mapped)
        done = errors <= 0.5 * budget * (b - a)
        if depth == max_depth or 2 * np.count_nonzero(~done) > max_panels:
            done[:] = True
        total += values[done].sum()
        total_err += errors[done].sum()
        if done.all():
            break
        a, b = a[~done], b[~done]
        mid = 0.5 * (a + b)
        a, b = np.concatenate([a, mid]), np.concatenate([mid, b])

    value = total + tail_value
    if not is_complex:
        value = value.real
    error = total_err + tail_error
    if error > abs_tol:
        raise NumericFailure(
            f"quadrature reached error {error:.3g} > tolerance {abs_tol:.3g}",
            estimate=value, error=error)
    return value, error
