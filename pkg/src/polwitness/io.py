"""CSV and JSON readers/writers for every artifact the package produces.

Floats are written with ``repr`` so a file re-parses to exactly the values that
were written, and identical inputs give byte-identical files.
"""
import csv
import hashlib
import json
from pathlib import Path

import numpy as np

from .errors import InvalidParameterError
from .estimation import VisibilityTrace
from .spectrum import FrequencyGrid
from .states import JointBlockState
from .tomography import SETTINGS, CountRecord
from .witness import CurveFit, DelaySweep, WitnessCurve

GRID_HEADER = ("omega_rad_per_ps", "weight")
STATE_HEADER = ("bin", "w", "b00_re", "b00_im", "b01_re", "b01_im",
                "b10_re", "b10_im", "b11_re", "b11_im")
CURVE_HEADER = ("eta_rad", "tau_ps", "x_mm", "delta")
COUNTS_HEADER = ("sample", "setting", "n_plus", "n_minus")
FIG4_HEADER = ("L_mm", "t_ps", "witness_sim", "witness_err", "eq10_theory", "eq7_delta")


def fmt(value):
    """Shortest string that round-trips ``value`` exactly."""
    if isinstance(value, (bool, np.bool_)):
        return str(bool(value)).lower()
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        return repr(float(value))
    return str(value)


def write_table(path, header, rows):
    path = Path(path)
    with path.open("w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        for row in rows:
            writer.writerow([fmt(v) for v in row])
    return path


def read_table(path, expected_header=None):
    """Return ``(header, rows)`` with every row a list of strings."""
    with Path(path).open(newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        try:
            header = tuple(next(reader))
        except StopIteration:
            raise InvalidParameterError(f"{path}: empty file") from None
        rows = [r for r in reader if r]
    if expected_header is not None and header[:len(expected_header)] != tuple(expected_header):
        raise InvalidParameterError(
            f"{path}: expected columns {','.join(expected_header)}, got {','.join(header)}")
    return header, rows


def _columns(rows, n):
    if not rows:
        return [np.empty(0) for _ in range(n)]
    return [np.array([float(r[k]) for r in rows]) for k in range(n)]


# -- grids and states ---------------------------------------------------------

def write_grid_csv(grid, path):
    return write_table(path, GRID_HEADER, zip(grid.omega, grid.weight))


def read_grid_csv(path, omega0=None):
    """Grid from a CSV file; ``omega0`` defaults to the mean frequency."""
    _, rows = read_table(path, GRID_HEADER)
    omega, weight = _columns(rows, 2)
    if omega0 is None:
        omega0 = float(omega @ weight / weight.sum())
    return FrequencyGrid(omega - omega0, weight / weight.sum(), omega0)


def write_state_csv(state, path):
    b = state.blocks.reshape(state.grid.n, 4)
    rows = ([i, state.grid.weight[i]] + [p for z in b[i] for p in (z.real, z.imag)]
            for i in range(state.grid.n))
    return write_table(path, STATE_HEADER, rows)


def read_state_csv(path, grid):
    """Blocks from a state dump; ``grid`` must match the stored weights."""
    _, rows = read_table(path, STATE_HEADER)
    cols = _columns(rows, len(STATE_HEADER))
    if cols[1].size != grid.n or not np.array_equal(cols[1], grid.weight):
        raise InvalidParameterError(f"{path}: weights do not match the given grid")
    entries = np.stack([cols[k] + 1j * cols[k + 1] for k in range(2, 10, 2)], axis=-1)
    return JointBlockState(grid, entries.reshape(-1, 2, 2))


# -- witness curves ----------------------------------------------------------

def write_curve_csv(curve, path):
    sw = curve.sweep
    x = sw.x_mm
    rows = ((eta, tau, x[j], curve.values[i, j])
            for i, eta in enumerate(sw.etas) for j, tau in enumerate(sw.taus))
    return write_table(path, CURVE_HEADER, rows)


def read_curve_csv(path):
    _, rows = read_table(path, CURVE_HEADER)
    eta, tau, _, delta = _columns(rows, 4)
    etas = np.array(list(dict.fromkeys(eta)))
    taus = np.array(list(dict.fromkeys(tau)))
    if etas.size * taus.size != delta.size:
        raise InvalidParameterError(f"{path}: rows do not form a full eta x tau table")
    return WitnessCurve(DelaySweep(etas, taus), delta.reshape(etas.size, taus.size))


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _jsonable(obj.tolist())
    if isinstance(obj, (np.bool_,)):
        return bool(obj)
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, np.floating):
        return float(obj)
    if isinstance(obj, complex):
        return {"re": obj.real, "im": obj.imag}
    return obj


def write_json(obj, path):
    path = Path(path)
    path.write_text(json.dumps(_jsonable(obj), indent=2, sort_keys=True) + "\n", encoding="utf-8")
    return path


def read_json(path):
    return json.loads(Path(path).read_text(encoding="utf-8"))


def curve_to_dict(curve):
    fit = None
    if curve.fit is not None:
        f = curve.fit
        fit = {"t_hat_ps": f.t_hat, "d_hat": f.d_hat, "residual": f.residual,
               "witness": f.witness, "converged": f.converged}
    return {"etas_rad": curve.sweep.etas, "taus_ps": curve.sweep.taus,
            "x_mm": curve.sweep.x_mm, "values": curve.values,
            "metadata": curve.metadata, "fit": fit}


def write_curve_json(curve, path):
    return write_json(curve_to_dict(curve), path)


def read_curve_json(path):
    data = read_json(path)
    fit = None
    if data.get("fit"):
        f = data["fit"]
        fit = CurveFit(f["t_hat_ps"], f["d_hat"], f["residual"], f["witness"], f["converged"])
    return WitnessCurve(DelaySweep(data["etas_rad"], data["taus_ps"]),
                        np.array(data["values"]), fit, data.get("metadata", {}))


# -- tomography and estimation -----------------------------------------------

def write_counts_csv(record, path):
    """One row per (sample, setting); a single record is sample 0."""
    c = record.counts.reshape(-1, 3, 2)
    rows = ((s, SETTINGS[k], c[s, k, 0], c[s, k, 1])
            for s in range(c.shape[0]) for k in range(3))
    return write_table(path, COUNTS_HEADER, rows)


def read_counts_csv(path):
    _, rows = read_table(path, COUNTS_HEADER)
    if len(rows) % 3:
        raise InvalidParameterError(f"{path}: expected three settings per sample")
    counts = np.array([[int(r[2]), int(r[3])] for r in rows], dtype=np.int64).reshape(-1, 3, 2)
    for r, k in zip(rows, range(len(rows))):
        if r[1] != SETTINGS[k % 3]:
            raise InvalidParameterError(f"{path}: setting {r[1]!r} out of order")
    n = int(counts[0, 0].sum()) if counts.size else 0
    if counts.shape[0] == 1:
        counts = counts[0]
    return CountRecord(counts, n)


def write_visibility_csv(trace, path):
    if trace.sigma is None:
        return write_table(path, ("x_mm", "visibility"), zip(trace.x_mm, trace.visibility))
    return write_table(path, ("x_mm", "visibility", "sigma"),
                       zip(trace.x_mm, trace.visibility, trace.sigma))


def read_visibility_csv(path):
    header, rows = read_table(path, ("x_mm", "visibility"))
    cols = _columns(rows, len(header))
    return VisibilityTrace(cols[0], cols[1], cols[2] if len(header) > 2 else None)


def write_fig4_csv(rows, path):
    return write_table(path, FIG4_HEADER, rows)


def read_fig4_csv(path):
    _, rows = read_table(path, FIG4_HEADER)
    return np.array([[float(v) for v in r] for r in rows]).reshape(-1, len(FIG4_HEADER))


def sha256(path):
    return hashlib.sha256(Path(path).read_bytes()).hexdigest()
