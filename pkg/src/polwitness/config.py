"""Run configuration for the command-line harness.

The file format is a sectioned ``key = value`` text::

    # comments start with '#'
    [preparation]
    d = 0.5
    lengths_mm = 35.92

Values are parsed per key; list values are comma separated.  Every error names
the line it comes from.  Lengths stay in mm, wavelengths in nm and times in ps in
the file; the spectrum is converted to rad/ps once, here.
"""
import math
from dataclasses import dataclass, field, fields, replace
from pathlib import Path

from .spectrum import Quantile, UniformTruncated, make_lorentzian
from .units import (CALCITE_BIREFRINGENCE, CALCITE_LENGTH_MM, CALCITE_STEP_MM,
                    FIBER_BIREFRINGENCE, FIBER_LENGTH_MM, LINEWIDTH_PS, WAVELENGTH_NM,
                    crystal_time, wavelength_to_omega)


class ConfigError(ValueError):
    """Malformed or inconsistent configuration; ``line`` is 1-based or None."""

    def __init__(self, message, line=None, source="<config>"):
        self.line = line
        self.source = source
        where = f"{source}:{line}: " if line is not None else f"{source}: "
        super().__init__(where + message)


@dataclass(frozen=True)
class RunConfig:
    # spectrum
    wavelength_nm: float = WAVELENGTH_NM
    linewidth_ps: float = LINEWIDTH_PS
    # preparation
    d: float = 0.5
    phi: float = 0.0
    lengths_mm: tuple = (CALCITE_LENGTH_MM,)
    birefringence: float = CALCITE_BIREFRINGENCE
    # grid
    scheme: str = "quantile"
    n_bins: object = "auto"
    kappa: float = 100.0
    # protocol
    dephasing: str = "projective"
    fiber_s_ps: float = crystal_time(FIBER_LENGTH_MM, FIBER_BIREFRINGENCE)
    tomography: str = "exact"
    counts: int = 100_000
    seed: int = 0
    rotation: str = "hwp"
    carrier: str = "rotating"
    # sweep
    etas: object = "experiment"
    taus: str = "experiment"
    dense_points: int = 481
    method: str = "fit"
    # fig4
    fig4_lengths_mm: tuple = tuple(k * CALCITE_STEP_MM for k in range(7))
    fig4_repeats: int = 10
    fig4_taus: str = "dense"
    # linewidth
    visibility_csv: str = None
    visibility_noise: float = 0.01
    visibility_points: int = 50
    visibility_decays: float = 4.0
    # output
    out_dir: str = "out"
    formats: tuple = ("csv", "json", "svg")
    # oracle
    oracle_sizes: tuple = (8, 32, 64)
    tolerance_scale: float = 1.0
    # bookkeeping
    source_text: str = field(default="", repr=False, compare=False)
    source_path: str = field(default=None, compare=False)

    @property
    def omega0(self):
        return wavelength_to_omega(self.wavelength_nm)

    @property
    def delta_omega(self):
        return 1.0 / self.linewidth_ps

    def spectrum(self):
        return make_lorentzian(self.omega0, self.delta_omega)

    def scheme_for(self, n=None):
        """Discretization scheme; ``n`` overrides the configured bin count."""
        n = self.n_bins if n is None else n
        if self.scheme == "quantile":
            return Quantile(4096 if n == "auto" else n)
        return UniformTruncated(self.kappa, 4096 if n == "auto" else n)

    def as_dict(self):
        return {f.name: getattr(self, f.name) for f in fields(self)
                if f.name not in ("source_text",)}


# key -> (section, field, parser)
def _float(v):
    x = float(v)
    if not math.isfinite(x):
        raise ValueError("must be finite")
    return x


def _int(v):
    return int(v, 0) if isinstance(v, str) else int(v)


def _floats(v):
    return tuple(_float(s) for s in v.split(",") if s.strip())


def _ints(v):
    return tuple(_int(s.strip()) for s in v.split(",") if s.strip())


def _choice(*options):
    def parse(v):
        v = v.strip().lower()
        if v not in options:
            raise ValueError(f"must be one of {', '.join(options)}")
        return v
    return parse


def _n_bins(v):
    return "auto" if v.strip().lower() == "auto" else _int(v)


def _etas(v):
    return "experiment" if v.strip().lower() == "experiment" else _floats(v)


def _words(v):
    return tuple(s.strip().lower() for s in v.split(",") if s.strip())


def _path(v):
    return v.strip() or None


_KEYS = {
    ("spectrum", "wavelength_nm"): ("wavelength_nm", _float),
    ("spectrum", "linewidth_ps"): ("linewidth_ps", _float),
    ("preparation", "d"): ("d", _float),
    ("preparation", "phi"): ("phi", _float),
    ("preparation", "lengths_mm"): ("lengths_mm", _floats),
    ("preparation", "birefringence"): ("birefringence", _float),
    ("grid", "scheme"): ("scheme", _choice("quantile", "uniform")),
    ("grid", "n"): ("n_bins", _n_bins),
    ("grid", "kappa"): ("kappa", _float),
    ("protocol", "dephasing"): ("dephasing", _choice("projective", "fiber")),
    ("protocol", "fiber_s_ps"): ("fiber_s_ps", _float),
    ("protocol", "tomography"): ("tomography", _choice("exact", "counts")),
    ("protocol", "counts"): ("counts", _int),
    ("protocol", "seed"): ("seed", _int),
    ("protocol", "rotation"): ("rotation", _choice("hwp", "haar", "identity")),
    ("protocol", "carrier"): ("carrier", _choice("rotating", "full")),
    ("sweep", "etas"): ("etas", _etas),
    ("sweep", "taus"): ("taus", _choice("experiment", "dense")),
    ("sweep", "dense_points"): ("dense_points", _int),
    ("sweep", "method"): ("method", _choice("fit", "grid")),
    ("fig4", "lengths_mm"): ("fig4_lengths_mm", _floats),
    ("fig4", "repeats"): ("fig4_repeats", _int),
    ("fig4", "taus"): ("fig4_taus", _choice("experiment", "dense")),
    ("linewidth", "input"): ("visibility_csv", _path),
    ("linewidth", "noise"): ("visibility_noise", _float),
    ("linewidth", "points"): ("visibility_points", _int),
    ("linewidth", "decays"): ("visibility_decays", _float),
    ("output", "dir"): ("out_dir", _path),
    ("output", "formats"): ("formats", _words),
    ("oracle", "sizes"): ("oracle_sizes", _ints),
    ("oracle", "tolerance_scale"): ("tolerance_scale", _float),
}


def parse_config(text, source="<config>"):
    """Parse configuration text into a validated :class:`RunConfig`.

    :raises ConfigError: with the offending line number.
    """
    values, lines = {}, {}
    section = None
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if line.startswith("["):
            if not line.endswith("]") or len(line) < 3:
                raise ConfigError(f"malformed section header {raw.strip()!r}", lineno, source)
            section = line[1:-1].strip().lower()
            if section not in {s for s, _ in _KEYS}:
                raise ConfigError(f"unknown section [{section}]", lineno, source)
            continue
        if "=" not in line:
            raise ConfigError(f"expected 'key = value', got {raw.strip()!r}", lineno, source)
        if section is None:
            raise ConfigError("key outside of any section", lineno, source)
        key, value = (s.strip() for s in line.split("=", 1))
        key = key.lower()
        spec = _KEYS.get((section, key))
        if spec is None:
            raise ConfigError(f"unknown key {key!r} in [{section}]", lineno, source)
        name, parser = spec
        if name in values:
            raise ConfigError(f"duplicate key {key!r} (first set on line {lines[name]})",
                              lineno, source)
        try:
            values[name] = parser(value)
        except ValueError as exc:
            raise ConfigError(f"[{section}] {key} = {value!r}: {exc}", lineno, source) from None
        lines[name] = lineno
    cfg = RunConfig(source_text=text, source_path=None if source == "<config>" else source,
                    **values)
    validate(cfg, lines, source)
    return cfg


def load_config(path=None):
    """Defaults when ``path`` is None, otherwise the parsed file."""
    if path is None:
        return parse_config("")
    p = Path(path)
    try:
        text = p.read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError(f"cannot read config: {exc.strerror}", None, str(path)) from None
    return parse_config(text, str(path))


def override(cfg, **changes):
    """Copy of ``cfg`` with command-line overrides applied and re-validated."""
    changes = {k: v for k, v in changes.items() if v is not None}
    new = replace(cfg, **changes)
    validate(new, {}, cfg.source_path or "<command line>")
    return new


def validate(cfg, lines=None, source="<config>"):
    """Check every precondition the run will rely on, before any computation."""
    lines = lines or {}

    def fail(name, message):
        raise ConfigError(message, lines.get(name), source)

    if not cfg.wavelength_nm > 0:
        fail("wavelength_nm", "wavelength_nm must be positive")
    if not cfg.linewidth_ps > 0:
        fail("linewidth_ps", "linewidth_ps must be positive")
    if cfg.omega0 < 100 * cfg.delta_omega:
        fail("linewidth_ps", "carrier frequency must exceed 100 line half-widths")
    if not 0.0 <= cfg.d <= 0.5:
        fail("d", f"d must lie in [0, 0.5], got {cfg.d}")
    for name in ("lengths_mm", "fig4_lengths_mm"):
        vals = getattr(cfg, name)
        if not vals:
            fail(name, f"{name} must list at least one length")
        if any(v < 0 for v in vals):
            fail(name, f"{name} must be non-negative")
    if cfg.birefringence < 0:
        fail("birefringence", "birefringence must be non-negative")
    if cfg.n_bins != "auto" and not (isinstance(cfg.n_bins, int) and cfg.n_bins >= 64):
        fail("n_bins", f"grid n must be 'auto' or an integer >= 64, got {cfg.n_bins}")
    if cfg.n_bins != "auto" and cfg.n_bins > 2 ** 22:
        fail("n_bins", "grid n is limited to 4194304 bins")
    if cfg.kappa < 10:
        fail("kappa", f"kappa must be >= 10, got {cfg.kappa}")
    if cfg.counts < 1:
        fail("counts", "counts must be at least 1")
    if not 0 <= cfg.seed < 2 ** 64:
        fail("seed", "seed must be an unsigned 64-bit integer")
    if cfg.dense_points < 3:
        fail("dense_points", "dense_points must be at least 3")
    if cfg.etas != "experiment" and any(not 0 <= e < math.pi for e in cfg.etas):
        fail("etas", "eta angles must lie in [0, pi)")
    if cfg.fig4_repeats < 1:
        fail("fig4_repeats", "repeats must be at least 1")
    if cfg.visibility_points < 8:
        fail("visibility_points", "need at least 8 visibility samples")
    if cfg.visibility_noise < 0:
        fail("visibility_noise", "noise must be non-negative")
    if not cfg.visibility_decays >= 2:
        fail("visibility_decays", "the scan must cover at least 2 decay constants")
    bad = set(cfg.formats) - {"csv", "json", "svg"}
    if bad:
        fail("formats", f"unknown output formats: {', '.join(sorted(bad))}")
    if not cfg.oracle_sizes or any(not 1 <= n <= 256 for n in cfg.oracle_sizes):
        fail("oracle_sizes", "oracle sizes must lie in 1..256")
    if cfg.dephasing == "fiber":
        if cfg.scheme != "uniform":
            fail("dephasing", "fiber dephasing needs [grid] scheme = uniform")
        if cfg.fiber_s_ps <= 0:
            fail("fiber_s_ps", "fiber_s_ps must be positive")
        if cfg.n_bins != "auto":
            spacing = 2 * cfg.kappa * cfg.delta_omega / cfg.n_bins
            if spacing * cfg.fiber_s_ps > 0.2:
                need = math.ceil(2 * cfg.kappa * cfg.delta_omega * cfg.fiber_s_ps / 0.2)
                fail("n_bins", f"grid too coarse for the fiber phase: need n >= {need}")
    return cfg
