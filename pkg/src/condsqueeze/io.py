"""Configuration parsing and file output (traces, sweeps, Wigner grids, manifests).

Configuration files are flat TOML.  Frequencies are ``f/2pi`` values whose
unit is part of the key name (``chi_khz``, ``rabi_mhz``, ``g_mhz``); they are
converted to angular units exactly once, in :func:`config_from_mapping`.
Every numeric output is written with 17 significant digits so that a
write/read round trip is lossless.
"""
from __future__ import annotations

import csv
import io as _io
import json
import math
import platform
import sys
from pathlib import Path
from typing import Mapping, Optional

import numpy as np

if sys.version_info >= (3, 11):
    import tomllib
else:  # pragma: no cover - depends on interpreter
    import tomli as tomllib

from .errors import ConfigError
from .model import HamiltonianKind, DriveParams, TmsParams, auto_delta_q, khz, mhz, photon_limits
from .observables import SqueezingTrace, WignerGrid

__all__ = [
    "QUADRATURE_CONVENTION", "TRACE_COLUMNS", "SWEEP_COLUMNS", "MANIFEST_NAME",
    "load_config", "parse_config_text", "resolve_mapping", "config_from_mapping", "derived_quantities",
    "write_trace", "read_trace", "write_series", "write_sweep", "read_sweep", "write_wigner",
    "read_wigner", "write_json", "build_manifest", "write_manifest", "read_manifest",
    "config_from_manifest", "prepare_output_dir", "fmt",
]

QUADRATURE_CONVENTION = "X=(a+a^dag)/2"
TRACE_COLUMNS = ("t_us", "var_min", "var_max", "theta_min_rad", "squeeze_db", "antisqueeze_db",
                 "p_g", "p_e", "leakage", "norm_drift")
SWEEP_COLUMNS = ("g_mhz", "delta_omega_mhz", "max_db", "t_at_max_us", "status")
MANIFEST_NAME = "manifest.json"


def fmt(x) -> str:
    """Full-precision text form of a real number."""
    return format(float(x), ".17g")


# -- configuration ---------------------------------------------------------------

_REFERENCE = dict(chi_khz=-50.0, rabi_mhz=40.0, delta_omega_mhz=1.6, g_mhz=0.16)

_SCENARIO_DEFAULTS = {
    "single_mode": dict(kinds=["full_displaced"], qubit_init="g", conditions=["qubit_g"], t_end_us=30.0,
                        fock_dims=[120], leakage_abort=1e-6, sample_every=100),
    "superposition": dict(kinds=["full_displaced", "effective_squeezing", "effective_with_correction"],
                          qubit_init="+", conditions=["qubit_g", "qubit_e"], t_end_us=20.0,
                          fock_dims=[120], leakage_abort=1e-6, sample_every=100),
    "two_mode": dict(kinds=["full_displaced"], qubit_init="g", conditions=["qubit_g"], t_end_us=45.0,
                     fock_dims=[40, 40], leakage_abort=1e-3, sample_every=1000),
    "approx_chain": dict(kinds=["full_displaced", "modulated_coupling", "effective_squeezing",
                                "effective_with_correction"],
                         qubit_init="+", conditions=["qubit_g", "qubit_e"], t_end_us=10.0,
                         fock_dims=[120], leakage_abort=1e-6, sample_every=None),
    "sweep": dict(kinds=["full_displaced"], qubit_init="g", conditions=["qubit_g"], t_end_us=50.0,
                  fock_dims=[120], leakage_abort=1e-6, sample_every=200),
}

_COMMON_DEFAULTS = dict(dt_ns=0.5, t_start_us=0.0, norm_tol=1e-6, n_target=1.0, delta_q="auto",
                        workers=1, wigner_plane=["x_a", "x_b"], wigner_extent=2.0, wigner_points=81)

_FLOAT_KEYS = {"chi_khz", "chi_a_khz", "chi_b_khz", "chi_ref_khz", "rabi_mhz", "delta_omega_mhz",
               "g_mhz", "abar0", "abar0_im", "t_end_us", "t_start_us", "dt_ns", "leakage_abort", "norm_tol",
               "n_target", "wigner_extent", "delta_q_mhz"}
_INT_KEYS = {"sample_every", "workers", "wigner_points"}
_LIST_KEYS = {"fock_dims", "kinds", "conditions", "wigner_plane", "sweep_g_mhz", "sweep_abar0",
              "sweep_delta_omega_mhz"}
_STR_KEYS = {"scenario", "qubit_init", "delta_q"}
KNOWN_KEYS = _FLOAT_KEYS | _INT_KEYS | _LIST_KEYS | _STR_KEYS


def parse_config_text(text: str) -> dict:
    try:
        data = tomllib.loads(text)
    except tomllib.TOMLDecodeError as exc:
        raise ConfigError(f"invalid TOML: {exc}") from None
    for k, v in data.items():
        if isinstance(v, dict):
            raise ConfigError(f"nested table [{k}] not supported; the config format is flat")
    return data


def load_config(path) -> dict:
    """Read a flat TOML config file into a key-value mapping.

    A ``.json`` path (or a run directory) is read as a run manifest and its
    recorded, fully resolved config is returned, so a run can be repeated
    from its manifest alone.
    """
    p = Path(path)
    if p.is_dir() or p.suffix == ".json":
        man = read_manifest(p)
        if not isinstance(man.get("config"), dict):
            raise ConfigError(f"{p} has no config section")
        return dict(man["config"])
    try:
        text = p.read_text()
    except FileNotFoundError:
        raise ConfigError(f"config file not found: {p}") from None
    except OSError as exc:
        raise ConfigError(f"cannot read config file {p}: {exc}") from None
    return parse_config_text(text)


def _check_types(m: Mapping):
    unknown = sorted(set(m) - KNOWN_KEYS)
    if unknown:
        raise ConfigError(f"unknown config keys: {', '.join(unknown)}")
    for k, v in m.items():
        if v is None:
            continue
        if k in _FLOAT_KEYS and (isinstance(v, bool) or not isinstance(v, (int, float))):
            raise ConfigError(f"{k} must be a number")
        if k in _INT_KEYS and (isinstance(v, bool) or not isinstance(v, int)):
            raise ConfigError(f"{k} must be an integer")
        if k in _LIST_KEYS and not isinstance(v, (list, tuple)):
            raise ConfigError(f"{k} must be a list")
        if k in _STR_KEYS and not isinstance(v, str):
            raise ConfigError(f"{k} must be a string")


def resolve_mapping(mapping: Mapping, scenario: Optional[str] = None) -> dict:
    """Materialize every default, in the unit-suffixed form of the config file."""
    m = {k: v for k, v in dict(mapping).items() if v is not None}
    if scenario is not None:
        m["scenario"] = scenario
    _check_types(m)
    sc = m.get("scenario")
    if sc not in _SCENARIO_DEFAULTS:
        raise ConfigError(f"unknown or missing scenario {sc!r}; expected one of {sorted(_SCENARIO_DEFAULTS)}")
    out = dict(_COMMON_DEFAULTS)
    out.update(_SCENARIO_DEFAULTS[sc])
    out["chi_khz"] = _REFERENCE["chi_khz"]
    out["rabi_mhz"] = _REFERENCE["rabi_mhz"]
    out["delta_omega_mhz"] = _REFERENCE["delta_omega_mhz"]
    if "abar0" not in m:
        out["g_mhz"] = _REFERENCE["g_mhz"]
    if "delta_q_mhz" in m:
        m["delta_q"] = "number"
    out.update(m)
    if sc == "two_mode":
        out.setdefault("chi_a_khz", out["chi_khz"])
        out.setdefault("chi_b_khz", out["chi_a_khz"])
    elif any(k in out for k in ("chi_a_khz", "chi_b_khz", "chi_ref_khz")):
        raise ConfigError("chi_a_khz/chi_b_khz/chi_ref_khz only apply to the two_mode scenario")
    if sc == "sweep":
        if "sweep_abar0" in out and "sweep_g_mhz" in out:
            raise ConfigError("give sweep_g_mhz or sweep_abar0, not both")
        if "sweep_abar0" not in out:
            out.setdefault("sweep_g_mhz", [float(x) for x in np.geomspace(0.04, 0.4, 16)])
        out.setdefault("sweep_delta_omega_mhz", [float(x) for x in np.geomspace(0.4, 4.0, 16)])
    elif any(k.startswith("sweep_") for k in out):
        raise ConfigError("sweep_* keys only apply to the sweep scenario")
    if out.get("delta_q") == "number" and "delta_q_mhz" not in out:
        raise ConfigError("delta_q = 'number' needs delta_q_mhz")
    return out


def _delta_q(m):
    if "delta_q_mhz" in m:
        return mhz(m["delta_q_mhz"])
    return m["delta_q"]


def _abar0(m):
    if "abar0" not in m:
        return None
    return complex(m["abar0"], m.get("abar0_im", 0.0))


def config_from_mapping(mapping: Mapping, scenario: Optional[str] = None):
    """Build a resolved :class:`ScenarioConfig` and its materialized mapping.

    Returns ``(config, resolved_mapping)``; the mapping, fed back through
    this function, reproduces ``config`` exactly.
    """
    from .experiments import ScenarioConfig, SweepSpec, WignerSpec

    m = resolve_mapping(mapping, scenario)
    sc = m["scenario"]
    g = mhz(m["g_mhz"]) if "g_mhz" in m else None
    if sc == "two_mode":
        params = TmsParams(chi_a=khz(m["chi_a_khz"]), chi_b=khz(m["chi_b_khz"]), rabi=mhz(m["rabi_mhz"]),
                           delta_omega=mhz(m["delta_omega_mhz"]), g=g, abar0=_abar0(m),
                           chi_ref=khz(m["chi_ref_khz"]) if "chi_ref_khz" in m else None,
                           delta_q=_delta_q(m))
    else:
        params = DriveParams(chi=khz(m["chi_khz"]), rabi=mhz(m["rabi_mhz"]),
                             delta_omega=mhz(m["delta_omega_mhz"]), g=g, abar0=_abar0(m),
                             delta_q=_delta_q(m))
    sweep = None
    if sc == "sweep":
        if "sweep_abar0" in m:
            first, axis = tuple(float(x) for x in m["sweep_abar0"]), "abar0"
        else:
            first, axis = tuple(mhz(x) for x in m["sweep_g_mhz"]), "g"
        sweep = SweepSpec(first, tuple(mhz(x) for x in m["sweep_delta_omega_mhz"]), axis)
    cfg = ScenarioConfig(
        scenario=sc, params=params, t_end=m["t_end_us"] * 1e-6, dt=m["dt_ns"] * 1e-9,
        sample_every=m["sample_every"], t_start=m["t_start_us"] * 1e-6,
        fock_dims=tuple(int(x) for x in m["fock_dims"]), kinds=tuple(m["kinds"]),
        conditions=tuple(m["conditions"]), qubit_init=m["qubit_init"], leakage_abort=m["leakage_abort"],
        norm_tol=m["norm_tol"], n_target=m["n_target"], sweep=sweep,
        wigner=WignerSpec(tuple(m["wigner_plane"]), m["wigner_extent"], m["wigner_points"]),
        workers=m["workers"],
    ).resolved()
    m["sample_every"] = cfg.sample_every
    return cfg, m


def derived_quantities(params) -> dict:
    a0 = complex(params.abar0)
    g = complex(params.g)
    lims = photon_limits(params)
    out = {
        "abar0_re": a0.real, "abar0_im": a0.imag, "abs_abar0": abs(a0),
        "g_mhz": abs(g) / (2 * math.pi * 1e6),
        "delta_q_rad_s": auto_delta_q(params),
        "delta_q_mhz": auto_delta_q(params) / (2 * math.pi * 1e6),
        "photon_limits": [x if math.isfinite(x) else None for x in lims],
        "photon_limit_min": min(lims) if math.isfinite(min(lims)) else None,
        "modulation_period_us": 2 * math.pi / params.delta_omega * 1e6,
    }
    return out


# -- output directories and manifests ----------------------------------------------

def prepare_output_dir(path, force: bool = False) -> Path:
    """Create ``path``; refuse to reuse one holding a manifest unless ``force``."""
    p = Path(path)
    if (p / MANIFEST_NAME).exists() and not force:
        raise ConfigError(f"{p} already holds a run manifest; pass --force to overwrite")
    p.mkdir(parents=True, exist_ok=True)
    return p


def _canonical(obj):
    if isinstance(obj, dict):
        return {str(k): _canonical(v) for k, v in sorted(obj.items(), key=lambda kv: str(kv[0]))}
    if isinstance(obj, (list, tuple)):
        return [_canonical(v) for v in obj]
    if isinstance(obj, HamiltonianKind):
        return obj.value
    if isinstance(obj, (np.floating, float)):
        x = float(obj)
        return x if math.isfinite(x) else None
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, np.bool_):
        return bool(obj)
    if isinstance(obj, np.ndarray):
        return _canonical(obj.tolist())
    if isinstance(obj, complex):
        return [obj.real, obj.imag]
    return obj


def write_json(path, obj) -> Path:
    p = Path(path)
    p.write_text(json.dumps(_canonical(obj), indent=2, sort_keys=True, allow_nan=False) + "\n")
    return p


def build_manifest(command: str, mapping: Mapping, params, *, wall_clock_s: float = None,
                   guard_events=(), outputs=(), results: Mapping = None) -> dict:
    from . import __version__

    return {
        "tool": "condsqueeze", "version": __version__, "command": command,
        "python": platform.python_version(), "numpy": np.__version__,
        "config": dict(mapping),
        "derived": derived_quantities(params) if params is not None else {},
        "wall_clock_s": wall_clock_s, "guard_events": list(guard_events),
        "outputs": sorted(str(o) for o in outputs), "results": dict(results or {}),
    }


def write_manifest(out_dir, manifest: Mapping) -> Path:
    return write_json(Path(out_dir) / MANIFEST_NAME, manifest)


def read_manifest(path) -> dict:
    p = Path(path)
    if p.is_dir():
        p = p / MANIFEST_NAME
    try:
        return json.loads(p.read_text())
    except FileNotFoundError:
        raise ConfigError(f"manifest not found: {p}") from None
    except json.JSONDecodeError as exc:
        raise ConfigError(f"manifest {p} is not valid JSON: {exc}") from None


def config_from_manifest(path):
    """``(config, mapping)`` recorded in a manifest."""
    return config_from_mapping(read_manifest(path)["config"])


# -- traces ------------------------------------------------------------------------

def _header_line(meta: Mapping) -> str:
    return "# " + json.dumps(_canonical(meta), sort_keys=True, allow_nan=False) + "\n"


def write_trace(path, trace: SqueezingTrace, extra_meta: Mapping = None) -> Path:
    """CSV with :data:`TRACE_COLUMNS` and a ``#`` JSON header line."""
    meta = {"quadrature_convention": QUADRATURE_CONVENTION, "condition": trace.condition,
            "frame": trace.frame, "modes": list(trace.modes), "vacuum_variance": trace.vacuum,
            "units": {"t": "us", "theta_min": "rad", "squeeze_db": "dB", "antisqueeze_db": "dB"},
            "squeeze_db": "-10 log10(var_min / vacuum_variance)"}
    meta.update(extra_meta or {})
    n = len(trace)
    nan = np.full(n, np.nan)
    cols = [trace.times * 1e6, trace.var_min, trace.var_max, trace.theta_min, trace.squeeze_db,
            trace.antisqueeze_db, trace.p_g, trace.p_e,
            trace.leakage if trace.leakage is not None else nan,
            trace.norm_drift if trace.norm_drift is not None else nan]
    buf = _io.StringIO()
    buf.write(_header_line(meta))
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(TRACE_COLUMNS)
    for row in zip(*cols):
        w.writerow([fmt(x) for x in row])
    p = Path(path)
    p.write_text(buf.getvalue())
    return p


def _read_table(path):
    lines = Path(path).read_text().splitlines()
    if not lines or not lines[0].startswith("# "):
        raise ConfigError(f"{path}: missing JSON header line")
    meta = json.loads(lines[0][2:])
    rows = list(csv.reader(lines[1:]))
    return meta, rows[0], rows[1:]


def read_trace(path) -> SqueezingTrace:
    """Inverse of :func:`write_trace`."""
    meta, header, rows = _read_table(path)
    if tuple(header) != TRACE_COLUMNS:
        raise ConfigError(f"{path}: unexpected trace columns {header}")
    a = np.array([[float(x) for x in r] for r in rows], dtype=float).reshape(-1, len(TRACE_COLUMNS))
    c = {name: a[:, i] for i, name in enumerate(TRACE_COLUMNS)}
    n = len(a)
    return SqueezingTrace(
        times=c["t_us"] / 1e6,
        var_min=c["var_min"], var_max=c["var_max"], theta_min=c["theta_min_rad"],
        condition=meta["condition"], post_select_prob=np.full(n, np.nan), var_x=np.full(n, np.nan),
        var_p=np.full(n, np.nan), p_g=c["p_g"], p_e=c["p_e"], modes=tuple(meta["modes"]),
        frame=meta["frame"], vacuum=meta["vacuum_variance"], leakage=c["leakage"],
        norm_drift=c["norm_drift"])


def write_series(path, columns: Mapping, meta: Mapping = None) -> Path:
    """Generic CSV of equal-length numeric columns with a JSON header."""
    names = list(columns)
    data = [np.asarray(columns[k], dtype=float) for k in names]
    buf = _io.StringIO()
    buf.write(_header_line(dict(meta or {})))
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(names)
    for row in zip(*data):
        w.writerow([fmt(x) for x in row])
    p = Path(path)
    p.write_text(buf.getvalue())
    return p


# -- sweeps ------------------------------------------------------------------------

def write_sweep(path, result) -> Path:
    """Long-format CSV: one row per grid point; masked points leave ``max_db`` empty."""
    first = "g_mhz" if result.first_axis == "g" else "abar0"
    scale = 1 / (2 * math.pi * 1e6) if result.first_axis == "g" else 1.0
    meta = {"first_axis": first, "max_db": "max over the simulated window of conditioned squeezing",
            "status": result.status, "shape": list(result.max_squeeze_db.shape)}
    buf = _io.StringIO()
    buf.write(_header_line(meta))
    w = csv.writer(buf, lineterminator="\n")
    w.writerow((first,) + SWEEP_COLUMNS[1:])
    for i, gv in enumerate(result.g_values):
        for j, dw in enumerate(result.delta_omega_values):
            masked = bool(result.mask[i, j])
            w.writerow([fmt(gv * scale), fmt(dw / (2 * math.pi * 1e6)),
                        "" if masked else fmt(result.max_squeeze_db[i, j]),
                        "" if masked else fmt(result.t_at_max[i, j] * 1e6), result.point_status[i, j]])
    p = Path(path)
    p.write_text(buf.getvalue())
    return p


def read_sweep(path) -> dict:
    meta, header, rows = _read_table(path)
    out = {"meta": meta, "header": header, "rows": []}
    for r in rows:
        out["rows"].append((float(r[0]), float(r[1]), float(r[2]) if r[2] else math.nan,
                            float(r[3]) if r[3] else math.nan, r[4]))
    return out


# -- Wigner grids ------------------------------------------------------------------

def write_wigner(path, grid: WignerGrid, meta: Mapping = None) -> Path:
    """CSV matrix: first row ``y\\x`` then the x axis; each next row a y value then ``W(x, y)``."""
    m = {"axes": list(grid.axes), "fixed": grid.fixed, "quadrature_convention": QUADRATURE_CONVENTION,
         "layout": "rows are y, columns are x"}
    m.update(meta or {})
    buf = _io.StringIO()
    buf.write(_header_line(m))
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["y\\x"] + [fmt(x) for x in grid.x])
    for j, y in enumerate(grid.y):
        w.writerow([fmt(y)] + [fmt(v) for v in grid.values[j]])
    p = Path(path)
    p.write_text(buf.getvalue())
    return p


def read_wigner(path) -> WignerGrid:
    meta, header, rows = _read_table(path)
    x = np.array([float(v) for v in header[1:]])
    y = np.array([float(r[0]) for r in rows])
    vals = np.array([[float(v) for v in r[1:]] for r in rows])
    return WignerGrid(tuple(meta["axes"]), x, y, vals, meta.get("fixed"))

