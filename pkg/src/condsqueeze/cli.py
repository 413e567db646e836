"""Command-line entry point.

Exit status: 0 success, 2 configuration error, 3 guard abort, 4 numerical
or I/O failure.  Failures print one JSON object on stderr.
"""
from __future__ import annotations

import argparse
import json
import math
import sys
import time
from pathlib import Path

import numpy as np

from . import io
from .controllability import canonical_pair, closure_search, control_generators, identity_catalogue
from .errors import ConfigError, GuardAbort, NumericalError, PostSelectionError, TruncationError
from .experiments import run_scenario
from .observables import GridSpec, conditioned_state, joint_wigner_cut, wigner
from .operators import HilbertLayout, pauli

EXIT_OK, EXIT_CONFIG, EXIT_GUARD, EXIT_NUMERICAL = 0, 2, 3, 4

SCENARIO_COMMANDS = {
    "single-mode": "single_mode", "superposition": "superposition", "two-mode": "two_mode",
    "sweep": "sweep", "approx-chain": "approx_chain",
}


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise ConfigError(message)


def _add_common(p):
    p.add_argument("--config", help="flat TOML configuration file")
    p.add_argument("--g-mhz", type=float, help="coupling g/2pi in MHz")
    p.add_argument("--abar0", type=float, help="drive amplitude |abar0| (instead of --g-mhz)")
    p.add_argument("--delta-omega-mhz", type=float, help="sideband detuning delta_omega/2pi in MHz")
    p.add_argument("--chi-khz", type=float, help="dispersive shift chi/2pi in kHz")
    p.add_argument("--rabi-mhz", type=float, help="Rabi frequency Omega_R/2pi in MHz")
    p.add_argument("--fock-dim", type=int, help="Fock dimension (every mode)")
    p.add_argument("--t-end-us", type=float, help="end of the simulated window in us")
    p.add_argument("--dt-ns", type=float, help="integrator step in ns")
    p.add_argument("--sample-every", type=int, help="steps between samples")
    p.add_argument("--workers", type=int, help="worker processes for sweeps")
    p.add_argument("--out", default=None, help="output directory (default ./condsqueeze-out/<command>)")
    p.add_argument("--force", action="store_true", help="overwrite an existing run directory")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="condsqueeze", description="Conditional squeezing simulations.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)
    for name, sc in SCENARIO_COMMANDS.items():
        _add_common(sub.add_parser(name, help=f"run the {sc} scenario"))
    w = sub.add_parser("wigner", help="Wigner function of the conditioned state at peak squeezing")
    _add_common(w)
    w.add_argument("--scenario", choices=["single-mode", "superposition", "two-mode"], default="single-mode")
    w.add_argument("--extent", type=float, help="half-width of the square grid")
    w.add_argument("--points", type=int, help="grid points per axis")
    w.add_argument("--plane", nargs=2, metavar=("U", "V"), help="two-mode cut plane, e.g. x_a x_b")
    lie = sub.add_parser("lie-check", help="commutator identities and Lie-closure report")
    lie.add_argument("--fock-dim", type=int, default=60)
    lie.add_argument("--interior-dim", type=int, default=40)
    lie.add_argument("--closure-fock-dim", type=int, default=40)
    lie.add_argument("--max-depth", type=int, default=3)
    lie.add_argument("--out", default=None)
    lie.add_argument("--force", action="store_true")
    return parser


def _mapping_from_args(args, scenario):
    m = io.load_config(args.config) if args.config else {}
    if "scenario" in m and m["scenario"] != scenario:
        raise ConfigError(f"config is for scenario {m['scenario']!r}, command runs {scenario!r}")
    overrides = {"g_mhz": args.g_mhz, "abar0": args.abar0, "delta_omega_mhz": args.delta_omega_mhz,
                 "chi_khz": args.chi_khz, "rabi_mhz": args.rabi_mhz, "t_end_us": args.t_end_us,
                 "dt_ns": args.dt_ns, "sample_every": args.sample_every, "workers": args.workers}
    if args.abar0 is not None:
        m.pop("g_mhz", None)
    if args.g_mhz is not None:
        m.pop("abar0", None)
    if args.chi_khz is not None and scenario == "two_mode":
        m.pop("chi_a_khz", None)
        m.pop("chi_b_khz", None)
    for k, v in overrides.items():
        if v is not None:
            m[k] = v
    if args.fock_dim is not None:
        m["fock_dims"] = [args.fock_dim] * (2 if scenario == "two_mode" else 1)
    return m


def _out_dir(args, command):
    return io.prepare_output_dir(args.out or Path("condsqueeze-out") / command, args.force)


def _write_runs(out, result, outputs):
    for kind, run in result.runs.items():
        for cond, tr in run.traces.items():
            outputs.append(io.write_trace(out / f"trace_{kind.value}_{cond}.csv", tr,
                                          {"kind": kind.value, "status": run.status}))
        outputs.append(io.write_series(
            out / f"observables_{kind.value}.csv",
            {"t_us": run.times * 1e6, "photon_number": run.photon_number, "entropy_bits": run.entropy,
             "leakage": run.leakage, "norm_drift": run.norm_drift},
            {"kind": kind.value, "frame": run.frame, "entropy": "qubit vs oscillator, base 2"}))


def _guard_events(result):
    return [f"{k.value}: {g}" for k, r in result.runs.items() for g in r.guard_flags]


def _run_scenario_command(args, command):
    scenario = SCENARIO_COMMANDS[command]
    cfg, mapping = io.config_from_mapping(_mapping_from_args(args, scenario), scenario)
    out = _out_dir(args, command)
    t0 = time.perf_counter()
    result = run_scenario(cfg)
    wall = time.perf_counter() - t0
    outputs = []
    if scenario == "sweep":
        outputs.append(io.write_sweep(out / "sweep.csv", result))
        best = result.argmax()
        summary = {"status": result.status, "masked_points": int(result.mask.sum()),
                   "points": int(result.mask.size)}
        if best is not None:
            i, j = best
            scale = 1 / (2 * math.pi * 1e6) if result.first_axis == "g" else 1.0
            summary.update({"best_first_axis": result.g_values[i] * scale,
                            "best_delta_omega_mhz": result.delta_omega_values[j] / (2 * math.pi * 1e6),
                            "best_max_db": result.max_squeeze_db[i, j]})
        guards = [f"point {i},{j}: {s}" for (i, j), s in np.ndenumerate(result.point_status) if s != "ok"]
        status = EXIT_GUARD if result.status == "no feasible points" else EXIT_OK
    else:
        _write_runs(out, result, outputs)
        summary = result.summary()
        ex = result.extras
        if "wigner" in ex:
            outputs.append(io.write_wigner(out / "wigner_joint.csv", ex["wigner"],
                                           {"time_us": ex["wigner_time_us"]}))
        if "fidelity" in ex:
            cols = {"t_us": ex["times_us"],
                    "stroboscopic": [1.0 if s else 0.0 for s in ex["stroboscopic"]]}
            cols.update(ex["fidelity"])
            outputs.append(io.write_series(out / "fidelities.csv", cols, {"frame": "effective"}))
        guards = _guard_events(result)
        status = EXIT_OK if result.status == "ok" else EXIT_GUARD
    man = io.build_manifest(command, mapping, cfg.params, wall_clock_s=wall, guard_events=guards,
                            outputs=[p.name for p in outputs], results=summary)
    io.write_manifest(out, man)
    print(json.dumps(io._canonical({"command": command, "out": str(out), "results": summary}), sort_keys=True))
    return status


def _wigner_command(args):
    scenario = SCENARIO_COMMANDS[args.scenario]
    m = _mapping_from_args(args, scenario)
    if args.extent is not None:
        m["wigner_extent"] = args.extent
    if args.points is not None:
        m["wigner_points"] = args.points
    if args.plane is not None:
        m["wigner_plane"] = list(args.plane)
    cfg, mapping = io.config_from_mapping(m, scenario)
    from dataclasses import replace

    from .experiments import run_kind

    cfg = replace(cfg, kinds=cfg.kinds[:1])
    out = _out_dir(args, "wigner")
    t0 = time.perf_counter()
    run = run_kind(cfg, cfg.kinds[0], keep_states=True)
    outputs, summary = [], {"kind": run.kind.value, "status": run.status}
    grid = GridSpec.square(cfg.wigner.extent, cfg.wigner.points)
    for cond, tr in run.traces.items():
        db, t, i = tr.peak()
        state = run.record.states[i]
        if cond != "none":
            try:
                state, _ = conditioned_state(state, cond[-1], run.frame)
            except PostSelectionError:
                continue
        if scenario == "two_mode":
            wg = joint_wigner_cut(state, cfg.wigner.plane, grid)
        else:
            wg = wigner(state, state.layout.fock_indices[0], grid)
        outputs.append(io.write_wigner(out / f"wigner_{cond}.csv", wg, {"time_us": t * 1e6, "squeeze_db": db}))
        summary[f"peak_db[{cond}]"] = db
        summary[f"t_peak_us[{cond}]"] = t * 1e6
        summary[f"wigner_integral[{cond}]"] = wg.integral()
    man = io.build_manifest("wigner", mapping, cfg.params, wall_clock_s=time.perf_counter() - t0,
                            guard_events=run.guard_flags, outputs=[p.name for p in outputs], results=summary)
    io.write_manifest(out, man)
    print(json.dumps(io._canonical({"command": "wigner", "out": str(out), "results": summary}), sort_keys=True))
    return EXIT_OK if run.ok else EXIT_GUARD


def lie_check_report(fock_dim=60, interior_dim=40, closure_fock_dim=40, max_depth=3) -> dict:
    """Identity catalogue plus closure searches for the full set and for ``{q, p}``."""
    checks = identity_catalogue(fock_dim, interior_dim)
    layout = HilbertLayout.qubit_modes(closure_fock_dim)
    q, p = canonical_pair(layout)
    sx, sz = pauli(layout, "x"), pauli(layout, "z")
    q2, q3 = q @ q, q @ q @ q
    targets = {"q2": q2, "q2 sz": q2 @ sz, "q3 sz": q3 @ sz, "q3 sx": q3 @ sx}
    full = closure_search(control_generators(layout), max_depth, targets)
    gauss = closure_search(control_generators(layout, ["q", "p"]), max_depth, {"q2": q2})
    def ratio(c):
        return None if math.isnan(c.printed_ratio.real) else [c.printed_ratio.real, c.printed_ratio.imag]

    return {
        "fock_dim": fock_dim, "interior_dim": interior_dim,
        "identities": [{"label": c.label, "residual": c.residual, "holds": c.holds,
                        "printed_residual": c.printed_residual, "printed_holds": c.printed_holds,
                        "printed_ratio": ratio(c)} for c in checks],
        "all_hold": all(c.holds for c in checks),
        "closure_full": full.to_dict(),
        "closure_qp": gauss.to_dict(),
    }


def _lie_command(args):
    out = io.prepare_output_dir(args.out or Path("condsqueeze-out") / "lie-check", args.force)
    t0 = time.perf_counter()
    rep = lie_check_report(args.fock_dim, args.interior_dim, args.closure_fock_dim, args.max_depth)
    io.write_json(out / "lie_check.json", rep)
    mapping = {"fock_dim": args.fock_dim, "interior_dim": args.interior_dim,
               "closure_fock_dim": args.closure_fock_dim, "max_depth": args.max_depth}
    io.write_manifest(out, io.build_manifest("lie-check", mapping, None,
                                             wall_clock_s=time.perf_counter() - t0, outputs=["lie_check.json"],
                                             results={"all_hold": rep["all_hold"]}))
    summary = {k: rep[k] for k in ("identities", "all_hold")}
    summary["reached_full"] = rep["closure_full"]["reached"]
    summary["reached_qp"] = rep["closure_qp"]["reached"]
    print(json.dumps(io._canonical(summary), sort_keys=True))
    return EXIT_OK if rep["all_hold"] else EXIT_NUMERICAL


def _fail(code, exc):
    payload = {"error": type(exc).__name__, "message": str(exc), "exit_code": code}
    print(json.dumps(payload, sort_keys=True), file=sys.stderr)
    return code


def main(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
        if args.command == "lie-check":
            return _lie_command(args)
        if args.command == "wigner":
            return _wigner_command(args)
        return _run_scenario_command(args, args.command)
    except (ConfigError, TruncationError) as exc:
        return _fail(EXIT_CONFIG, exc)
    except GuardAbort as exc:
        return _fail(EXIT_GUARD, exc)
    except (NumericalError, PostSelectionError, OSError, FloatingPointError, np.linalg.LinAlgError) as exc:
        return _fail(EXIT_NUMERICAL, exc)


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
