"""Scenario runners: single-mode, superposition, two-mode, approximation chain, sweeps.

Initial states are specified in the effective frame (qubit ``g`` or ``+``,
oscillators in vacuum) and mapped into the frame of each Hamiltonian kind
at ``t = 0``.  In the displaced frame effective ``|g>`` is the
``sigma_x = -1`` eigenstate and effective ``|+>`` is ``|e>``.
"""
from __future__ import annotations

import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from typing import Optional, Sequence

import numpy as np

from .dynamics import EvolutionRecord, TimeGrid, evolve, evolve_stroboscopic, leakage
from .errors import ConfigError, GuardAbort, NumericalError, TruncationError
from .frames import frame_transform
from .model import (
    FRAME_OF, DriveParams, HamiltonianKind, HamiltonianSpec, TmsParams, build_hamiltonian, mhz,
    photon_limits,
)
from .observables import (
    GridSpec, SqueezingTrace, WignerGrid, conditioned_state, entanglement_entropy, joint_wigner_cut,
    squeezing_observer,
)
from .operators import (
    HilbertLayout, QState, fidelity, fock_vector, matrix_exponential, number, product_state, qubit_vector,
)

__all__ = [
    "SCENARIOS", "ScenarioConfig", "SweepSpec", "WignerSpec", "KindRun", "ScenarioResult",
    "SweepResult", "initial_state", "run_kind", "run_single_mode", "run_superposition",
    "run_two_mode", "run_approx_chain", "run_sweep", "run_scenario", "magnus_infidelity", "one_period_error",
    "reference_drive", "reference_tms", "saturation_level", "REFERENCE_CHI_KHZ", "REFERENCE_RABI_MHZ",
    "REFERENCE_G_MHZ", "REFERENCE_DELTA_OMEGA_MHZ",
]

SCENARIOS = ("single_mode", "superposition", "two_mode", "approx_chain", "sweep")

REFERENCE_CHI_KHZ = -50.0
REFERENCE_RABI_MHZ = 40.0
REFERENCE_G_MHZ = 0.16
REFERENCE_DELTA_OMEGA_MHZ = 1.6

K = HamiltonianKind


def reference_drive(**changes) -> DriveParams:
    """Single-mode optimum; keyword overrides go to :class:`DriveParams`."""
    kw = dict(chi=mhz(REFERENCE_CHI_KHZ / 1e3), rabi=mhz(REFERENCE_RABI_MHZ),
              delta_omega=mhz(REFERENCE_DELTA_OMEGA_MHZ), g=mhz(REFERENCE_G_MHZ))
    kw.update(changes)
    if "abar0" in changes:
        kw.pop("g")
    return DriveParams(**kw)


def reference_tms(**changes) -> TmsParams:
    chi = mhz(REFERENCE_CHI_KHZ / 1e3)
    kw = dict(chi_a=chi, chi_b=chi, rabi=mhz(REFERENCE_RABI_MHZ), delta_omega=mhz(REFERENCE_DELTA_OMEGA_MHZ),
              g=mhz(REFERENCE_G_MHZ))
    kw.update(changes)
    if "abar0" in changes:
        kw.pop("g")
    return TmsParams(**kw)


# -- configuration ---------------------------------------------------------------

@dataclass(frozen=True)
class SweepSpec:
    """Grid of (g, delta_omega) points, angular units.

    With ``first_axis = "abar0"`` the first axis lists displacement
    amplitudes instead of couplings.
    """

    g_values: tuple
    delta_omega_values: tuple
    first_axis: str = "g"

    def __post_init__(self):
        if not self.g_values or not self.delta_omega_values:
            raise ConfigError("sweep axes must be nonempty")
        if self.first_axis not in ("g", "abar0"):
            raise ConfigError("first_axis must be 'g' or 'abar0'")

    @classmethod
    def log_spaced(cls, g_mhz=(0.04, 0.4), delta_omega_mhz=(0.4, 4.0), n_g=16, n_dw=16):
        return cls(tuple(mhz(x) for x in np.geomspace(*g_mhz, n_g)),
                   tuple(mhz(x) for x in np.geomspace(*delta_omega_mhz, n_dw)))

    @classmethod
    def linear(cls, g_mhz, delta_omega_mhz, n_g, n_dw):
        return cls(tuple(mhz(x) for x in np.linspace(*g_mhz, n_g)),
                   tuple(mhz(x) for x in np.linspace(*delta_omega_mhz, n_dw)))


@dataclass(frozen=True)
class WignerSpec:
    plane: tuple = ("x_a", "x_b")
    extent: float = 2.0
    points: int = 81


_DEFAULTS = {
    "single_mode": dict(kinds=(K.FULL_DISPLACED,), qubit_init="g", conditions=("qubit_g",),
                        t_end=30e-6, fock_dims=(120,), leakage_abort=1e-6, sample_every=100),
    "superposition": dict(kinds=(K.FULL_DISPLACED, K.EFFECTIVE_SQUEEZING, K.EFFECTIVE_WITH_CORRECTION),
                          qubit_init="+", conditions=("qubit_g", "qubit_e"), t_end=20e-6,
                          fock_dims=(120,), leakage_abort=1e-6, sample_every=100),
    "two_mode": dict(kinds=(K.FULL_DISPLACED,), qubit_init="g", conditions=("qubit_g",), t_end=45e-6,
                     fock_dims=(40, 40), leakage_abort=1e-3, sample_every=1000),
    "approx_chain": dict(kinds=(K.FULL_DISPLACED, K.MODULATED_COUPLING, K.EFFECTIVE_SQUEEZING,
                                K.EFFECTIVE_WITH_CORRECTION),
                         qubit_init="+", conditions=("qubit_g", "qubit_e"), t_end=10e-6,
                         fock_dims=(120,), leakage_abort=1e-6, sample_every=None),
    "sweep": dict(kinds=(K.FULL_DISPLACED,), qubit_init="g", conditions=("qubit_g",), t_end=50e-6,
                  fock_dims=(120,), leakage_abort=1e-6, sample_every=200),
}


@dataclass(frozen=True)
class ScenarioConfig:
    """Everything needed to run (and rerun) one scenario.

    Fields left as ``None`` take the scenario defaults when the config is
    passed through :meth:`resolved`.
    """

    scenario: str
    params: object
    t_end: Optional[float] = None
    dt: float = 0.5e-9
    sample_every: Optional[int] = None
    t_start: float = 0.0
    fock_dims: Optional[tuple] = None
    kinds: Optional[tuple] = None
    conditions: Optional[tuple] = None
    qubit_init: Optional[str] = None
    leakage_abort: Optional[float] = None
    norm_tol: float = 1e-6
    n_target: float = 1.0
    sweep: Optional[SweepSpec] = None
    wigner: WignerSpec = WignerSpec()
    workers: int = 1

    def resolved(self) -> "ScenarioConfig":
        if self.scenario not in SCENARIOS:
            raise ConfigError(f"unknown scenario {self.scenario!r}; expected one of {SCENARIOS}")
        d = _DEFAULTS[self.scenario]
        kinds = tuple(K.parse(k) for k in (self.kinds or d["kinds"]))
        cfg = replace(
            self,
            t_end=self.t_end if self.t_end is not None else d["t_end"],
            fock_dims=tuple(int(x) for x in (self.fock_dims or d["fock_dims"])),
            kinds=kinds,
            conditions=tuple(self.conditions or d["conditions"]),
            qubit_init=self.qubit_init or d["qubit_init"],
            leakage_abort=self.leakage_abort if self.leakage_abort is not None else d["leakage_abort"],
        )
        if cfg.sample_every is None:
            every = d["sample_every"]
            if every is None:  # one sample per modulation period
                every = max(1, int(round(2 * math.pi / cfg.params.delta_omega / cfg.dt)))
            cfg = replace(cfg, sample_every=every)
        if cfg.scenario == "sweep" and cfg.sweep is None:
            cfg = replace(cfg, sweep=SweepSpec.log_spaced())
        cfg.validate()
        return cfg

    @property
    def mode_count(self) -> int:
        return 2 if isinstance(self.params, TmsParams) else 1

    def validate(self):
        want = 2 if self.scenario == "two_mode" else 1
        if self.mode_count != want:
            raise ConfigError(f"scenario {self.scenario} needs {want}-mode parameters")
        if len(self.fock_dims) != want:
            raise ConfigError(f"scenario {self.scenario} needs {want} Fock dimension(s)")
        for c in self.conditions:
            if c not in ("none", "qubit_g", "qubit_e"):
                raise ConfigError(f"unknown condition {c!r}")
        if self.qubit_init not in ("g", "e", "+", "-"):
            raise ConfigError(f"unknown qubit initial state {self.qubit_init!r}")
        for k in self.kinds:
            HamiltonianSpec(k, self.mode_count, self.params)
        if self.workers < 1:
            raise ConfigError("workers must be positive")
        grid = self.grid()
        if any(FRAME_OF[k] != "effective" for k in self.kinds):
            grid.check_resolves(self.params.rabi)

    def grid(self) -> TimeGrid:
        return TimeGrid(self.t_start, self.t_end, self.dt, self.sample_every)

    def layout(self) -> HilbertLayout:
        return HilbertLayout.qubit_modes(*self.fock_dims)


# -- single runs -----------------------------------------------------------------

def initial_state(params, layout: HilbertLayout, qubit_init: str, frame: str) -> QState:
    """Effective-frame ``|qubit_init> (x) |0...0>`` mapped into ``frame`` at ``t = 0``."""
    comps = [qubit_vector(qubit_init)] + [fock_vector(layout.dims[i], 0) for i in layout.fock_indices]
    psi = product_state(layout, comps)
    if frame == "effective":
        return psi
    return frame_transform(params, layout, "effective", frame).apply(0.0, psi).normalized()


@dataclass
class KindRun:
    """Result of evolving one Hamiltonian kind.

    ``traces`` maps each condition to its :class:`SqueezingTrace`;
    ``photon_number`` is the oscillator occupation ``<n>`` (summed over
    modes) in the frame of the kind.  ``guard_flags`` lists guard events.
    """

    kind: HamiltonianKind
    frame: str
    status: str
    message: str
    traces: dict
    times: np.ndarray
    photon_number: np.ndarray
    entropy: np.ndarray
    leakage: np.ndarray
    norm_drift: np.ndarray
    guard_flags: list = field(default_factory=list)
    record: Optional[EvolutionRecord] = None

    @property
    def ok(self) -> bool:
        return self.status == "ok"

    def summary(self) -> dict:
        out = {"kind": self.kind.value, "frame": self.frame, "status": self.status, "message": self.message,
               "guard_flags": list(self.guard_flags),
               "max_leakage": float(np.max(self.leakage)) if len(self.leakage) else None,
               "max_norm_drift": float(np.max(self.norm_drift)) if len(self.norm_drift) else None,
               "peak_photon_number": float(np.max(self.photon_number)) if len(self.photon_number) else None}
        for c, tr in self.traces.items():
            if len(tr):
                db, t, _ = tr.peak()
                out[f"peak_db[{c}]"] = db
                out[f"t_peak_us[{c}]"] = t * 1e6
        return out


def _observer(layout, conditions, frame, modes):
    sq = {c: squeezing_observer(modes, c, frame) for c in conditions}
    nops = [number(layout, i).sparse() for i in layout.fock_indices]
    q = layout.qubit_index

    def observe(t, state):
        v = state.vector
        n = sum(np.vdot(v, m @ v).real for m in nops)
        ent = entanglement_entropy(state, [q]) if q is not None else 0.0
        return {c: f(t, state) for c, f in sq.items()}, n, ent

    return observe


def run_kind(config: ScenarioConfig, kind, *, keep_states: bool = False, modes=None) -> KindRun:
    """Evolve one kind under ``config`` and collect conditioned squeezing on the fly.

    Guard aborts do not raise: the partial trace is returned with
    ``status`` set to the guard name.
    """
    cfg = config if config.kinds is not None else config.resolved()
    kind = K.parse(kind)
    layout = cfg.layout()
    spec = HamiltonianSpec(kind, cfg.mode_count, cfg.params)
    frame = FRAME_OF[kind]
    gen = build_hamiltonian(spec, layout, n_target=cfg.n_target)
    psi0 = initial_state(cfg.params, layout, cfg.qubit_init, frame)
    if modes is None:
        modes = layout.fock_indices if cfg.mode_count == 2 else layout.fock_indices[0]
    ms = (int(modes),) if np.ndim(modes) == 0 else tuple(modes)
    obs = _observer(layout, cfg.conditions, frame, ms)
    status, message = "ok", ""
    try:
        rec = evolve(gen, psi0, cfg.grid(), norm_tol=cfg.norm_tol, leakage_tol=cfg.leakage_abort,
                     observer=obs, keep_states=keep_states)
    except GuardAbort as exc:
        rec = exc.record
        status, message = rec.status, str(exc)
    samples = rec.observations
    traces = {}
    for c in cfg.conditions:
        traces[c] = SqueezingTrace.from_samples(rec.times, [s[0][c] for s in samples], c, ms, frame,
                                                rec.leakage, rec.norm_drift)
    photons = np.array([s[1] for s in samples])
    run = KindRun(kind, frame, status, message, traces, rec.times, photons,
                  np.array([s[2] for s in samples]), rec.leakage, rec.norm_drift,
                  record=rec if keep_states else None)
    limit = min(photon_limits(cfg.params))
    if len(photons) and photons.max() > limit:
        run.guard_flags.append(f"peak photon number {photons.max():.4g} exceeds limit {limit:.4g}")
    if status != "ok":
        run.guard_flags.append(message)
    return run


@dataclass
class ScenarioResult:
    scenario: str
    config: ScenarioConfig
    runs: dict
    extras: dict = field(default_factory=dict)

    @property
    def status(self) -> str:
        return "ok" if all(r.ok for r in self.runs.values()) else "guard_abort"

    def summary(self) -> dict:
        return {"scenario": self.scenario, "status": self.status,
                "runs": {k.value if hasattr(k, "value") else str(k): r.summary() for k, r in self.runs.items()},
                **{k: v for k, v in self.extras.items() if _jsonable(v)}}


def _jsonable(v) -> bool:
    return isinstance(v, (int, float, str, bool, type(None), list, dict, tuple))


def _run_kinds(cfg, keep_states=False, modes=None):
    return {k: run_kind(cfg, k, keep_states=keep_states, modes=modes) for k in cfg.kinds}


def run_single_mode(config: ScenarioConfig) -> ScenarioResult:
    """Single-mode conditional squeezing from qubit ``g`` and vacuum."""
    cfg = config.resolved()
    return ScenarioResult("single_mode", cfg, _run_kinds(cfg))


def saturation_level(trace_g: SqueezingTrace, trace_e: SqueezingTrace, period: float) -> float:
    """Largest one-period moving average of the outcome-averaged conditioned dB."""
    t = trace_g.times
    if len(t) < 2:
        return float(np.mean([trace_g.squeeze_db, trace_e.squeeze_db]))
    avg = 0.5 * (trace_g.squeeze_db + trace_e.squeeze_db)
    w = max(1, int(round(period / (t[1] - t[0]))))
    if w >= len(avg):
        return float(avg.mean())
    kernel = np.ones(w) / w
    return float(np.convolve(avg, kernel, mode="valid").max())


def _max_deviation(a: SqueezingTrace, b: SqueezingTrace, t_max: float) -> float:
    n = min(len(a), len(b))
    m = a.times[:n] <= t_max * (1 + 1e-12)
    return float(np.max(np.abs(a.squeeze_db[:n][m] - b.squeeze_db[:n][m])))


def run_superposition(config: ScenarioConfig, compare_until: float = 10e-6) -> ScenarioResult:
    """Qubit ``+``: both conditioned traces, entropy and effective-model deviations."""
    cfg = config.resolved()
    runs = _run_kinds(cfg)
    extras = {}
    period = 2 * math.pi / cfg.params.delta_omega
    full = runs.get(K.FULL_DISPLACED)
    if full is not None and {"qubit_g", "qubit_e"} <= set(full.traces):
        extras["saturation_db"] = saturation_level(full.traces["qubit_g"], full.traces["qubit_e"], period)
        for k in (K.EFFECTIVE_SQUEEZING, K.EFFECTIVE_WITH_CORRECTION, K.MODULATED_COUPLING):
            if k in runs:
                dev = max(_max_deviation(full.traces[c], runs[k].traces[c], compare_until)
                          for c in ("qubit_g", "qubit_e"))
                extras[f"max_dev_db[{k.value}]"] = dev
    return ScenarioResult("superposition", cfg, runs, extras)


def run_two_mode(config: ScenarioConfig) -> ScenarioResult:
    """Two-mode squeezing from qubit ``g``; joint Wigner cut at the squeezing peak."""
    cfg = config.resolved()
    runs = {k: run_kind(cfg, k, keep_states=True) for k in cfg.kinds}
    extras = {}
    first = runs[cfg.kinds[0]]
    cond = cfg.conditions[0]
    tr = first.traces[cond]
    if len(tr) and first.record is not None:
        db, t, i = tr.peak()
        state = first.record.states[i]
        if cond != "none":
            state, _ = conditioned_state(state, cond[-1], first.frame)
        ws = cfg.wigner
        try:
            extras["wigner"] = joint_wigner_cut(state, ws.plane, GridSpec.square(ws.extent, ws.points))
            extras["wigner_time_us"] = t * 1e6
        except TruncationError as exc:
            extras["wigner_error"] = str(exc)
    for r in runs.values():
        r.record = None
    return ScenarioResult("two_mode", cfg, runs, extras)


def run_approx_chain(config: ScenarioConfig) -> ScenarioResult:
    """Same initial state under several kinds; fidelities in the effective frame.

    ``extras["fidelity"]`` maps ``"kindA|kindB"`` to the fidelity at each
    sample, ``extras["stroboscopic"]`` flags samples at whole modulation
    periods, and ``extras["max_dev_db[...]"]`` the largest conditioned dB
    deviation from the first kind.
    """
    cfg = config.resolved()
    layout = cfg.layout()
    runs = {k: run_kind(cfg, k, keep_states=True) for k in cfg.kinds}
    mapped = {}
    for k, r in runs.items():
        tr = frame_transform(cfg.params, layout, r.frame, "effective")
        mapped[k] = [tr.apply(t, s) for t, s in zip(r.record.times, r.record.states)]
    n = min(len(v) for v in mapped.values())
    times = runs[cfg.kinds[0]].times[:n]
    period = 2 * math.pi / cfg.params.delta_omega
    phase = np.abs((times / period) - np.round(times / period)) * period
    extras = {"times_us": (times * 1e6).tolist(),
              "stroboscopic": (phase <= cfg.grid().step * 0.5 + 1e-15).tolist(), "fidelity": {}}
    kinds = list(cfg.kinds)
    for i, a in enumerate(kinds):
        for b in kinds[i + 1:]:
            extras["fidelity"][f"{a.value}|{b.value}"] = [fidelity(x, y) for x, y in zip(mapped[a][:n], mapped[b][:n])]
    ref = runs[kinds[0]]
    for k in kinds[1:]:
        extras[f"max_dev_db[{k.value}]"] = max(
            _max_deviation(ref.traces[c], runs[k].traces[c], cfg.t_end) for c in cfg.conditions)
    for r in runs.values():
        r.record = None
    return ScenarioResult("approx_chain", cfg, runs, extras)


def magnus_infidelity(ratios: Sequence[float], n_periods: int = 10, fock_dim: int = 40,
                      qubit_init: str = "g", delta_omega: float = None, steps_per_period: int = 400):
    """Worst stroboscopic infidelity over ``n_periods`` between the modulated
    coupling and the first-order effective Hamiltonian, per ``g/delta_omega``.
    """
    if delta_omega is None:
        delta_omega = mhz(REFERENCE_DELTA_OMEGA_MHZ)
    layout = HilbertLayout.qubit_modes(fock_dim)
    period = 2 * math.pi / delta_omega
    out = []
    for r in ratios:
        p = reference_drive(g=r * delta_omega, delta_omega=delta_omega)
        psi0 = initial_state(p, layout, qubit_init, "effective")
        ends = []
        for kind in (K.MODULATED_COUPLING, K.EFFECTIVE_SQUEEZING):
            h = build_hamiltonian(HamiltonianSpec(kind, 1, p), layout)
            rec = evolve_stroboscopic(h, psi0, period, n_periods, steps_per_period=steps_per_period,
                                      leakage_tol=None)
            ends.append(rec.states)
        out.append(max(1.0 - fidelity(a, b) for a, b in zip(*ends)))
    return np.array(out)


def one_period_error(ratio: float, fock_dim: int = 40, n_low: int = 8, delta_omega: float = None,
                     steps_per_period: int = 400) -> float:
    """Operator-norm distance over one modulation period between the
    modulated-coupling propagator and ``exp(-i H_eff T)``.

    Only the columns with oscillator level below ``n_low`` are compared, so
    the truncation edge does not enter.
    """
    if delta_omega is None:
        delta_omega = mhz(REFERENCE_DELTA_OMEGA_MHZ)
    layout = HilbertLayout.qubit_modes(fock_dim)
    p = reference_drive(g=ratio * delta_omega, delta_omega=delta_omega)
    period = 2 * math.pi / delta_omega
    mod = build_hamiltonian(HamiltonianSpec(K.MODULATED_COUPLING, 1, p), layout)
    eff = build_hamiltonian(HamiltonianSpec(K.EFFECTIVE_SQUEEZING, 1, p), layout)
    u_eff = matrix_exponential(eff.constant, -1j * period).dense()
    cols = []
    for q in ("g", "e"):
        for n in range(n_low):
            psi0 = product_state(layout, [qubit_vector(q), fock_vector(fock_dim, n)])
            rec = evolve_stroboscopic(mod, psi0, period, 1, steps_per_period=steps_per_period,
                                      leakage_tol=None, keep_states=True)
            idx = int(np.flatnonzero(psi0.vector)[0])
            cols.append(rec.final_state.vector - u_eff[:, idx])
    return float(np.linalg.norm(np.array(cols).T, 2))


# -- sweeps ----------------------------------------------------------------------

@dataclass
class SweepResult:
    """Max squeezing over a (g, delta_omega) grid.

    ``max_squeeze_db`` and ``t_at_max`` are ``nan`` where ``mask`` is set
    (the point was aborted by a guard); ``point_status`` holds the reason.
    """

    g_values: np.ndarray
    delta_omega_values: np.ndarray
    max_squeeze_db: np.ndarray
    t_at_max: np.ndarray
    mask: np.ndarray
    point_status: np.ndarray
    first_axis: str = "g"

    @property
    def status(self) -> str:
        if self.mask.all():
            return "no feasible points"
        return "ok" if not self.mask.any() else "partial"

    def argmax(self):
        """``(i, j)`` of the best unmasked point, or ``None``."""
        if self.mask.all():
            return None
        v = np.where(self.mask, -np.inf, self.max_squeeze_db)
        return tuple(int(x) for x in np.unravel_index(np.argmax(v), v.shape))


def _sweep_point(args):
    cfg, kind = args
    try:
        run = run_kind(cfg, kind)
    except (ConfigError, TruncationError, NumericalError) as exc:
        return math.nan, math.nan, f"error: {exc}"
    tr = run.traces[cfg.conditions[0]]
    if not run.ok:
        return math.nan, math.nan, run.status
    db, t, _ = tr.peak()
    return db, t, "ok"


def _point_params(params, first, dw, axis):
    if axis == "g":
        return params.replace(g=first, delta_omega=dw)
    return params.replace(abar0=first, delta_omega=dw)


def run_sweep(config: ScenarioConfig) -> SweepResult:
    """Evaluate the single-mode scenario at every sweep point.

    Points run as independent jobs on up to ``config.workers`` processes;
    results are placed by job index, so scheduling cannot change them.
    """
    cfg = config.resolved()
    sw = cfg.sweep
    kind = cfg.kinds[0]
    jobs, index = [], []
    for i, first in enumerate(sw.g_values):
        for j, dw in enumerate(sw.delta_omega_values):
            index.append((i, j))
            try:
                p = _point_params(cfg.params, first, dw, sw.first_axis)
                pc = replace(cfg, params=p, scenario="sweep", sample_every=cfg.sample_every)
                pc.validate()
                jobs.append((pc, kind))
            except ConfigError as exc:
                jobs.append(str(exc))
    runnable = [(n, j) for n, j in enumerate(jobs) if not isinstance(j, str)]
    results = [None] * len(jobs)
    for n, j in enumerate(jobs):
        if isinstance(j, str):
            results[n] = (math.nan, math.nan, f"error: {j}")
    if cfg.workers > 1 and len(runnable) > 1:
        with ProcessPoolExecutor(max_workers=min(cfg.workers, os.cpu_count() or 1, len(runnable))) as ex:
            for (n, _), res in zip(runnable, ex.map(_sweep_point, [j for _, j in runnable])):
                results[n] = res
    else:
        for n, j in runnable:
            results[n] = _sweep_point(j)
    shape = (len(sw.g_values), len(sw.delta_omega_values))
    db = np.full(shape, np.nan)
    tt = np.full(shape, np.nan)
    st = np.empty(shape, dtype=object)
    for (i, j), (d, t, s) in zip(index, results):
        st[i, j] = s
        if s == "ok":
            db[i, j], tt[i, j] = d, t
    return SweepResult(np.array(sw.g_values), np.array(sw.delta_omega_values), db, tt,
                       st != "ok", st, sw.first_axis)


def run_scenario(config: ScenarioConfig):
    """Dispatch on ``config.scenario``."""
    table = {"single_mode": run_single_mode, "superposition": run_superposition,
             "two_mode": run_two_mode, "approx_chain": run_approx_chain, "sweep": run_sweep}
    try:
        fn = table[config.scenario]
    except KeyError:
        raise ConfigError(f"unknown scenario {config.scenario!r}") from None
    return fn(config)
