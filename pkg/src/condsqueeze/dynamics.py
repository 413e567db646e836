"""Fixed-step integration of the time-dependent Schrodinger equation."""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Any, Callable, Optional

import numpy as np

from .errors import ConfigError, LayoutError, LeakageAbort, NormDriftAbort
from .frames import FrameTransform
from .model import TimeDependentOperator
from .operators import HilbertLayout, QState

__all__ = [
    "TimeGrid", "EvolutionRecord", "evolve", "evolve_stroboscopic", "frame_map",
    "leakage", "default_dt", "NORM_TOL", "LEAKAGE_TOL",
]

NORM_TOL = 1e-6
LEAKAGE_TOL = 1e-6
STEPS_PER_FAST_PERIOD = 50


@dataclass(frozen=True)
class TimeGrid:
    """Uniform step grid; a sample is emitted every ``sample_every`` steps.

    The step count is ``round((t_end - t_start)/dt)`` and the step actually
    used (:attr:`step`) spreads any rounding evenly, so the last sample
    lands on ``t_end`` exactly.
    """

    t_start: float
    t_end: float
    dt: float
    sample_every: int = 1

    def __post_init__(self):
        if not self.dt > 0:
            raise ConfigError("dt must be positive")
        if not self.t_end > self.t_start:
            raise ConfigError("t_end must exceed t_start")
        if int(self.sample_every) != self.sample_every or self.sample_every < 1:
            raise ConfigError("sample_every must be a positive integer")

    @property
    def n_steps(self) -> int:
        return max(1, int(round((self.t_end - self.t_start) / self.dt)))

    @property
    def step(self) -> float:
        return (self.t_end - self.t_start) / self.n_steps

    def sample_steps(self) -> np.ndarray:
        idx = np.arange(0, self.n_steps + 1, self.sample_every)
        if idx[-1] != self.n_steps:
            idx = np.append(idx, self.n_steps)
        return idx

    def sample_times(self) -> np.ndarray:
        return self.t_start + self.sample_steps() * self.step

    def check_resolves(self, frequency: float, per_period: int = STEPS_PER_FAST_PERIOD):
        """Raise unless ``step <= (2 pi / frequency) / per_period``."""
        if frequency > 0 and self.step > 2 * math.pi / frequency / per_period * (1 + 1e-9):
            raise ConfigError(
                f"dt={self.step:.3g} s does not resolve frequency {frequency:.4g} rad/s "
                f"(need <= {2 * math.pi / frequency / per_period:.3g} s)")


def default_dt(generator: TimeDependentOperator, span: float,
               per_period: int = STEPS_PER_FAST_PERIOD, min_steps: int = 64) -> float:
    """Step tied to the fastest frequency of ``generator``."""
    if generator.fastest_frequency > 0:
        return min(2 * math.pi / generator.fastest_frequency / per_period, span / min_steps)
    return span / min_steps


@dataclass
class EvolutionRecord:
    """Sampled output of one integration.

    ``norm_drift[k]`` is the largest per-step ``| ||psi|| - 1 |`` seen
    since the previous sample.  ``observations`` holds whatever the
    optional observer returned at each sample.
    """

    layout: HilbertLayout
    times: np.ndarray
    states: list
    leakage: np.ndarray
    norm_drift: np.ndarray
    observations: list = field(default_factory=list)
    status: str = "ok"
    message: str = ""

    @property
    def failed(self) -> bool:
        return self.status != "ok"

    @property
    def final_state(self) -> QState:
        return self.states[-1]

    def __len__(self):
        return len(self.times)


def leakage(state: QState) -> float:
    """Population with any Fock factor at a level ``>= ceil(0.9 dim)``.

    The band always holds at least the top level, so tiny truncations are
    guarded too.
    """
    idx = state.layout.fock_indices
    if not idx:
        return 0.0
    p = np.abs(state.tensor()) ** 2
    keep = np.ones(p.shape, dtype=bool)
    for i in idx:
        d = state.layout.dims[i]
        cut = min(int(math.ceil(0.9 * d)), d - 1)
        shape = [1] * p.ndim
        shape[i] = d
        keep &= (np.arange(d) < cut).reshape(shape)
    return float(p[~keep].sum())


def evolve(generator: TimeDependentOperator, psi0: QState, grid: TimeGrid, *,
           norm_tol: float = NORM_TOL, leakage_tol: Optional[float] = LEAKAGE_TOL,
           observer: Optional[Callable[[float, QState], Any]] = None,
           keep_states: bool = True) -> EvolutionRecord:
    """Classical RK4 integration of ``d psi/dt = -i H(t) psi``.

    The state is renormalized after every step.  Exceeding ``norm_tol``
    raises :class:`NormDriftAbort`; exceeding ``leakage_tol`` at a sample
    raises :class:`LeakageAbort`.  Both carry the partial record.
    ``leakage_tol=None`` disables the leakage guard.
    """
    if psi0.layout != generator.layout:
        raise LayoutError("initial state and generator live on different layouts")
    if abs(psi0.norm() - 1) > 1e-10:
        raise ConfigError(f"initial state is not normalized (norm {psi0.norm():.12g})")

    h = generator.apply
    dt = grid.step
    t0 = grid.t_start
    samples = set(grid.sample_steps().tolist())
    layout = psi0.layout
    rec = EvolutionRecord(layout, np.empty(0), [], np.empty(0), np.empty(0))
    times, leaks, drifts = [], [], []

    def emit(k, psi, drift):
        t = t0 + k * dt
        st = QState(layout, psi)
        times.append(t)
        leaks.append(leakage(st))
        drifts.append(drift)
        if keep_states:
            rec.states.append(st)
        if observer is not None:
            rec.observations.append(observer(t, st))

    def finish(status="ok", message=""):
        rec.times = np.array(times)
        rec.leakage = np.array(leaks)
        rec.norm_drift = np.array(drifts)
        rec.status, rec.message = status, message
        return rec

    psi = np.array(psi0.vector, dtype=complex)
    emit(0, psi, 0.0)
    worst = 0.0
    half = 0.5 * dt
    for k in range(grid.n_steps):
        t = t0 + k * dt
        k1 = -1j * h(t, psi)
        k2 = -1j * h(t + half, psi + half * k1)
        k3 = -1j * h(t + half, psi + half * k2)
        k4 = -1j * h(t + dt, psi + dt * k3)
        psi = psi + (dt / 6) * (k1 + 2 * k2 + 2 * k3 + k4)
        nrm = np.linalg.norm(psi)
        drift = abs(nrm - 1.0)
        if not np.isfinite(nrm) or drift > norm_tol:
            msg = f"norm drift {drift:.3g} exceeds {norm_tol:.3g} at t={t + dt:.6g} s"
            raise NormDriftAbort(msg, finish("norm_drift", msg))
        psi /= nrm
        worst = max(worst, drift)
        if k + 1 in samples:
            emit(k + 1, psi, worst)
            worst = 0.0
            if leakage_tol is not None and leaks[-1] > leakage_tol:
                msg = f"leakage {leaks[-1]:.3g} exceeds {leakage_tol:.3g} at t={times[-1]:.6g} s"
                raise LeakageAbort(msg, finish("leakage", msg))
    return finish()


def evolve_stroboscopic(generator: TimeDependentOperator, psi0: QState, period: float,
                        n_periods: int, *, steps_per_period: Optional[int] = None,
                        **kwargs) -> EvolutionRecord:
    """Evolve and sample at ``t = k * period`` for ``k = 0 .. n_periods``."""
    if not period > 0:
        raise ConfigError("period must be positive")
    if int(n_periods) != n_periods or n_periods < 0:
        raise ConfigError("n_periods must be a non-negative integer")
    n_periods = int(n_periods)
    if n_periods == 0:
        return EvolutionRecord(psi0.layout, np.array([0.0]), [psi0], np.array([leakage(psi0)]),
                               np.array([0.0]))
    if steps_per_period is None:
        steps_per_period = max(64, int(math.ceil(period / default_dt(generator, period))))
    grid = TimeGrid(0.0, n_periods * period, period / steps_per_period, steps_per_period)
    return evolve(generator, psi0, grid, **kwargs)


def frame_map(record: EvolutionRecord, transform: FrameTransform, *,
              inverse: bool = False) -> EvolutionRecord:
    """Apply ``U(t)`` (or ``U(t)^dag``) to every stored snapshot.

    Leakage is recomputed in the new frame; norm drift is carried over.
    """
    if transform.layout != record.layout:
        raise LayoutError("record and transform live on different layouts")
    if len(record.states) != len(record.times):
        raise ConfigError("record holds no state snapshots")
    states = [transform.apply(t, s, inverse=inverse) for t, s in zip(record.times, record.states)]
    return EvolutionRecord(record.layout, record.times.copy(), states,
                           np.array([leakage(s) for s in states]), record.norm_drift.copy(),
                           list(record.observations), record.status, record.message)
