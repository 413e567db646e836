"""Measured quantities: conditioned quadrature squeezing, entropies and Wigner functions.

Quadratures follow ``X_theta = (a e^{-i theta} + a^dag e^{i theta})/2`` so
the vacuum variance of a single mode is ``1/4``.  Joint squeezing of two
modes uses ``c = a + b`` in the same formula (vacuum variance ``1/2``).
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional, Sequence, Union

import numpy as np
import scipy.linalg
from scipy.integrate import trapezoid

from .errors import LayoutError, PostSelectionError, TruncationError
from .operators import HilbertLayout, QOperator, QState, annihilator

__all__ = [
    "quadrature", "conditioned_state", "SqueezingPoint", "SqueezingTrace", "SqueezingSample",
    "outcome_probabilities",
    "squeezing_point", "squeezing_trace", "squeezing_observer", "two_mode_quadratures",
    "entanglement_entropy", "GridSpec", "WignerGrid", "wigner", "joint_wigner_cut",
    "squeeze_db", "antisqueeze_db", "CONDITIONS",
]

CONDITIONS = ("none", "qubit_g", "qubit_e")
SWEEP_STEP = math.radians(0.5)
_HAD_ROWS = {"g": np.array([-1, 1]) / math.sqrt(2), "e": np.array([1, 1]) / math.sqrt(2)}


def squeeze_db(var, vacuum: float = 0.25):
    return -10 * np.log10(np.asarray(var) / vacuum)


def antisqueeze_db(var, vacuum: float = 0.25):
    return 10 * np.log10(np.asarray(var) / vacuum)


def quadrature(layout: HilbertLayout, factor_index: int, theta: float) -> QOperator:
    """``X_theta`` of one Fock factor; ``theta = pi/2`` gives ``P``."""
    a = annihilator(layout, factor_index)
    x = a * (0.5 * np.exp(-1j * theta))
    return x + x.dag()


def two_mode_quadratures(layout: HilbertLayout, modes: Sequence[int] = None):
    """``(X_plus, P_plus, X_minus, P_minus)`` for a pair of Fock factors."""
    if modes is None:
        modes = layout.fock_indices
        if len(modes) != 2:
            raise LayoutError(f"need exactly two Fock factors, layout has {len(modes)}")
    i, j = modes
    xa, xb = quadrature(layout, i, 0.0), quadrature(layout, j, 0.0)
    pa, pb = quadrature(layout, i, math.pi / 2), quadrature(layout, j, math.pi / 2)
    return xa + xb, pa + pb, xa - xb, pa - pb


def conditioned_state(state: QState, outcome: str, frame: str = "effective"):
    """Project the qubit onto ``outcome`` and renormalize.

    In the ``effective`` frame the conditioning basis is the sigma_z
    eigenbasis.  For ``displaced`` or ``driven`` states the qubit is first
    relabelled by the Hadamard map, which is the same as projecting onto
    ``(|e> -+ |g>)/sqrt(2)``; the oscillator part is left untouched, so
    variances agree with the effective frame while quadrature angles and
    (in the driven frame) the coherent offset do not.

    Returns ``(state, probability)``.
    """
    q = state.layout.require_qubit()
    if outcome not in ("g", "e"):
        raise ValueError(f"qubit outcome must be 'g' or 'e', got {outcome!r}")
    if frame == "effective":
        row = np.array([1.0, 0.0]) if outcome == "g" else np.array([0.0, 1.0])
    elif frame in ("displaced", "driven"):
        row = _HAD_ROWS[outcome]
    else:
        raise ValueError(f"unknown conditioning frame {frame!r}")
    t = np.moveaxis(state.tensor(), q, 0)
    comp = np.tensordot(row.conj(), t, axes=(0, 0))
    p = float(np.vdot(comp, comp).real)
    if p <= 1e-12:
        raise PostSelectionError(f"outcome {outcome!r} has probability {p:.3g}")
    full = np.multiply.outer(row, comp / math.sqrt(p))
    return QState(state.layout, np.moveaxis(full, 0, q).reshape(-1)), min(p, 1.0)


# -- squeezing -------------------------------------------------------------------

@dataclass(frozen=True)
class SqueezingPoint:
    var_min: float
    var_max: float
    theta_min: float
    var_x: float
    var_p: float


def _moments(state: QState, modes):
    v = state.vector
    c = None
    for m in modes:
        op = annihilator(state.layout, m).sparse()
        c = op if c is None else c + op
    cv = c @ v
    cdv = c.conj().T @ v
    mean = np.vdot(v, cv)
    return (np.vdot(cdv, cdv).real, np.vdot(cv, cv).real, np.vdot(cdv, cv), mean)


def _variance_curve(mom):
    """Coefficients of ``Var(theta) = C + Re(exp(-2 i theta) Z)``."""
    ccd, cdc, c2, mean = mom
    const = 0.25 * (ccd + cdc) - 0.5 * abs(mean) ** 2
    z = 0.5 * (c2 - mean ** 2)
    return const, z


def _angle_minimum(const, z):
    """Grid sweep over [0, pi) at SWEEP_STEP, parabolic refinement, exact re-evaluation."""
    f = lambda th: const + np.real(np.exp(-2j * th) * z)
    n = int(math.ceil(math.pi / SWEEP_STEP))
    grid = np.arange(n) * (math.pi / n)
    vals = f(grid)
    k = int(np.argmin(vals))
    h = math.pi / n
    y0, y1, y2 = vals[k - 1], vals[k], vals[(k + 1) % n]
    den = y0 - 2 * y1 + y2
    shift = 0.5 * (y0 - y2) / den if den > 0 else 0.0
    theta = (grid[k] + shift * h) % math.pi
    return float(theta), float(f(theta)), float(f(theta + math.pi / 2))


def squeezing_point(state: QState, modes: Union[int, Sequence[int]]) -> SqueezingPoint:
    """Angle-optimized quadrature variance of one mode, or of a sum of modes."""
    modes = (modes,) if isinstance(modes, (int, np.integer)) else tuple(modes)
    for m in modes:
        state.layout.check_fock(m)
    const, z = _variance_curve(_moments(state, modes))
    theta, vmin, vmax = _angle_minimum(const, z)
    vx = const + z.real
    vp = const - z.real
    return SqueezingPoint(vmin, max(vmax, vmin), theta, float(vx), float(vp))


@dataclass
class SqueezingTrace:
    """Per-sample squeezing of a record.

    ``vacuum`` is the vacuum variance of the analysed quadrature (1/4 for
    one mode, 1/2 for a two-mode sum).  ``var_x``/``var_p`` are the fixed
    ``theta = 0`` and ``theta = pi/2`` variances.  ``p_g``/``p_e`` are the
    qubit outcome probabilities in the conditioning frame (``nan`` without
    a qubit) and ``post_select_prob`` the probability of ``condition``.
    """

    times: np.ndarray
    var_min: np.ndarray
    var_max: np.ndarray
    theta_min: np.ndarray
    condition: str
    post_select_prob: np.ndarray
    var_x: np.ndarray
    var_p: np.ndarray
    p_g: np.ndarray
    p_e: np.ndarray
    modes: tuple = (1,)
    frame: str = "effective"
    vacuum: float = 0.25
    leakage: Optional[np.ndarray] = None
    norm_drift: Optional[np.ndarray] = None

    @property
    def squeeze_db(self) -> np.ndarray:
        return squeeze_db(self.var_min, self.vacuum)

    @property
    def antisqueeze_db(self) -> np.ndarray:
        return antisqueeze_db(self.var_max, self.vacuum)

    def peak(self):
        """``(squeeze_db, time, index)`` at the largest squeezing."""
        db = self.squeeze_db
        i = int(np.argmax(db))
        return float(db[i]), float(self.times[i]), i

    def __len__(self):
        return len(self.times)

    @classmethod
    def from_samples(cls, times, samples, condition, modes, frame, leakage=None, norm_drift=None):
        """Assemble from the outputs of :func:`squeezing_observer`."""
        pts = [s.point for s in samples]
        arr = lambda name: np.array([getattr(p, name) for p in pts], dtype=float)
        modes = tuple(modes)
        col = lambda name: np.array([getattr(s, name) for s in samples], dtype=float)
        return cls(np.asarray(times, dtype=float), arr("var_min"), arr("var_max"), arr("theta_min"),
                   condition, col("prob"), arr("var_x"), arr("var_p"), col("p_g"), col("p_e"),
                   modes, frame, 0.25 * len(modes),
                   None if leakage is None else np.asarray(leakage, dtype=float),
                   None if norm_drift is None else np.asarray(norm_drift, dtype=float))


@dataclass(frozen=True)
class SqueezingSample:
    point: SqueezingPoint
    prob: float
    p_g: float
    p_e: float


def _normalize_modes(layout, modes):
    if modes is None or modes == "joint":
        modes = layout.fock_indices if modes == "joint" else layout.fock_indices[:1]
    return (modes,) if isinstance(modes, (int, np.integer)) else tuple(modes)


def outcome_probabilities(state: QState, frame: str = "effective"):
    """``(p_g, p_e)`` in the conditioning basis of ``frame``."""
    q = state.layout.require_qubit()
    t = np.moveaxis(state.tensor(), q, 0).reshape(2, -1)
    if frame in ("displaced", "driven"):
        t = np.stack([_HAD_ROWS["g"] @ t, _HAD_ROWS["e"] @ t])
    elif frame != "effective":
        raise ValueError(f"unknown conditioning frame {frame!r}")
    pg = float(np.vdot(t[0], t[0]).real)
    pe = float(np.vdot(t[1], t[1]).real)
    return pg, pe


def squeezing_observer(modes, condition: str = "none", frame: str = "effective"):
    """Callable ``(t, state) -> SqueezingSample`` for on-the-fly use with ``evolve``."""
    if condition not in CONDITIONS:
        raise ValueError(f"condition must be one of {CONDITIONS}")

    def observe(t, state):
        ms = _normalize_modes(state.layout, modes)
        if state.layout.qubit_index is None:
            if condition != "none":
                raise LayoutError("conditioning needs a qubit factor")
            return SqueezingSample(squeezing_point(state, ms), 1.0, math.nan, math.nan)
        pg, pe = outcome_probabilities(state, frame)
        if condition == "none":
            return SqueezingSample(squeezing_point(state, ms), 1.0, pg, pe)
        st, p = conditioned_state(state, condition[-1], frame)
        return SqueezingSample(squeezing_point(st, ms), p, pg, pe)

    return observe


def squeezing_trace(record, modes=None, condition: str = "none", frame: str = "effective") -> SqueezingTrace:
    """Squeezing of every snapshot in ``record``.

    ``modes`` is a Fock factor index, a tuple of indices for the joint sum
    quadrature, ``"joint"`` for all Fock factors, or ``None`` for the first.
    """
    ms = _normalize_modes(record.layout, modes)
    obs = squeezing_observer(ms, condition, frame)
    samples = [obs(t, s) for t, s in zip(record.times, record.states)]
    return SqueezingTrace.from_samples(record.times, samples, condition, ms, frame,
                                       record.leakage, record.norm_drift)


# -- entanglement ----------------------------------------------------------------

def entanglement_entropy(state: QState, cut: Sequence[int]) -> float:
    """Base-2 von Neumann entropy of the factors listed in ``cut``."""
    n = len(state.layout.factors)
    cut = sorted(set(int(i) for i in cut))
    if not cut or cut[-1] >= n or cut[0] < 0 or len(cut) == n:
        raise LayoutError(f"invalid bipartition {cut} of {n} factors")
    rest = [i for i in range(n) if i not in cut]
    dims = state.layout.dims
    m = np.transpose(state.tensor(), cut + rest).reshape(
        int(np.prod([dims[i] for i in cut])), -1)
    s = np.linalg.svd(m, compute_uv=False)
    p = s ** 2
    p = p[p > 1e-16] / p.sum()
    return float(max(0.0, -np.sum(p * np.log2(p))))


# -- Wigner functions ------------------------------------------------------------

@dataclass(frozen=True)
class GridSpec:
    """Rectangular phase-space grid; coordinates are quadrature means (``alpha = x + i p``)."""

    x_min: float
    x_max: float
    nx: int
    y_min: float
    y_max: float
    ny: int

    def __post_init__(self):
        if self.nx < 2 or self.ny < 2 or self.nx > 401 or self.ny > 401:
            raise ValueError("grid needs 2..401 points per axis")
        if not (self.x_max > self.x_min and self.y_max > self.y_min):
            raise ValueError("grid ranges must be increasing")

    @classmethod
    def square(cls, extent: float, n: int = 101) -> "GridSpec":
        return cls(-extent, extent, n, -extent, extent, n)

    @property
    def x(self) -> np.ndarray:
        return np.linspace(self.x_min, self.x_max, self.nx)

    @property
    def y(self) -> np.ndarray:
        return np.linspace(self.y_min, self.y_max, self.ny)


@dataclass
class WignerGrid:
    """Wigner values on a 2D grid; ``values[j, i]`` sits at ``(x[i], y[j])``."""

    axes: tuple
    x: np.ndarray
    y: np.ndarray
    values: np.ndarray
    fixed: dict = field(default_factory=dict)

    def integral(self) -> float:
        return float(trapezoid(trapezoid(self.values, self.x, axis=1), self.y))


class _ParityKernel:
    """Displaced parity ``sum_n (-1)^n |[D(-alpha) M]_n|^2`` for many ``alpha``.

    Uses ``D(-alpha) = R(phi) exp(-|alpha| K) R(phi)^dag`` with
    ``K = a^dag - a`` diagonalised once; the final phase rotation does not
    change the parity sum and is skipped.
    """

    def __init__(self, dim: int):
        a = np.diag(np.sqrt(np.arange(1, dim)), 1)
        h = -1j * (a.T - a)  # Hermitian; K = i h
        self.lam, self.v = np.linalg.eigh(h)
        self.dim = dim
        self.parity = (-1.0) ** np.arange(dim)

    def guard(self, alphas):
        worst = float(np.max(np.abs(alphas)) ** 2) if np.size(alphas) else 0.0
        if worst > self.dim / 4:
            raise TruncationError(f"grid reaches |alpha|^2 = {worst:.3g} > dim/4 = {self.dim / 4:.3g}")

    def __call__(self, m: np.ndarray, alphas: np.ndarray, weights: np.ndarray = None, chunk: int = 2048):
        alphas = np.asarray(alphas, dtype=complex).reshape(-1)
        self.guard(alphas)
        cols = m.shape[1]
        w = np.ones(cols) if weights is None else np.asarray(weights, dtype=float)
        n = np.arange(self.dim)
        vh = self.v.conj().T
        out = np.empty(alphas.size)
        for s in range(0, alphas.size, chunk):
            al = alphas[s:s + chunk]
            r, phi = np.abs(al), np.angle(al)
            # R(phi)^dag M for every point: (dim, P, cols)
            rot = np.exp(-1j * np.outer(n, phi))[:, :, None] * m[:, None, :]
            y = (vh @ rot.reshape(self.dim, -1)).reshape(self.dim, al.size, cols)
            y *= np.exp(-1j * np.outer(self.lam, r))[:, :, None]
            z = (self.v @ y.reshape(self.dim, -1)).reshape(self.dim, al.size, cols)
            out[s:s + chunk] = np.einsum("n,npc,c->p", self.parity, np.abs(z) ** 2, w)
        return out


def _factor_matrix(state: QState, factor_index: int):
    t = np.moveaxis(state.tensor(), factor_index, 0)
    return t.reshape(t.shape[0], -1)


def wigner(state: QState, factor_index: int, grid: GridSpec) -> WignerGrid:
    """Wigner function of one Fock factor (other factors traced out)."""
    f = state.layout.check_fock(factor_index)
    kern = _ParityKernel(f.dim)
    xx, yy = np.meshgrid(grid.x, grid.y)
    vals = kern(_factor_matrix(state, factor_index), (xx + 1j * yy).ravel())
    return WignerGrid(("x", "p"), grid.x, grid.y, (2 / math.pi) * vals.reshape(xx.shape))


_COORDS = ("x_a", "p_a", "x_b", "p_b")


def joint_wigner_cut(state: QState, plane: Sequence[str], grid: GridSpec, fixed: dict = None,
                     modes: Sequence[int] = None) -> WignerGrid:
    """2D cut of the two-mode Wigner function ``W(alpha, beta)``.

    ``plane`` names the two varying coordinates among ``x_a, p_a, x_b, p_b``;
    the other two take their values from ``fixed`` (default 0).
    """
    layout = state.layout
    if modes is None:
        modes = layout.fock_indices
    if len(modes) != 2:
        raise LayoutError("joint Wigner cut needs two Fock factors")
    plane = tuple(plane)
    if len(plane) != 2 or plane[0] == plane[1] or any(c not in _COORDS for c in plane):
        raise ValueError(f"plane must name two distinct coordinates from {_COORDS}")
    fixed = dict(fixed or {})
    for c in fixed:
        if c not in _COORDS or c in plane:
            raise ValueError(f"cannot fix coordinate {c!r}")
    vals = {c: fixed.get(c, 0.0) for c in _COORDS if c not in plane}
    ia, ib = modes
    da, db = layout.dims[ia], layout.dims[ib]
    ka, kb = _ParityKernel(da), _ParityKernel(db)

    def amp(mode, cu, cv, u, v):
        # complex amplitude of `mode` from the values of the two axis coordinates
        base = {**vals, cu: u, cv: v}
        return base[f"x_{mode}"] + 1j * base[f"p_{mode}"]

    xs, ys = grid.x, grid.y
    cu, cv = plane
    t = np.moveaxis(state.tensor(), (ia, ib), (0, 1))
    t = t.reshape(da, db, -1)
    out = np.empty((ys.size, xs.size))
    same = cu[-1] == cv[-1]
    if same:
        # both axes on one mode: displace the other mode once, weight by its parity
        mode = cu[-1]
        other = "b" if mode == "a" else "a"
        beta = vals[f"x_{other}"] + 1j * vals[f"p_{other}"]
        oth_kern, oth_dim = (kb, db) if mode == "a" else (ka, da)
        oth_kern.guard([beta])
        dmat = _displacement_local(oth_dim, -beta)
        if mode == "a":
            moved = np.einsum("mj,ajk->amk", dmat, t)
        else:
            moved = np.einsum("ni,ijk->jnk", dmat, t)
        main_dim = da if mode == "a" else db
        w = np.repeat((-1.0) ** np.arange(oth_dim), moved.shape[2])
        xx, yy = np.meshgrid(xs, ys)
        alphas = np.array([amp(mode, cu, cv, u, v) for u, v in zip(xx.ravel(), yy.ravel())])
        kern = ka if mode == "a" else kb
        out = kern(moved.reshape(main_dim, -1), alphas, w).reshape(xx.shape)
    else:
        mu, mv = cu[-1], cv[-1]  # mode carried by the x-axis / y-axis
        ku, dimu = (ka, da) if mu == "a" else (kb, db)
        kv, dimv = (ka, da) if mv == "a" else (kb, db)
        if mu == "b":
            t = np.transpose(t, (1, 0, 2))
        ku.guard([amp(mu, cu, cv, u, 0.0) for u in xs])
        kv.guard([amp(mv, cu, cv, 0.0, v) for v in ys])
        betas = np.array([amp(mv, cu, cv, 0.0, v) for v in ys])
        for i, u in enumerate(xs):
            dmat = _displacement_local(dimu, -amp(mu, cu, cv, u, 0.0))
            moved = np.einsum("mn,njk->mjk", dmat, t)  # (dimu, dimv, rest)
            mv_first = np.transpose(moved, (1, 0, 2)).reshape(dimv, -1)
            w = np.repeat((-1.0) ** np.arange(dimu), moved.shape[2])
            out[:, i] = kv(mv_first, betas, w)
    return WignerGrid(plane, xs, ys, (2 / math.pi) ** 2 * out, fixed=vals)


def _displacement_local(dim: int, alpha: complex) -> np.ndarray:
    a = np.diag(np.sqrt(np.arange(1, dim)), 1).astype(complex)
    return scipy.linalg.expm(alpha * a.T - np.conj(alpha) * a)
