"""Physical parameter sets and time-dependent Hamiltonians.

All frequencies are angular (rad/s) and times are in seconds.  Helpers named
``*_mhz`` / ``*_khz`` convert from the ``f/2pi`` values used in
configuration files.

Frames
------
``displaced``
    Rotating with the Rabi drive and the resonator, displaced by the
    classical cavity trajectory.  Hosts ``FULL_DISPLACED``.
``driven``
    Same rotating frame without the displacement.  Hosts ``FULL_DRIVEN``.
``effective``
    Hadamard-relabelled qubit, rotating at the Rabi frequency.  Hosts the
    modulated coupling and the effective squeezing Hamiltonians.  See
    :mod:`condsqueeze.frames` for the exact map from the displaced frame.
"""
from __future__ import annotations

import cmath
import enum
import math
from dataclasses import dataclass, field
from typing import Callable, Sequence, Union

import numpy as np
import scipy.sparse as sp

from .errors import ConfigError, LayoutError, NumericalError, TruncationError
from .operators import (
    Fock, HilbertLayout, QOperator, Qubit, annihilator, identity, number, pauli,
)

__all__ = [
    "TWO_PI", "mhz", "khz", "DriveParams", "TmsParams", "HamiltonianKind",
    "HamiltonianSpec", "TimeDependentOperator", "drive_waveform",
    "displacement_trajectory", "displacement_velocity", "tms_trajectories",
    "tms_drive_waveforms", "build_hamiltonian", "photon_limits",
    "auto_delta_q", "driven_fock_dim",
]

TWO_PI = 2 * math.pi


def mhz(f: float) -> float:
    """Angular frequency for ``f/2pi`` given in MHz."""
    return TWO_PI * f * 1e6


def khz(f: float) -> float:
    return TWO_PI * f * 1e3


DeltaQ = Union[str, float]


@dataclass(frozen=True)
class DriveParams:
    """Single-mode drive parameters.

    Give either ``abar0`` or ``g``; the other follows from ``g = chi*abar0/2``.
    ``delta_q`` is a number, ``"auto"`` (``-chi|abar0|^2/2``) or ``"cancel"``
    (``-chi|abar0|^2``, which removes the static sigma_z term of the
    displaced-frame Hamiltonian exactly).
    """

    chi: float
    rabi: float
    delta_omega: float
    abar0: complex = None
    g: complex = None
    delta_q: DeltaQ = "auto"

    def __post_init__(self):
        _check_hierarchy(self.rabi, self.delta_omega)
        abar0, g = _resolve_coupling(self.chi, self.abar0, self.g)
        object.__setattr__(self, "abar0", abar0)
        object.__setattr__(self, "g", g)
        _check_delta_q(self.delta_q)

    @classmethod
    def from_mhz(cls, chi_khz, rabi_mhz, delta_omega_mhz, g_mhz=None, abar0=None, delta_q="auto"):
        return cls(chi=khz(chi_khz), rabi=mhz(rabi_mhz), delta_omega=mhz(delta_omega_mhz),
                   g=None if g_mhz is None else mhz(g_mhz), abar0=abar0, delta_q=delta_q)

    @property
    def chi_ref(self) -> float:
        return self.chi

    @property
    def resolved_delta_q(self) -> float:
        return auto_delta_q(self)

    def replace(self, **changes) -> "DriveParams":
        kw = dict(chi=self.chi, rabi=self.rabi, delta_omega=self.delta_omega,
                  abar0=self.abar0, delta_q=self.delta_q)
        if "g" in changes:
            kw.pop("abar0")
        kw.update(changes)
        return DriveParams(**kw)


@dataclass(frozen=True)
class TmsParams:
    """Two-mode drive parameters; ``g = chi_ref*abar0/2``.

    ``chi_ref`` is the reference dispersive shift that sets the drive
    amplitudes; it defaults to ``chi_a``.
    """

    chi_a: float
    chi_b: float
    rabi: float
    delta_omega: float
    abar0: complex = None
    g: complex = None
    chi_ref: float = None
    delta_q: DeltaQ = "auto"

    def __post_init__(self):
        _check_hierarchy(self.rabi, self.delta_omega)
        if self.chi_ref is None:
            object.__setattr__(self, "chi_ref", self.chi_a)
        abar0, g = _resolve_coupling(self.chi_ref, self.abar0, self.g)
        object.__setattr__(self, "abar0", abar0)
        object.__setattr__(self, "g", g)
        _check_delta_q(self.delta_q)

    @classmethod
    def from_mhz(cls, chi_a_khz, chi_b_khz, rabi_mhz, delta_omega_mhz, g_mhz=None,
                 abar0=None, chi_ref_khz=None, delta_q="auto"):
        return cls(chi_a=khz(chi_a_khz), chi_b=khz(chi_b_khz), rabi=mhz(rabi_mhz),
                   delta_omega=mhz(delta_omega_mhz), g=None if g_mhz is None else mhz(g_mhz),
                   abar0=abar0, chi_ref=None if chi_ref_khz is None else khz(chi_ref_khz),
                   delta_q=delta_q)

    @property
    def resolved_delta_q(self) -> float:
        return auto_delta_q(self)


def _check_hierarchy(rabi, delta_omega):
    if not rabi > 0:
        raise ConfigError("Rabi frequency must be positive")
    if not delta_omega > 0:
        raise ConfigError("sideband detuning must be positive")
    if not delta_omega < rabi:
        raise ConfigError("sideband detuning must be smaller than the Rabi frequency")


def _resolve_coupling(chi, abar0, g):
    if abar0 is None and g is None:
        raise ConfigError("set either abar0 or g")
    if g is None:
        abar0 = complex(abar0)
        return abar0, chi * abar0 / 2
    g = complex(g)
    if chi == 0:
        if g != 0:
            raise ConfigError("cannot back-solve abar0 from g with chi = 0")
        implied = complex(abar0 or 0)
    else:
        implied = 2 * g / chi
    if abar0 is not None and not np.isclose(complex(abar0), implied, rtol=1e-12, atol=1e-15):
        raise ConfigError(f"abar0={abar0!r} inconsistent with g={g!r} (needs abar0={implied!r})")
    return implied, g


def _check_delta_q(dq):
    if isinstance(dq, str):
        if dq not in ("auto", "cancel"):
            raise ConfigError(f"delta_q must be a number, 'auto' or 'cancel', got {dq!r}")
    elif not np.isfinite(dq):
        raise ConfigError("delta_q must be finite")


def auto_delta_q(params) -> float:
    """Qubit detuning with the Stark-shift convention of ``params.delta_q``."""
    dq = params.delta_q
    if not isinstance(dq, str):
        return float(dq)
    n0 = abs(params.abar0) ** 2
    if isinstance(params, TmsParams):
        return -n0 * params.chi_ref ** 2 * (1 / params.chi_a + 1 / params.chi_b) / 2
    return -params.chi * n0 / 2 if dq == "auto" else -params.chi * n0


# -- classical trajectories ----------------------------------------------------

def _trig(t):
    if np.ndim(t) == 0:
        t = float(t)
        return t, math.sin, math.cos, cmath.exp
    return np.asarray(t, dtype=float), np.sin, np.cos, np.exp


def drive_waveform(params: DriveParams, t):
    """Sideband drive ``eps(t)`` of the single-mode scheme.

    Equals ``-i d(abar)/dt``, i.e. the drive that produces
    :func:`displacement_trajectory` when it enters as ``eps a^dag + eps^* a``.
    """
    t, sin, cos, _ = _trig(t)
    lo = params.rabi - params.delta_omega
    hi = params.rabi + params.delta_omega
    return params.abar0 * (lo * sin(lo * t) - 1j * hi * cos(hi * t))


def displacement_trajectory(params: DriveParams, t):
    """Periodic displacement ``abar(t)``; ``abar(0) = -i abar0``."""
    t, sin, cos, _ = _trig(t)
    lo = params.rabi - params.delta_omega
    hi = params.rabi + params.delta_omega
    return params.abar0 * (sin(hi * t) - 1j * cos(lo * t))


def displacement_velocity(params: DriveParams, t):
    t, sin, cos, _ = _trig(t)
    lo = params.rabi - params.delta_omega
    hi = params.rabi + params.delta_omega
    return params.abar0 * (hi * cos(hi * t) + 1j * lo * sin(lo * t))


def tms_trajectories(params: TmsParams, t):
    """Displacements ``(abar(t), bbar(t))`` of the two modes."""
    if params.chi_a == 0 or params.chi_b == 0:
        raise ConfigError("two-mode trajectories need nonzero chi_a and chi_b")
    t, sin, cos, exp = _trig(t)
    om, dw, c = params.rabi, params.delta_omega, params.chi_ref
    abar = -1j * params.abar0 * (c / params.chi_a) * 1j * exp(1j * om * t) * cos(dw * t)
    bbar = 1j * params.abar0 * (c / params.chi_b) * 1j * exp(-1j * om * t) * sin(dw * t)
    return abar, bbar


def _tms_velocities(params: TmsParams, t):
    t, sin, cos, exp = _trig(t)
    om, dw, c = params.rabi, params.delta_omega, params.chi_ref
    ka = params.abar0 * c / params.chi_a
    kb = -params.abar0 * c / params.chi_b
    da = ka * exp(1j * om * t) * (1j * om * cos(dw * t) - dw * sin(dw * t))
    db = kb * exp(-1j * om * t) * (-1j * om * sin(dw * t) + dw * cos(dw * t))
    return da, db


def tms_drive_waveforms(params: TmsParams, t):
    """Drives ``(eps_a(t), eps_b(t))`` that realize :func:`tms_trajectories`."""
    da, db = _tms_velocities(params, t)
    return -1j * da, -1j * db


def photon_limits(params) -> tuple:
    """Rough photon-number ceilings ``(n_rwa1, n_rwa2, n_magnus)``.

    ``inf`` marks a limit that is unbounded for the given parameters.
    """
    chi = abs(params.chi_ref)
    a0 = abs(params.abar0)
    if chi == 0:
        return math.inf, math.inf, math.inf
    n1 = 2 * params.rabi / chi
    n2 = math.inf if a0 == 0 else (2 * params.rabi / (chi * a0)) ** 2
    n3 = math.inf if a0 == 0 else (2 * params.delta_omega / (chi * a0)) ** 2
    return n1, n2, n3


def driven_fock_dim(abar0_max: float, n_target: float = 1.0) -> int:
    """Smallest Fock dimension accepted for the undisplaced (driven) frame."""
    return int(math.ceil(4 * (math.sqrt(2) * abs(abar0_max) + math.sqrt(n_target)) ** 2))


# -- time-dependent operators --------------------------------------------------

Coefficient = Union[complex, Callable[[float], complex]]


class TimeDependentOperator:
    """``H(t) = sum_k c_k(t) * O_k`` with scalar or callable coefficients.

    Terms are ``(coef, op)`` pairs, or ``(coef, op, "h.c.")`` for
    ``coef(t) op + conj(coef(t)) op^dag``.  ``fastest_frequency`` is the
    highest angular frequency present in the coefficients and ``frame``
    names the frame the Hamiltonian lives in.
    """

    def __init__(self, layout: HilbertLayout, terms: Sequence, *, fastest_frequency: float = 0.0,
                 frame: str = "effective", label: str = ""):
        const = None
        dynamic = []
        for term in terms:
            coef, op = term[0], term[1]
            paired = len(term) > 2
            if op.layout != layout:
                raise LayoutError("term on a different layout")
            if callable(coef):
                dynamic.append((coef, op, paired))
                continue
            piece = op * complex(coef)
            if paired:
                piece = piece + piece.dag()
            const = piece if const is None else const + piece
        self.layout = layout
        if const is None:
            const = QOperator(layout, sp.csr_matrix((layout.total_dim,) * 2, dtype=complex))
        self.constant = const
        self.dynamic = tuple(dynamic)
        self.fastest_frequency = float(fastest_frequency)
        self.frame = frame
        self.label = label
        self._const_csr = const.sparse()
        self._dyn_csr = tuple((op.sparse(), op.dag().sparse() if paired else None)
                              for _, op, paired in dynamic)

    @property
    def is_time_independent(self) -> bool:
        return not self.dynamic

    def __call__(self, t: float) -> QOperator:
        out = self.constant
        for c, op, paired in self.dynamic:
            z = complex(c(t))
            out = out + op * z
            if paired:
                out = out + op.dag() * z.conjugate()
        return out

    def apply(self, t: float, vec: np.ndarray) -> np.ndarray:
        """``H(t) @ vec`` without assembling ``H(t)``."""
        out = self._const_csr @ vec
        for (c, _, _), (m, md) in zip(self.dynamic, self._dyn_csr):
            z = complex(c(t))
            out += z * (m @ vec)
            if md is not None:
                out += z.conjugate() * (md @ vec)
        return out

    def __repr__(self):
        return f"TimeDependentOperator({self.label!r}, frame={self.frame!r}, terms={len(self.dynamic)}+const)"


# -- Hamiltonian catalogue -------------------------------------------------------

class HamiltonianKind(enum.Enum):
    FULL_DISPLACED = "full_displaced"
    FULL_DRIVEN = "full_driven"
    MODULATED_COUPLING = "modulated_coupling"
    EFFECTIVE_SQUEEZING = "effective_squeezing"
    EFFECTIVE_WITH_CORRECTION = "effective_with_correction"

    @classmethod
    def parse(cls, value) -> "HamiltonianKind":
        if isinstance(value, cls):
            return value
        try:
            return cls(str(value).lower().replace("-", "_"))
        except ValueError:
            raise ConfigError(f"unknown Hamiltonian kind {value!r}") from None


FRAME_OF = {
    HamiltonianKind.FULL_DISPLACED: "displaced",
    HamiltonianKind.FULL_DRIVEN: "driven",
    HamiltonianKind.MODULATED_COUPLING: "effective",
    HamiltonianKind.EFFECTIVE_SQUEEZING: "effective",
    HamiltonianKind.EFFECTIVE_WITH_CORRECTION: "effective",
}


@dataclass(frozen=True)
class HamiltonianSpec:
    kind: HamiltonianKind
    mode_count: int
    params: Union[DriveParams, TmsParams]

    def __post_init__(self):
        object.__setattr__(self, "kind", HamiltonianKind.parse(self.kind))
        if self.mode_count not in (1, 2):
            raise ConfigError("mode_count must be 1 or 2")
        expected = DriveParams if self.mode_count == 1 else TmsParams
        if not isinstance(self.params, expected):
            raise ConfigError(f"mode_count {self.mode_count} needs {expected.__name__}")
        if self.mode_count == 2 and self.kind is HamiltonianKind.EFFECTIVE_WITH_CORRECTION:
            raise ConfigError("the higher-order correction is defined for one mode only")


def _check_layout(layout: HilbertLayout, mode_count: int):
    f = layout.factors
    if len(f) != mode_count + 1 or not isinstance(f[0], Qubit) or not all(isinstance(x, Fock) for x in f[1:]):
        raise LayoutError(f"expected qubit followed by {mode_count} Fock factor(s), got dims {layout.dims}")


def _hermitian_pair(f, op: QOperator):
    return [(f, op, "h.c.")]


def build_hamiltonian(spec: HamiltonianSpec, layout: HilbertLayout, *, n_target: float = 1.0,
                      check_times: Sequence = None) -> TimeDependentOperator:
    """Generator ``H(t)`` for ``spec`` on ``layout``.

    The layout must be a qubit followed by ``spec.mode_count`` Fock factors.
    ``FULL_DRIVEN`` additionally requires each Fock dimension to hold the
    classical displacement (see :func:`driven_fock_dim`).
    """
    _check_layout(layout, spec.mode_count)
    builder = _BUILDERS[(spec.kind, spec.mode_count)]
    p = spec.params
    if spec.kind is HamiltonianKind.FULL_DRIVEN:
        scales = [1.0] if spec.mode_count == 1 else [p.chi_ref / p.chi_a, p.chi_ref / p.chi_b]
        for idx, s in zip(layout.fock_indices, scales):
            need = driven_fock_dim(abs(p.abar0 * s), n_target)
            if layout.dims[idx] < need:
                raise TruncationError(f"driven frame needs Fock dim >= {need} for factor {idx}, got {layout.dims[idx]}")
    terms, fastest = builder(p, layout)
    h = TimeDependentOperator(layout, terms, fastest_frequency=fastest,
                              frame=FRAME_OF[spec.kind], label=f"{spec.kind.value}/{spec.mode_count}")
    if check_times is None:
        period = 2 * math.pi / p.delta_omega
        check_times = (0.0, 0.137 * period, 0.5 * period)
    for t in check_times:
        if not h(t).is_hermitian(1e-10):
            raise NumericalError(f"assembled Hamiltonian is not Hermitian at t={t}")
    return h


def _qubit_drive(p, layout):
    return [(p.rabi / 2, pauli(layout, "x")), (p.resolved_delta_q / 2, pauli(layout, "z"))]


def _full_displaced_1(p: DriveParams, layout):
    sz = pauli(layout, "z")
    a = annihilator(layout, 1)
    n0 = abs(p.abar0) ** 2
    w2r, w2d = 2 * p.rabi, 2 * p.delta_omega
    terms = _qubit_drive(p, layout)
    terms.append((p.chi / 2, sz @ number(layout, 1)))
    terms += _hermitian_pair(lambda t: -displacement_trajectory(p, t), (p.chi / 2) * (sz @ a.dag()))
    terms.append((p.chi / 2 * n0, sz))
    terms.append((lambda t: p.chi / 2 * n0 * math.sin(w2d * t) * math.sin(w2r * t), sz))
    return terms, p.rabi + p.delta_omega


def _full_driven_1(p: DriveParams, layout):
    sz = pauli(layout, "z")
    a = annihilator(layout, 1)
    terms = _qubit_drive(p, layout)
    terms.append((p.chi / 2, sz @ number(layout, 1)))
    terms += _hermitian_pair(lambda t: complex(drive_waveform(p, t)), a.dag())
    return terms, p.rabi + p.delta_omega


def _modulated_1(p: DriveParams, layout):
    sp_, sm = pauli(layout, "plus"), pauli(layout, "minus")
    a = annihilator(layout, 1)
    g, gc, w = p.g, np.conj(p.g), p.delta_omega
    jc = 1j * (gc * (sp_ @ a) - g * (sm @ a.dag()))
    ajc = g * (sp_ @ a.dag()) + gc * (sm @ a)
    terms = [(lambda t: math.cos(w * t), jc), (lambda t: -math.sin(w * t), ajc)]
    return terms, w


def _effective_1(p: DriveParams, layout):
    sz = pauli(layout, "z")
    a = annihilator(layout, 1)
    g, gc = p.g, np.conj(p.g)
    h = (sz @ (gc ** 2 * (a @ a) + g ** 2 * (a.dag() @ a.dag()))) / (2 * p.delta_omega)
    return [(1.0, h)], 0.0


def higher_order_term(p: DriveParams, layout) -> QOperator:
    """Third-order Magnus correction of the single-mode modulated coupling."""
    sp_ = pauli(layout, "plus")
    a = annihilator(layout, 1)
    ad = a.dag()
    g, gc = p.g, np.conj(p.g)
    x = (1j / p.delta_omega ** 2) * (sp_ @ (g ** 3 * (ad @ ad @ ad) + gc * abs(g) ** 2 * (a + ad @ a @ a)))
    return x + x.dag()


def _effective_corr_1(p: DriveParams, layout):
    terms, _ = _effective_1(p, layout)
    return terms + [(1.0, higher_order_term(p, layout))], 0.0


def _full_displaced_2(p: TmsParams, layout):
    sz = pauli(layout, "z")
    a, b = annihilator(layout, 1), annihilator(layout, 2)
    n0c2 = abs(p.abar0) ** 2 * p.chi_ref ** 2
    w2d = 2 * p.delta_omega
    terms = _qubit_drive(p, layout)
    terms.append((0.5, sz @ (p.chi_a * number(layout, 1) + p.chi_b * number(layout, 2))))
    terms += _hermitian_pair(lambda t: -complex(tms_trajectories(p, t)[0]), (p.chi_a / 2) * (sz @ a.dag()))
    terms += _hermitian_pair(lambda t: -complex(tms_trajectories(p, t)[1]), (p.chi_b / 2) * (sz @ b.dag()))
    diff = n0c2 * (1 / p.chi_a - 1 / p.chi_b) / 2
    terms.append((0.5 * n0c2 * (1 / p.chi_a + 1 / p.chi_b) / 2, sz))
    if diff != 0:
        terms.append((lambda t: 0.5 * diff * math.cos(w2d * t), sz))
    return terms, p.rabi + p.delta_omega


def _full_driven_2(p: TmsParams, layout):
    sz = pauli(layout, "z")
    a, b = annihilator(layout, 1), annihilator(layout, 2)
    terms = _qubit_drive(p, layout)
    terms.append((0.5, sz @ (p.chi_a * number(layout, 1) + p.chi_b * number(layout, 2))))
    terms += _hermitian_pair(lambda t: complex(tms_drive_waveforms(p, t)[0]), a.dag())
    terms += _hermitian_pair(lambda t: complex(tms_drive_waveforms(p, t)[1]), b.dag())
    return terms, p.rabi + p.delta_omega


def _modulated_2(p: TmsParams, layout):
    sp_, sm = pauli(layout, "plus"), pauli(layout, "minus")
    a, b = annihilator(layout, 1), annihilator(layout, 2)
    g, gc, w = p.g, np.conj(p.g), p.delta_omega
    jc = 1j * (gc * (sp_ @ a) - g * (sm @ a.dag()))
    ajc = g * (sp_ @ b.dag()) + gc * (sm @ b)
    return [(lambda t: math.cos(w * t), jc), (lambda t: -math.sin(w * t), ajc)], w


def _effective_2(p: TmsParams, layout):
    sz = pauli(layout, "z")
    a, b = annihilator(layout, 1), annihilator(layout, 2)
    g, gc = p.g, np.conj(p.g)
    h = (sz @ (gc ** 2 * (a @ b) + g ** 2 * (a.dag() @ b.dag()))) / (2 * p.delta_omega)
    return [(1.0, h)], 0.0


_BUILDERS = {
    (HamiltonianKind.FULL_DISPLACED, 1): _full_displaced_1,
    (HamiltonianKind.FULL_DRIVEN, 1): _full_driven_1,
    (HamiltonianKind.MODULATED_COUPLING, 1): _modulated_1,
    (HamiltonianKind.EFFECTIVE_SQUEEZING, 1): _effective_1,
    (HamiltonianKind.EFFECTIVE_WITH_CORRECTION, 1): _effective_corr_1,
    (HamiltonianKind.FULL_DISPLACED, 2): _full_displaced_2,
    (HamiltonianKind.FULL_DRIVEN, 2): _full_driven_2,
    (HamiltonianKind.MODULATED_COUPLING, 2): _modulated_2,
    (HamiltonianKind.EFFECTIVE_SQUEEZING, 2): _effective_2,
}
