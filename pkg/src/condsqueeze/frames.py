"""Unitary frame changes between the driven, displaced and effective pictures.

A :class:`FrameTransform` wraps ``U(t)`` such that ``psi_target(t) =
U(t) psi_source(t)``.  The chain used throughout the package is::

    driven --D(abar(t))--> displaced --W V R(t) Had--> effective

``Had = (sigma_x + sigma_z)/sqrt(2)`` swaps the roles of sigma_x and
sigma_z, ``R(t) = exp(i sigma_z Omega_R t/2)`` removes the Rabi precession,
and the static phase rotations ``V`` (oscillators) and ``W`` (qubit) align
the phases of the resulting coupling with the modulated-coupling model.
"""
from __future__ import annotations

from typing import Callable

import numpy as np

from .errors import ConfigError, LayoutError
from .model import DriveParams, TmsParams, displacement_trajectory, tms_trajectories
from .operators import HilbertLayout, QOperator, QState, displacement, embed, identity

__all__ = [
    "FrameTransform", "hadamard_frame", "rabi_frame", "displacement_frame",
    "effective_phase_frame", "effective_frame", "frame_transform", "FRAMES",
]

FRAMES = ("driven", "displaced", "effective")

_HAD = np.array([[-1, 1], [1, 1]], dtype=complex) / np.sqrt(2)
# Had @ sigma_z @ Had = sigma_x with sigma_z = diag(-1, 1)


class FrameTransform:
    """Time-dependent unitary ``U(t)``; static when built from a constant."""

    def __init__(self, layout: HilbertLayout, func: Callable[[float], QOperator], *,
                 name: str = "", static: bool = False):
        self.layout = layout
        self._func = func
        self.name = name
        self.static = static

    @classmethod
    def constant(cls, op: QOperator, name: str = "") -> "FrameTransform":
        return cls(op.layout, lambda t: op, name=name, static=True)

    def __call__(self, t: float) -> QOperator:
        return self._func(t)

    def apply(self, t: float, state: QState, inverse: bool = False) -> QState:
        if state.layout != self.layout:
            raise LayoutError("state and transform live on different layouts")
        u = self(t)
        return (u.dag() if inverse else u) @ state

    def inverse(self) -> "FrameTransform":
        return FrameTransform(self.layout, lambda t: self(t).dag(), name=f"inv({self.name})",
                              static=self.static)

    def then(self, other: "FrameTransform") -> "FrameTransform":
        """Apply ``self`` first, then ``other``."""
        if other.layout != self.layout:
            raise LayoutError("cannot compose transforms on different layouts")
        return FrameTransform(self.layout, lambda t: other(t) @ self(t),
                              name=f"{other.name}*{self.name}", static=self.static and other.static)


def identity_frame(layout: HilbertLayout) -> FrameTransform:
    return FrameTransform.constant(identity(layout), "id")


def hadamard_frame(layout: HilbertLayout) -> FrameTransform:
    """Static qubit relabelling; an involution."""
    return FrameTransform.constant(embed(layout, layout.require_qubit(), _HAD), "had")


def rabi_frame(layout: HilbertLayout, rabi: float) -> FrameTransform:
    """``exp(i sigma_z Omega_R t / 2)`` on the qubit."""
    q = layout.require_qubit()

    def u(t):
        ph = 0.5 * rabi * t
        return embed(layout, q, np.diag([np.exp(-1j * ph), np.exp(1j * ph)]))

    return FrameTransform(layout, u, name="rabi")


def _mode_count(params) -> int:
    return 2 if isinstance(params, TmsParams) else 1


def _fock_phase(dim: int, theta: float) -> np.ndarray:
    return np.diag(np.exp(-1j * theta * np.arange(dim)))


def displacement_frame(params, layout: HilbertLayout) -> FrameTransform:
    """``D(abar(t))`` (and ``D(bbar(t))``): driven frame to displaced frame."""
    idx = layout.fock_indices
    if len(idx) != _mode_count(params):
        raise LayoutError("layout does not match the parameter set")

    def u(t):
        if isinstance(params, DriveParams):
            amps = (displacement_trajectory(params, t),)
        else:
            amps = tms_trajectories(params, t)
        out = identity(layout)
        for i, alpha in zip(idx, amps):
            out = out @ displacement(layout, i, complex(alpha))
        return out

    return FrameTransform(layout, u, name="disp")


def effective_phase_frame(params, layout: HilbertLayout) -> FrameTransform:
    """Static part ``W V Had`` of the displaced-to-effective map.

    Conditioning on a qubit outcome in the displaced frame is equivalent to
    applying this map and projecting in the sigma_z basis; the Rabi
    rotation only contributes outcome-dependent phases.
    """
    q = layout.require_qubit()
    idx = layout.fock_indices
    op = embed(layout, q, _HAD)
    if _mode_count(params) == 1:
        if len(idx) != 1:
            raise LayoutError("layout does not match the parameter set")
        op = embed(layout, idx[0], _fock_phase(layout.dims[idx[0]], np.pi / 2)) @ op
        w = np.diag([np.exp(-1j * np.pi / 4), np.exp(1j * np.pi / 4)])
        op = embed(layout, q, w) @ op
    else:
        if len(idx) != 2:
            raise LayoutError("layout does not match the parameter set")
        op = embed(layout, idx[0], _fock_phase(layout.dims[idx[0]], -np.pi / 2)) @ op
        op = embed(layout, idx[1], _fock_phase(layout.dims[idx[1]], np.pi)) @ op
    return FrameTransform.constant(op, "phase")


def effective_frame(params, layout: HilbertLayout) -> FrameTransform:
    """Displaced frame to effective frame, ``W V R(t) Had``."""
    static = effective_phase_frame(params, layout)(0.0)
    had = embed(layout, layout.require_qubit(), _HAD)
    # W V commutes with R(t): both are diagonal in the qubit basis
    wv = static @ had
    rot = rabi_frame(layout, params.rabi)
    return FrameTransform(layout, lambda t: wv @ rot(t) @ had, name="eff")


def frame_transform(params, layout: HilbertLayout, source: str, target: str) -> FrameTransform:
    """Transform carrying states from frame ``source`` to frame ``target``."""
    for f in (source, target):
        if f not in FRAMES:
            raise ConfigError(f"unknown frame {f!r}; expected one of {FRAMES}")
    i, j = FRAMES.index(source), FRAMES.index(target)
    if i == j:
        return identity_frame(layout)
    steps = [displacement_frame(params, layout), effective_frame(params, layout)]
    chain = steps[min(i, j):max(i, j)]
    if i > j:
        chain = [s.inverse() for s in reversed(chain)]
    out = chain[0]
    for s in chain[1:]:
        out = out.then(s)
    return out
