"""Commutator identities and Lie-closure search for conditioned oscillator control.

This module uses the canonical pair ``q = (a + a^dag)/sqrt(2)`` and
``p = i(a^dag - a)/sqrt(2)`` with ``[q, p] = i``.  Note the different
normalization from :mod:`condsqueeze.observables`, where quadratures carry
a factor ``1/2``; nothing here is shared with that module.

Truncation spoils products of ladder operators near the top Fock levels,
so every comparison is made on the interior block ``P X P`` where ``P``
keeps Fock levels below ``interior_dim`` on every mode (the qubit is kept
whole).
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from .errors import LayoutError
from .operators import HilbertLayout, QOperator, annihilator, commutator, identity, pauli

__all__ = [
    "canonical_pair", "GeneratorSet", "interior_mask", "interior_residual", "verify_identity",
    "IdentityCheck", "identity_catalogue", "jacobi_residual", "ClosureEntry", "ClosureReport",
    "closure_search", "control_generators", "MIN_MARGIN",
]

MIN_MARGIN = 4
ROUNDOFF = 1e-12


def canonical_pair(layout: HilbertLayout, factor_index: int = None):
    """``(q, p)`` on one Fock factor (default: the first)."""
    if factor_index is None:
        if not layout.fock_indices:
            raise LayoutError("layout has no Fock factor")
        factor_index = layout.fock_indices[0]
    a = annihilator(layout, factor_index)
    ad = a.dag()
    return (a + ad) / math.sqrt(2), (ad - a) * (1j / math.sqrt(2))


@dataclass
class GeneratorSet:
    """Labelled Hermitian generators on one layout."""

    labels: list
    operators: list

    def __post_init__(self):
        if len(self.labels) != len(self.operators):
            raise ValueError("labels and operators differ in length")
        if len(set(self.labels)) != len(self.labels):
            raise ValueError("generator labels must be unique")
        if not self.operators:
            raise ValueError("empty generator set")
        layout = self.operators[0].layout
        for lab, op in zip(self.labels, self.operators):
            if op.layout != layout:
                raise LayoutError(f"generator {lab!r} lives on a different layout")
            if not op.is_hermitian(1e-10):
                raise ValueError(f"generator {lab!r} is not Hermitian")

    @property
    def layout(self) -> HilbertLayout:
        return self.operators[0].layout

    def __len__(self):
        return len(self.labels)

    def __iter__(self):
        return iter(zip(self.labels, self.operators))

    def scaled(self, factors: Sequence[float]) -> "GeneratorSet":
        return GeneratorSet(list(self.labels), [op * float(f) for op, f in zip(self.operators, factors)])


def control_generators(layout: HilbertLayout, names: Sequence[str] = None) -> GeneratorSet:
    """Conditional squeezing plus Gaussian and qubit controls.

    Available labels: ``sz(p2-q2)``, ``p2``, ``q``, ``p``, ``sx``, ``sy``, ``sz``.
    """
    q, p = canonical_pair(layout)
    table = {"q": q, "p": p, "p2": p @ p}
    if layout.qubit_index is not None:
        sx, sy, sz = (pauli(layout, k) for k in "xyz")
        table.update({"sz(p2-q2)": sz @ (p @ p - q @ q), "sx": sx, "sy": sy, "sz": sz})
    if names is None:
        names = ["sz(p2-q2)", "p2", "q", "p", "sx", "sy"]
    missing = [n for n in names if n not in table]
    if missing:
        raise ValueError(f"unknown generator labels {missing}")
    return GeneratorSet(list(names), [table[n] for n in names])


def interior_mask(layout: HilbertLayout, interior_dim: int) -> np.ndarray:
    """Boolean mask of basis states with every Fock level below ``interior_dim``."""
    keep = np.ones(layout.dims, dtype=bool)
    for i in layout.fock_indices:
        d = layout.dims[i]
        if d - interior_dim < MIN_MARGIN:
            raise LayoutError(f"interior {interior_dim} leaves fewer than {MIN_MARGIN} levels of margin "
                              f"in a Fock factor of dimension {d}")
        shape = [1] * len(layout.dims)
        shape[i] = d
        keep &= (np.arange(d) < interior_dim).reshape(shape)
    return keep.reshape(-1)


def _block(op: QOperator, mask: np.ndarray) -> np.ndarray:
    idx = np.flatnonzero(mask)
    m = op.sparse()[idx][:, idx]
    return m.toarray()


def interior_residual(op: QOperator, interior_dim: int) -> float:
    """``max |P op P|``."""
    b = _block(op, interior_mask(op.layout, interior_dim))
    return float(np.abs(b).max()) if b.size else 0.0


def verify_identity(lhs_commutator, rhs: QOperator, interior_dim: int) -> float:
    """Residual ``||P([A, B] - rhs)P||_max`` of a commutator identity."""
    a, b = lhs_commutator
    return interior_residual(commutator(a, b) - rhs, interior_dim)


def jacobi_residual(a: QOperator, b: QOperator, c: QOperator, interior_dim: int) -> float:
    j = commutator(a, commutator(b, c)) + commutator(b, commutator(c, a)) + commutator(c, commutator(a, b))
    return interior_residual(j, interior_dim)


@dataclass(frozen=True)
class IdentityCheck:
    """One catalogued identity.

    ``residual`` is measured against the algebraically correct right-hand
    side.  ``printed_residual`` uses the coefficients of the commonly quoted
    form, and ``printed_ratio`` is the scalar ``c`` minimizing
    ``||P([A,B] - c*printed)P||`` (``nan`` when the printed form is not
    proportional to the commutator).
    """

    label: str
    residual: float
    printed_residual: float
    printed_ratio: complex

    @property
    def holds(self) -> bool:
        return self.residual < 1e-10

    @property
    def printed_holds(self) -> bool:
        return self.printed_residual < 1e-10


def _identity_table(layout):
    q, p = canonical_pair(layout)
    one = identity(layout)
    sx, sy, sz = (pauli(layout, k) for k in "xyz")
    q2, p2 = q @ q, p @ p
    q3 = q2 @ q
    pq = p @ q
    c = p2 - q2
    # (label, A, B, correct rhs, printed rhs)
    return [
        ("[(p2-q2)sz, p2]", c @ sz, p2, (2 * one - 4j * pq) @ sz, (2 * one - 2j * pq) @ sz),
        ("[pq sz, q]", pq @ sz, q, -1j * (q @ sz), -1j * (q @ sz)),
        ("[pq sz, p]", pq @ sz, p, 1j * (p @ sz), 1j * (p @ sz)),
        ("[(p2-q2)sz, sx]", c @ sz, sx, 2j * (c @ sy), 1j * (c @ sy)),
        ("[q sz, sx]", q @ sz, sx, 2j * (q @ sy), 1j * (q @ sy)),
        ("[q sx, q sy]", q @ sx, q @ sy, 2j * (q2 @ sz), 1j * (q2 @ sz)),
        ("[q2 sx, q sy]", q2 @ sx, q @ sy, 2j * (q3 @ sz), 1j * (q3 @ sz)),
        ("[q3 sx, p sy]", q3 @ sx, p @ sy, 1j * ((q3 @ p + p @ q3) @ sz), 1j * ((q3 @ p + p @ q3) @ sz)),
        ("[q3p sz, p sz]", q3 @ p @ sz, p @ sz, 3j * (q2 @ p), 3j * (q2 @ p)),
        ("[q, p]", q, p, 1j * one, 1j * one),
    ]


def identity_catalogue(fock_dim: int = 60, interior_dim: int = 40) -> list:
    """Check every tabulated identity on a qubit (x) Fock(fock_dim) space."""
    layout = HilbertLayout.qubit_modes(fock_dim)
    mask = interior_mask(layout, interior_dim)
    out = []
    for label, a, b, rhs, printed in _identity_table(layout):
        lhs = commutator(a, b)
        res = interior_residual(lhs - rhs, interior_dim)
        pres = interior_residual(lhs - printed, interior_dim)
        u = _block(lhs, mask).ravel()
        v = _block(printed, mask).ravel()
        ratio = np.vdot(v, u) / np.vdot(v, v)
        ratio = ratio if np.abs(u - ratio * v).max() < 1e-10 * max(1.0, np.abs(u).max()) else complex("nan")
        out.append(IdentityCheck(label, res, pres, complex(ratio)))
    return out


# -- closure search --------------------------------------------------------------

@dataclass(frozen=True)
class ClosureEntry:
    depth: int
    label: str
    parents: tuple


@dataclass
class ClosureReport:
    """Outcome of :func:`closure_search`.

    ``reached`` maps a target label to the depth at which it entered the
    span (``None`` if never).  ``residuals`` holds the relative distance of
    each target from the final span.
    """

    entries: list
    reached: dict
    residuals: dict
    interior_projector_dim: int
    max_depth: int
    span_dim: int
    exhausted: bool = False

    def to_dict(self) -> dict:
        return {
            "interior_projector_dim": self.interior_projector_dim,
            "max_depth": self.max_depth,
            "span_dim": self.span_dim,
            "exhausted": self.exhausted,
            "reached": dict(self.reached),
            "residuals": {k: float(v) for k, v in self.residuals.items()},
            "entries": [{"depth": e.depth, "label": e.label, "parents": list(e.parents)} for e in self.entries],
        }


class _Span:
    """Real span of Hermitian matrices, stored as orthonormal real vectors."""

    def __init__(self, tol: float):
        self.tol = tol
        self.basis = []

    @staticmethod
    def vec(h: np.ndarray) -> np.ndarray:
        return np.concatenate([h.real.ravel(), h.imag.ravel()])

    def project_out(self, v: np.ndarray) -> np.ndarray:
        if not self.basis:
            return v
        b = np.array(self.basis)
        for _ in range(2):  # re-orthogonalise once for stability
            v = v - b.T @ (b @ v)
        return v

    def residual(self, v: np.ndarray) -> float:
        n = np.linalg.norm(v)
        if n == 0:
            return 0.0
        return float(np.linalg.norm(self.project_out(v)) / n)

    def add(self, v: np.ndarray, scale: float = None) -> bool:
        """Append ``v`` if its component outside the span is significant.

        Significant means above ``tol * ||v||`` and, for commutators, above
        the roundoff level ``ROUNDOFF * scale`` where ``scale`` is the
        product of the inputs' norms.
        """
        n = np.linalg.norm(v)
        floor = 0.0 if scale is None else ROUNDOFF * scale
        if n == 0 or n <= floor:
            return False
        r = self.project_out(v)
        rn = np.linalg.norm(r)
        if rn <= self.tol * n or rn <= floor:
            return False
        r = self.project_out(r / rn)
        self.basis.append(r / np.linalg.norm(r))
        return True


def _default_interior(layout: HilbertLayout) -> int:
    dims = [layout.dims[i] for i in layout.fock_indices]
    return max(1, min(d - max(MIN_MARGIN, d // 3) for d in dims))


def closure_search(gens: GeneratorSet, max_depth: int, targets: dict, *,
                   interior_dim: Optional[int] = None, tol: float = 1e-8) -> ClosureReport:
    """Breadth-first Lie closure of ``gens`` up to ``max_depth`` nested commutators.

    Depth ``d`` holds the operators ``i[A, B]`` with ``B`` a new element of
    depth ``d - 1`` and ``A`` any element of depth below ``d``.  An element is kept when its
    interior block is independent (relative tolerance ``tol``) of the real
    span found so far.  A target ``T`` counts as reached once both
    ``(T + T^dag)/2`` and ``(T - T^dag)/2i`` lie in the span.
    """
    if max_depth < 1:
        raise ValueError("max_depth must be at least 1")
    layout = gens.layout
    if interior_dim is None:
        interior_dim = _default_interior(layout)
    mask = interior_mask(layout, interior_dim)
    span = _Span(tol)
    entries = []
    tvecs = {}
    for name, t in targets.items():
        if t.layout != layout:
            raise LayoutError(f"target {name!r} lives on a different layout")
        herm = (t + t.dag()) * 0.5
        anti = (t - t.dag()) * (-0.5j)
        vs = [span.vec(_block(x, mask)) for x in (herm, anti)]
        total = max(np.linalg.norm(v) for v in vs)
        # a roundoff-sized part would otherwise look like an independent direction
        tvecs[name] = [v for v in vs if np.linalg.norm(v) > ROUNDOFF * total] or vs[:1]
    reached = {name: None for name in targets}

    def update(depth):
        for name, vs in tvecs.items():
            if reached[name] is None and all(span.residual(v) <= 1e-6 for v in vs):
                reached[name] = depth

    kept = []  # (label, operator, interior norm) of every span element, in order
    for lab, op in gens:
        v = span.vec(_block(op, mask))
        if span.add(v):
            entries.append(ClosureEntry(0, lab, ()))
            kept.append((lab, op, np.linalg.norm(v)))
    update(0)
    frontier = list(kept)
    exhausted = False
    for depth in range(1, max_depth + 1):
        pool = list(kept)
        fresh = {lab for lab, _, _ in frontier}
        nxt = []
        for blab, bop, bnorm in frontier:
            for alab, aop, anorm in pool:
                if alab in fresh and alab >= blab:
                    continue  # each unordered pair of new elements once; [x, x] = 0
                new = commutator(aop, bop) * 1j
                v = span.vec(_block(new, mask))
                if span.add(v, anorm * bnorm):
                    lab = f"i[{alab},{blab}]"
                    entries.append(ClosureEntry(depth, lab, (alab, blab)))
                    nxt.append((lab, new, np.linalg.norm(v)))
        update(depth)
        kept.extend(nxt)
        frontier = nxt
        if not frontier:
            exhausted = True
            break
    residuals = {name: max(span.residual(v) for v in vs) for name, vs in tvecs.items()}
    return ClosureReport(entries, reached, residuals, interior_dim, max_depth, len(span.basis), exhausted)
