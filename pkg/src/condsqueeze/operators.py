"""Operators and states on truncated qubit (x) Fock Hilbert spaces.

Conventions used throughout the package:

* Qubit basis ordering is ``|g> = index 0``, ``|e> = index 1``, and
  ``sigma_z = diag(-1, +1)`` so that ``sigma_z|e> = +|e>``.
* ``sigma_+ = |e><g|``.
* Fock factors of dimension ``N`` hold levels ``0 .. N-1``; the truncated
  annihilator obeys ``[a, a^dag] = I - N |N-1><N-1|``.

Operators carry either a dense ``numpy`` array or a ``scipy.sparse`` matrix.
Ladder and Pauli operators are built sparse because the two-mode spaces
reach a few thousand dimensions; anything produced by an exponential is
dense.  Both behave identically under the algebra defined here.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import Sequence, Union

import numpy as np
import scipy.linalg
import scipy.sparse as sp
from scipy.special import gammaln

from .errors import LayoutError, NumericalError, TruncationError

__all__ = [
    "Qubit", "Fock", "HilbertLayout", "QOperator", "QState",
    "identity", "embed", "annihilator", "creator", "number", "pauli",
    "qubit_projector", "displacement", "squeeze", "conditional_squeeze",
    "matrix_exponential", "expectation", "variance", "commutator", "fidelity",
    "basis_state", "qubit_vector", "fock_vector", "product_state",
    "coherent_vector",
]

Matrix = Union[np.ndarray, sp.spmatrix]


@dataclass(frozen=True)
class Qubit:
    """Two-level factor."""

    @property
    def dim(self) -> int:
        return 2


@dataclass(frozen=True)
class Fock:
    """Truncated harmonic-oscillator factor holding levels ``0 .. dim-1``."""

    dim: int

    def __post_init__(self):
        if int(self.dim) != self.dim or self.dim < 2:
            raise LayoutError(f"Fock dimension must be an integer >= 2, got {self.dim!r}")


@dataclass(frozen=True)
class HilbertLayout:
    """Ordered tensor-product structure of a composite space."""

    factors: tuple

    def __post_init__(self):
        factors = tuple(self.factors)
        object.__setattr__(self, "factors", factors)
        if not factors:
            raise LayoutError("a layout needs at least one factor")
        for f in factors:
            if not isinstance(f, (Qubit, Fock)):
                raise LayoutError(f"unknown factor {f!r}")
        if sum(isinstance(f, Qubit) for f in factors) > 1:
            raise LayoutError("at most one qubit factor is supported")

    @classmethod
    def qubit_modes(cls, *fock_dims: int) -> "HilbertLayout":
        """Qubit followed by one Fock factor per entry of ``fock_dims``."""
        return cls((Qubit(),) + tuple(Fock(int(n)) for n in fock_dims))

    @property
    def dims(self) -> tuple:
        return tuple(f.dim for f in self.factors)

    @property
    def total_dim(self) -> int:
        return int(np.prod(self.dims))

    @property
    def qubit_index(self):
        """Index of the qubit factor, or ``None``."""
        for i, f in enumerate(self.factors):
            if isinstance(f, Qubit):
                return i
        return None

    @property
    def fock_indices(self) -> tuple:
        return tuple(i for i, f in enumerate(self.factors) if isinstance(f, Fock))

    def check_fock(self, index: int) -> Fock:
        if not 0 <= index < len(self.factors):
            raise LayoutError(f"factor index {index} out of range for {len(self.factors)} factors")
        f = self.factors[index]
        if not isinstance(f, Fock):
            raise LayoutError(f"factor {index} is {type(f).__name__}, not Fock")
        return f

    def require_qubit(self) -> int:
        q = self.qubit_index
        if q is None:
            raise LayoutError("layout has no qubit factor")
        return q


class QOperator:
    """Square matrix acting on a :class:`HilbertLayout`.

    Instances are treated as immutable; every algebraic operation returns a
    new operator.
    """

    __slots__ = ("layout", "matrix")

    def __init__(self, layout: HilbertLayout, matrix: Matrix):
        if sp.issparse(matrix):
            matrix = sp.csr_matrix(matrix, dtype=complex)
        else:
            matrix = np.array(matrix, dtype=complex)
            matrix.setflags(write=False)
        n = layout.total_dim
        if matrix.shape != (n, n):
            raise LayoutError(f"matrix shape {matrix.shape} does not match layout dimension {n}")
        self.layout = layout
        self.matrix = matrix

    # -- conversions ---------------------------------------------------
    @property
    def is_sparse(self) -> bool:
        return sp.issparse(self.matrix)

    def dense(self) -> np.ndarray:
        if self.is_sparse:
            return self.matrix.toarray()
        return np.array(self.matrix)

    def sparse(self) -> sp.csr_matrix:
        if self.is_sparse:
            return self.matrix
        return sp.csr_matrix(self.matrix)

    # -- algebra ---------------------------------------------------------
    def _check(self, other: "QOperator"):
        if not isinstance(other, QOperator):
            return NotImplemented
        if other.layout != self.layout:
            raise LayoutError("operators live on different layouts")
        return other

    def __add__(self, other):
        if self._check(other) is NotImplemented:
            return NotImplemented
        return QOperator(self.layout, _sum(self.matrix, other.matrix))

    def __sub__(self, other):
        if self._check(other) is NotImplemented:
            return NotImplemented
        return QOperator(self.layout, _sum(self.matrix, -other.matrix))

    def __neg__(self):
        return QOperator(self.layout, -self.matrix)

    def __mul__(self, scalar):
        if isinstance(scalar, QOperator):
            return NotImplemented
        return QOperator(self.layout, self.matrix * complex(scalar))

    __rmul__ = __mul__

    def __truediv__(self, scalar):
        return self * (1.0 / complex(scalar))

    def __matmul__(self, other):
        if isinstance(other, QState):
            if other.layout != self.layout:
                raise LayoutError("operator and state live on different layouts")
            return QState(self.layout, self.matrix @ other.vector)
        if self._check(other) is NotImplemented:
            return NotImplemented
        return QOperator(self.layout, self.matrix @ other.matrix)

    def __pow__(self, k: int):
        out = identity(self.layout)
        for _ in range(int(k)):
            out = out @ self
        return out

    def dag(self) -> "QOperator":
        return QOperator(self.layout, self.matrix.conj().T)

    # -- predicates ------------------------------------------------------
    def max_abs(self) -> float:
        m = self.matrix
        if self.is_sparse:
            return float(abs(m).max()) if m.nnz else 0.0
        return float(np.abs(m).max())

    def is_hermitian(self, tol: float = 1e-10) -> bool:
        return (self - self.dag()).max_abs() <= tol * max(1.0, self.max_abs())

    def is_unitary(self, tol: float = 1e-8) -> bool:
        return (self.dag() @ self - identity(self.layout)).max_abs() <= tol

    def __repr__(self):
        kind = "sparse" if self.is_sparse else "dense"
        return f"QOperator(dims={self.layout.dims}, {kind})"


class QState:
    """State vector on a :class:`HilbertLayout`."""

    __slots__ = ("layout", "vector")

    def __init__(self, layout: HilbertLayout, vector):
        vector = np.array(vector, dtype=complex).reshape(-1)
        if vector.shape[0] != layout.total_dim:
            raise LayoutError(f"vector length {vector.shape[0]} does not match layout dimension {layout.total_dim}")
        if not np.all(np.isfinite(vector)):
            raise NumericalError("state vector has non-finite entries")
        vector.setflags(write=False)
        self.layout = layout
        self.vector = vector

    def norm(self) -> float:
        return float(np.linalg.norm(self.vector))

    def normalized(self) -> "QState":
        n = self.norm()
        if n == 0:
            raise NumericalError("cannot normalize the zero vector")
        return QState(self.layout, self.vector / n)

    def tensor(self) -> np.ndarray:
        """Amplitudes reshaped to one axis per factor."""
        return self.vector.reshape(self.layout.dims)

    def populations(self, factor_index: int) -> np.ndarray:
        """Marginal level populations of one factor."""
        p = np.abs(self.tensor()) ** 2
        axes = tuple(i for i in range(len(self.layout.factors)) if i != factor_index)
        return p.sum(axis=axes)

    def __repr__(self):
        return f"QState(dims={self.layout.dims})"


def _sum(a: Matrix, b: Matrix) -> Matrix:
    if sp.issparse(a) and sp.issparse(b):
        return a + b
    if sp.issparse(a):
        a = a.toarray()
    if sp.issparse(b):
        b = b.toarray()
    return a + b


# -- local building blocks -------------------------------------------------

@lru_cache(maxsize=64)
def _ladder(n: int) -> sp.csr_matrix:
    m = sp.diags(np.sqrt(np.arange(1, n, dtype=float)), 1, shape=(n, n), format="csr")
    return m.astype(complex)


_PAULI = {
    "x": np.array([[0, 1], [1, 0]], dtype=complex),
    "y": np.array([[0, 1j], [-1j, 0]], dtype=complex),
    "z": np.array([[-1, 0], [0, 1]], dtype=complex),
    "plus": np.array([[0, 0], [1, 0]], dtype=complex),
    "minus": np.array([[0, 1], [0, 0]], dtype=complex),
}
# y is fixed by [sigma_x, sigma_y] = 2i sigma_z and sigma_y = -i(sigma_+ - sigma_-)


def embed(layout: HilbertLayout, factor_index: int, local: Matrix) -> QOperator:
    """Place ``local`` on one factor with identities elsewhere."""
    dims = layout.dims
    if not 0 <= factor_index < len(dims):
        raise LayoutError(f"factor index {factor_index} out of range")
    local = sp.csr_matrix(local, dtype=complex)
    if local.shape != (dims[factor_index],) * 2:
        raise LayoutError(f"local operator shape {local.shape} does not match factor dim {dims[factor_index]}")
    left = int(np.prod(dims[:factor_index]))
    right = int(np.prod(dims[factor_index + 1:]))
    m = local
    if left > 1:
        m = sp.kron(sp.identity(left, format="csr"), m, format="csr")
    if right > 1:
        m = sp.kron(m, sp.identity(right, format="csr"), format="csr")
    return QOperator(layout, m)


def identity(layout: HilbertLayout) -> QOperator:
    return QOperator(layout, sp.identity(layout.total_dim, dtype=complex, format="csr"))


def annihilator(layout: HilbertLayout, factor_index: int) -> QOperator:
    """Truncated annihilation operator of a Fock factor."""
    f = layout.check_fock(factor_index)
    return embed(layout, factor_index, _ladder(f.dim))


def creator(layout: HilbertLayout, factor_index: int) -> QOperator:
    return annihilator(layout, factor_index).dag()


def number(layout: HilbertLayout, factor_index: int) -> QOperator:
    f = layout.check_fock(factor_index)
    return embed(layout, factor_index, sp.diags(np.arange(f.dim, dtype=complex)))


def pauli(layout: HilbertLayout, which: str) -> QOperator:
    """Embedded Pauli matrix; ``which`` is one of x, y, z, plus, minus."""
    q = layout.require_qubit()
    try:
        local = _PAULI[which]
    except KeyError:
        raise ValueError(f"unknown Pauli label {which!r}") from None
    return embed(layout, q, local)


def qubit_projector(layout: HilbertLayout, level: str) -> QOperator:
    """``|g><g|`` or ``|e><e|`` on the qubit factor."""
    q = layout.require_qubit()
    local = np.zeros((2, 2), dtype=complex)
    local[_QUBIT_LEVEL[level], _QUBIT_LEVEL[level]] = 1.0
    return embed(layout, q, local)


_QUBIT_LEVEL = {"g": 0, "e": 1}


def _amplitude_guard(dim: int, size: float, what: str):
    if size >= dim / 4:
        raise TruncationError(
            f"{what} too large for truncation: {size:.4g} >= dim/4 = {dim / 4:.4g}"
        )


def _local_expm(layout: HilbertLayout, factor_index: int, generator: np.ndarray) -> QOperator:
    return embed(layout, factor_index, scipy.linalg.expm(generator))


def displacement(layout: HilbertLayout, factor_index: int, alpha: complex) -> QOperator:
    """``D(alpha) = exp(alpha a^dag - alpha^* a)`` on a Fock factor."""
    f = layout.check_fock(factor_index)
    alpha = complex(alpha)
    _amplitude_guard(f.dim, abs(alpha) ** 2, "|alpha|^2")
    a = _ladder(f.dim).toarray()
    return _local_expm(layout, factor_index, alpha * a.conj().T - alpha.conjugate() * a)


def squeeze(layout: HilbertLayout, factor_index: int, xi: complex) -> QOperator:
    """``S(xi) = exp((xi^* a^2 - xi a^dag^2) / 2)`` on a Fock factor.

    For real positive ``r``, ``S(r)|0>`` has ``Var(X) = exp(-2r)/4`` with
    ``X = (a + a^dag)/2``.
    """
    f = layout.check_fock(factor_index)
    xi = complex(xi)
    _amplitude_guard(f.dim, np.sinh(abs(xi)) ** 2, "sinh^2|xi|")
    a = _ladder(f.dim).toarray()
    a2 = a @ a
    return _local_expm(layout, factor_index, 0.5 * (xi.conjugate() * a2 - xi * a2.conj().T))


def conditional_squeeze(layout: HilbertLayout, factor_index: int, xi: complex) -> QOperator:
    """``CS(xi) = |e><e| (x) S(xi) + |g><g| (x) S(-xi)``."""
    layout.require_qubit()
    return (qubit_projector(layout, "e") @ squeeze(layout, factor_index, xi)
            + qubit_projector(layout, "g") @ squeeze(layout, factor_index, -xi))


def matrix_exponential(op: QOperator, scale: complex = 1.0) -> QOperator:
    """Dense ``exp(scale * op)``.

    A Hermitian ``op`` with purely imaginary ``scale`` goes through an
    eigendecomposition, which keeps the result unitary to machine precision.
    Everything else uses Pade scaling-and-squaring.
    """
    m = op.dense()
    if not np.all(np.isfinite(m)) or not np.isfinite(complex(scale)):
        raise NumericalError("matrix exponential of non-finite input")
    scale = complex(scale)
    if scale.real == 0 and op.is_hermitian(1e-12):
        w, v = np.linalg.eigh(0.5 * (m + m.conj().T))
        return QOperator(op.layout, (v * np.exp(scale * w)) @ v.conj().T)
    return QOperator(op.layout, scipy.linalg.expm(scale * m))


def expectation(state: QState, op: QOperator) -> complex:
    if state.layout != op.layout:
        raise LayoutError("state and operator live on different layouts")
    return complex(np.vdot(state.vector, op.matrix @ state.vector))


def variance(state: QState, op: QOperator) -> float:
    """Variance of a Hermitian observable."""
    if not op.is_hermitian():
        raise ValueError("variance needs a Hermitian operator")
    v = op.matrix @ state.vector
    mean = np.vdot(state.vector, v).real
    return float(np.vdot(v, v).real - mean ** 2)


def commutator(a: QOperator, b: QOperator) -> QOperator:
    return a @ b - b @ a


def fidelity(a: QState, b: QState) -> float:
    """Pure-state fidelity ``|<a|b>|^2``."""
    if a.layout != b.layout:
        raise LayoutError("states live on different layouts")
    return float(abs(np.vdot(a.vector, b.vector)) ** 2)


# -- states ----------------------------------------------------------------

def qubit_vector(label) -> np.ndarray:
    """Qubit amplitudes for ``g``, ``e``, ``+`` or ``-``, or explicit pairs."""
    if isinstance(label, str):
        table = {
            "g": [1, 0],
            "e": [0, 1],
            "+": [1 / np.sqrt(2), 1 / np.sqrt(2)],
            "-": [1 / np.sqrt(2), -1 / np.sqrt(2)],
        }
        try:
            return np.array(table[label], dtype=complex)
        except KeyError:
            raise ValueError(f"unknown qubit state {label!r}") from None
    v = np.asarray(label, dtype=complex)
    return v / np.linalg.norm(v)


def fock_vector(dim: int, n: int) -> np.ndarray:
    v = np.zeros(dim, dtype=complex)
    v[n] = 1.0
    return v


def coherent_vector(dim: int, alpha: complex) -> np.ndarray:
    """Truncated coherent-state amplitudes, renormalized on the truncation."""
    _amplitude_guard(dim, abs(alpha) ** 2, "|alpha|^2")
    n = np.arange(dim)
    logmag = n * np.log(abs(alpha)) - 0.5 * gammaln(n + 1) if alpha != 0 else np.where(n == 0, 0.0, -np.inf)
    v = np.exp(logmag - abs(alpha) ** 2 / 2) * np.exp(1j * n * np.angle(alpha))
    return v / np.linalg.norm(v)


def product_state(layout: HilbertLayout, components: Sequence) -> QState:
    """Tensor product of per-factor amplitude vectors."""
    if len(components) != len(layout.factors):
        raise LayoutError("need one component per factor")
    v = np.ones(1, dtype=complex)
    for f, c in zip(layout.factors, components):
        c = np.asarray(c, dtype=complex)
        if c.shape != (f.dim,):
            raise LayoutError(f"component of length {c.shape} for factor of dim {f.dim}")
        v = np.kron(v, c)
    return QState(layout, v)


def basis_state(layout: HilbertLayout, levels: Sequence) -> QState:
    """Product basis state; qubit entries may be ``'g'``/``'e'`` or 0/1."""
    comps = []
    for f, lvl in zip(layout.factors, levels):
        if isinstance(f, Qubit):
            comps.append(qubit_vector(lvl) if isinstance(lvl, str) else fock_vector(2, int(lvl)))
        else:
            comps.append(fock_vector(f.dim, int(lvl)))
    return product_state(layout, comps)
