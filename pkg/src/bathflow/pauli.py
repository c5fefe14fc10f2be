"""Pauli-string algebra for real-coefficient qubit operators.

Strings are stored as a pair of bit masks (X-part, Z-part). Qubit 0 is the
leftmost tensor factor and corresponds to the most significant bit of a
computational-basis index, so ``|q0 q1 ... q_{n-1}>`` has index
``sum(q_i << (n - 1 - i))``. The single-qubit matrices follow the usual
convention ``Z = diag(+1, -1)``, ``X = [[0, 1], [1, 0]]``,
``Y = [[0, -i], [i, 0]]``.

A string with masks ``(x, z)`` acts as
``P |a> = i^{popcount(x & z)} (-1)^{popcount(a & z)} |a ^ x>``.
"""

from __future__ import annotations

import enum
import re
from dataclasses import dataclass
from types import MappingProxyType
from typing import Iterable, Iterator, Mapping

import numpy as np

PRUNE_TOL = 1e-14
MAX_DENSE_QUBITS = 14
HERMITIAN_TOL = 1e-12


class PauliAxis(enum.Enum):
    I = (0, 0)
    X = (1, 0)
    Y = (1, 1)
    Z = (0, 1)

    @property
    def x(self) -> int:
        return self.value[0]

    @property
    def z(self) -> int:
        return self.value[1]

    def anticommutes_with_z(self) -> bool:
        return bool(self.x)


_AXIS_BY_BITS = {axis.value: axis for axis in PauliAxis}


class DimensionError(ValueError):
    """Dense realization requested beyond the configured qubit limit."""


class PauliParseError(ValueError):
    def __init__(self, message: str, position: int):
        super().__init__(f"{message} (at position {position})")
        self.position = position


@dataclass(frozen=True, order=True)
class PauliString:
    """Tensor product of single-qubit Paulis encoded as X/Z bit masks."""

    n: int
    x: int = 0
    z: int = 0

    def __post_init__(self):
        if self.n < 1:
            raise ValueError("a Pauli string needs at least one qubit")
        full = (1 << self.n) - 1
        if self.x & ~full or self.z & ~full:
            raise ValueError("bit masks exceed the qubit count")

    @classmethod
    def from_label(cls, label: str) -> PauliString:
        label = label.strip().upper()
        if not label:
            raise ValueError("empty Pauli label")
        x = z = 0
        for ch in label:
            try:
                axis = PauliAxis[ch]
            except KeyError:
                raise ValueError(f"invalid Pauli letter {ch!r} in {label!r}") from None
            x = (x << 1) | axis.x
            z = (z << 1) | axis.z
        return cls(len(label), x, z)

    @classmethod
    def from_axes(cls, axes: Iterable[PauliAxis | str]) -> PauliString:
        return cls.from_label("".join(a.name if isinstance(a, PauliAxis) else a for a in axes))

    @classmethod
    def identity(cls, n: int) -> PauliString:
        return cls(n)

    @classmethod
    def single(cls, n: int, qubit: int, axis: PauliAxis | str) -> PauliString:
        axes = ["I"] * n
        axes[qubit] = axis.name if isinstance(axis, PauliAxis) else axis
        return cls.from_label("".join(axes))

    def _bit(self, qubit: int) -> int:
        return self.n - 1 - qubit

    def axis(self, qubit: int) -> PauliAxis:
        if not 0 <= qubit < self.n:
            raise IndexError(qubit)
        b = self._bit(qubit)
        return _AXIS_BY_BITS[((self.x >> b) & 1, (self.z >> b) & 1)]

    @property
    def axes(self) -> tuple[PauliAxis, ...]:
        return tuple(self.axis(i) for i in range(self.n))

    @property
    def label(self) -> str:
        return "".join(a.name for a in self.axes)

    @property
    def weight(self) -> int:
        return (self.x | self.z).bit_count()

    @property
    def y_count(self) -> int:
        return (self.x & self.z).bit_count()

    def is_identity(self) -> bool:
        return self.x == 0 and self.z == 0

    def support(self) -> frozenset[int]:
        mask = self.x | self.z
        return frozenset(i for i in range(self.n) if (mask >> self._bit(i)) & 1)

    def __str__(self) -> str:
        return self.label

    def __repr__(self) -> str:
        return f"PauliString({self.label!r})"


def anticommuting_support(s: PauliString) -> frozenset[int]:
    """Qubits on which ``s`` anticommutes with the local Z coupling (X or Y factors)."""
    return frozenset(i for i in range(s.n) if (s.x >> (s.n - 1 - i)) & 1)


def _as_string(key: PauliString | str) -> PauliString:
    return key if isinstance(key, PauliString) else PauliString.from_label(key)


class PauliOperator:
    """Immutable sparse map from Pauli strings to real coefficients.

    Duplicate keys are summed on construction and coefficients with magnitude
    below ``prune`` are dropped.
    """

    __slots__ = ("n", "_terms")

    def __init__(
        self,
        n: int,
        terms: Mapping[PauliString | str, float] | Iterable[tuple[PauliString | str, float]] = (),
        *,
        prune: float = PRUNE_TOL,
    ):
        if n < 1:
            raise ValueError("qubit count must be positive")
        items = terms.items() if isinstance(terms, Mapping) else terms
        acc: dict[PauliString, float] = {}
        for key, coef in items:
            s = _as_string(key)
            if s.n != n:
                raise ValueError(f"string {s.label} has length {s.n}, expected {n}")
            c = complex(coef)
            if c.imag != 0.0:
                raise ValueError(f"coefficient of {s.label} is not real: {coef!r}")
            acc[s] = acc.get(s, 0.0) + c.real
        self.n = n
        self._terms = MappingProxyType({s: c for s, c in acc.items() if abs(c) >= prune})

    # -- construction helpers -------------------------------------------------
    @classmethod
    def from_labels(cls, terms: Mapping[str, float]) -> PauliOperator:
        if not terms:
            raise ValueError("cannot infer qubit count from an empty mapping")
        n = len(next(iter(terms)))
        return cls(n, terms)

    @classmethod
    def from_text(cls, text: str, n: int | None = None) -> PauliOperator:
        return parse_pauli_text(text, n)

    @classmethod
    def zero(cls, n: int) -> PauliOperator:
        return cls(n)

    # -- mapping-like access --------------------------------------------------
    @property
    def terms(self) -> Mapping[PauliString, float]:
        return self._terms

    def items(self):
        return self._terms.items()

    def __iter__(self) -> Iterator[PauliString]:
        return iter(self._terms)

    def __len__(self) -> int:
        return len(self._terms)

    def __getitem__(self, key: PauliString | str) -> float:
        return self._terms.get(_as_string(key), 0.0)

    def __contains__(self, key) -> bool:
        return _as_string(key) in self._terms

    def labels(self) -> dict[str, float]:
        return {s.label: c for s, c in self._terms.items()}

    @property
    def locality(self) -> int:
        return max((s.weight for s in self._terms), default=0)

    def is_real_matrix(self) -> bool:
        """True when the dense form has real entries (every string has an even number of Y)."""
        return all(s.y_count % 2 == 0 for s in self._terms)

    # -- arithmetic -----------------------------------------------------------
    def __add__(self, other: PauliOperator) -> PauliOperator:
        if not isinstance(other, PauliOperator):
            return NotImplemented
        if other.n != self.n:
            raise ValueError("qubit counts differ")
        return PauliOperator(self.n, [*self.items(), *other.items()])

    def __neg__(self) -> PauliOperator:
        return self * -1.0

    def __sub__(self, other: PauliOperator) -> PauliOperator:
        return self + (-other)

    def __mul__(self, scalar: float) -> PauliOperator:
        return PauliOperator(self.n, {s: scalar * c for s, c in self.items()})

    __rmul__ = __mul__

    def __eq__(self, other) -> bool:
        if not isinstance(other, PauliOperator):
            return NotImplemented
        return self.n == other.n and dict(self._terms) == dict(other._terms)

    def __hash__(self):
        return hash((self.n, frozenset(self._terms.items())))

    def allclose(self, other: PauliOperator, atol: float = 1e-12, rtol: float = 0.0) -> bool:
        if self.n != other.n:
            return False
        for s in set(self._terms) | set(other._terms):
            a, b = self[s], other[s]
            if abs(a - b) > atol + rtol * abs(b):
                return False
        return True

    def __str__(self) -> str:
        return format_pauli_text(self)

    def __repr__(self) -> str:
        return f"PauliOperator({self.n}, {self.labels()!r})"


def coefficient_norm(op: PauliOperator) -> float:
    """Sum of absolute coefficients.

    This is the norm used by the stopping criterion of the scaling flow; it
    upper-bounds the spectral norm since every Pauli string has norm one.
    """
    return float(sum(abs(c) for c in op.terms.values()))


# -- dense conversion ---------------------------------------------------------

_I_POWERS = np.array([1.0, 1j, -1.0, -1j])


def _parity(a: np.ndarray, mask: int) -> np.ndarray:
    return np.bitwise_count(a & mask) & 1


def _string_phase(s: PauliString, cols: np.ndarray) -> np.ndarray:
    sign = 1.0 - 2.0 * _parity(cols, s.z)
    ny = s.y_count % 4
    if ny % 2 == 0:
        return sign if ny == 0 else -sign
    return _I_POWERS[ny] * sign


def to_dense(
    op: PauliOperator,
    *,
    max_qubits: int = MAX_DENSE_QUBITS,
    basis: np.ndarray | None = None,
) -> np.ndarray:
    """Dense matrix of ``op``; real dtype when no entry can be imaginary.

    ``basis`` restricts the result to the block spanned by the given
    (ascending) computational-basis indices, which is exact whenever that
    subspace is invariant under ``op``.
    """
    n = op.n
    if n > max_qubits:
        raise DimensionError(f"{n} qubits exceeds the dense limit of {max_qubits}")
    dim = 1 << n
    dtype = np.float64 if op.is_real_matrix() else np.complex128
    if basis is None:
        cols = np.arange(dim, dtype=np.int64)
        out = np.zeros((dim, dim), dtype=dtype)
        for s, c in op.items():
            out[cols ^ s.x, cols] += c * _string_phase(s, cols)
        return out

    cols_full = np.asarray(basis, dtype=np.int64)
    pos = np.full(dim, -1, dtype=np.int64)
    pos[cols_full] = np.arange(cols_full.size)
    out = np.zeros((cols_full.size, cols_full.size), dtype=dtype)
    for s, c in op.items():
        rows = pos[cols_full ^ s.x]
        keep = rows >= 0
        out[rows[keep], np.flatnonzero(keep)] += c * _string_phase(s, cols_full[keep])
    return out


def pauli_matrix(s: PauliString | str) -> np.ndarray:
    s = _as_string(s)
    return to_dense(PauliOperator(s.n, {s: 1.0}), max_qubits=max(s.n, MAX_DENSE_QUBITS))


def _walsh_hadamard(v: np.ndarray) -> np.ndarray:
    """Unnormalized fast Walsh-Hadamard transform along the last axis."""
    lead = v.shape[:-1]
    dim = v.shape[-1]
    h = 1
    out = v.copy()
    while h < dim:
        out = out.reshape(*lead, dim // (2 * h), 2, h)
        a = out[..., 0, :]
        b = out[..., 1, :]
        out = np.stack((a + b, a - b), axis=-2)
        h *= 2
    return out.reshape(*lead, dim)


def from_dense(a: np.ndarray, *, tol: float = HERMITIAN_TOL, prune: float = PRUNE_TOL) -> PauliOperator:
    """Hilbert-Schmidt projection onto Pauli strings, ``c_s = 2^-n Tr[a P_s]``.

    Runs in ``O(n 4^n)``: for each X-mask the shifted diagonal ``a[k, k ^ x]``
    is Walsh-Hadamard transformed over the Z-masks.
    """
    a = np.asarray(a)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValueError("expected a square matrix")
    dim = a.shape[0]
    n = dim.bit_length() - 1
    if dim < 2 or dim != 1 << n:
        raise ValueError(f"dimension {dim} is not a power of two")
    scale = max(1.0, float(np.max(np.abs(a))))
    if np.max(np.abs(a - a.conj().T)) > tol * scale:
        raise ValueError("matrix is not Hermitian within tolerance")

    idx = np.arange(dim, dtype=np.int64)
    shifted = a[idx[None, :], idx[None, :] ^ idx[:, None]]  # [x, k] -> a[k, k ^ x]
    traces = _walsh_hadamard(shifted.astype(np.complex128))  # [x, z]
    ny = np.bitwise_count(idx[:, None] & idx[None, :]) % 4
    coeffs = _I_POWERS[ny] * traces / dim

    terms = {}
    xs, zs = np.nonzero(np.abs(coeffs) >= prune)
    for x, z in zip(xs.tolist(), zs.tolist()):
        terms[PauliString(n, x, z)] = coeffs[x, z].real
    return PauliOperator(n, terms, prune=prune)


# -- text notation -------------------------------------------------------------

_NUMBER = r"[+-]?(?:\d+(?:\.\d*)?|\.\d+)(?:[eE][+-]?\d+)?"
_TERM = re.compile(
    rf"\s*(?P<op>[+-])?\s*(?:(?P<coef>{_NUMBER})\s*\*\s*)?(?P<label>[A-Za-z]+)\s*"
)
_ZERO = re.compile(r"\s*(?:[+-]?(?:0+\.?0*|\.0+))?\s*")


def parse_pauli_text(text: str, n: int | None = None) -> PauliOperator:
    """Parse ``"0.5*XXI + 0.25*ZZI"``-style text.

    Terms are separated by ``+`` or ``-``; a missing coefficient means 1.
    The literal ``"0"`` (or an empty string) is the zero operator and then
    requires ``n``.
    """
    if _ZERO.fullmatch(text):
        if n is None:
            raise PauliParseError("zero operator needs an explicit qubit count", 0)
        return PauliOperator(n)
    pos = 0
    terms: list[tuple[PauliString, float]] = []
    while pos < len(text):
        m = _TERM.match(text, pos)
        if m is None or m.end() == pos:
            raise PauliParseError(f"cannot parse term starting with {text[pos:pos + 8]!r}", pos)
        if terms and m.group("op") is None:
            raise PauliParseError("expected '+' or '-' between terms", m.start("label") if m.group("coef") is None else m.start("coef"))
        label = m.group("label")
        bad = next((i for i, ch in enumerate(label) if ch not in "IXYZ"), None)
        if bad is not None:
            raise PauliParseError(f"invalid Pauli letter {label[bad]!r}", m.start("label") + bad)
        if n is None:
            n = len(label)
        elif len(label) != n:
            raise PauliParseError(f"string {label!r} has length {len(label)}, expected {n}", m.start("label"))
        coef = float(m.group("coef")) if m.group("coef") is not None else 1.0
        if m.group("op") == "-":
            coef = -coef
        terms.append((PauliString.from_label(label), coef))
        pos = m.end()
    if not terms:
        raise PauliParseError("no terms found", 0)
    return PauliOperator(n, terms)


def format_number(value: float) -> str:
    return f"{value:.12g}"


def format_pauli_text(op: PauliOperator) -> str:
    if not len(op):
        return "0"
    parts = []
    for i, (s, c) in enumerate(op.items()):
        if i == 0:
            parts.append(f"{format_number(c)}*{s.label}")
        elif c < 0:
            parts.append(f" - {format_number(-c)}*{s.label}")
        else:
            parts.append(f" + {format_number(c)}*{s.label}")
    return "".join(parts)
