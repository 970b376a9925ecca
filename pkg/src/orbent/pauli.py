"""Multi-qubit Pauli strings and complex-weighted sums of them.

A string is stored in symplectic form: two integers whose bit ``q`` holds the
X and Z component on qubit ``q``. With the per-qubit convention
``Y = i X Z`` the operator is ``i^{|x & z|} X^x Z^z``, which makes products a
matter of XOR plus a phase computed from popcounts.

Statevectors are dense numpy arrays in big-endian order: qubit 0 is the most
significant bit of the basis index, so ``|q0 q1 ... q_{n-1}>`` reads left to
right like the occupation strings used elsewhere in the package.
"""
from __future__ import annotations

import re
from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, Mapping

import numpy as np

PRUNE_TOL = 1e-14
NORM_TOL = 1e-12

_PHASES = (1, 1j, -1, -1j)
_LETTER = {(0, 0): "I", (1, 0): "X", (1, 1): "Y", (0, 1): "Z"}
_BITS = {v: k for k, v in _LETTER.items()}
_TOKEN = re.compile(r"([IXYZ])(\d+)")


class DimensionError(ValueError):
    """Operands act on different numbers of qubits."""


def _popcount(v: int) -> int:
    return bin(v).count("1")


def _reverse_bits(v: int, n: int) -> int:
    return int(format(v, f"0{n}b")[::-1], 2) if n else 0


@dataclass(frozen=True, order=False)
class PauliString:
    """Tensor product of I/X/Y/Z on ``n_qubits`` qubits, without a phase."""

    n_qubits: int
    x_mask: int = 0
    z_mask: int = 0

    def __post_init__(self):
        if self.n_qubits < 1:
            raise ValueError("n_qubits must be positive")
        limit = 1 << self.n_qubits
        if not (0 <= self.x_mask < limit and 0 <= self.z_mask < limit):
            raise ValueError("mask has bits beyond n_qubits")

    @classmethod
    def identity(cls, n_qubits: int) -> PauliString:
        return cls(n_qubits)

    @classmethod
    def from_letters(cls, letters: Mapping[int, str], n_qubits: int) -> PauliString:
        x = z = 0
        for q, letter in letters.items():
            if not 0 <= q < n_qubits:
                raise ValueError(f"qubit {q} out of range for {n_qubits} qubits")
            bx, bz = _BITS[letter.upper()]
            x |= bx << q
            z |= bz << q
        return cls(n_qubits, x, z)

    @classmethod
    def from_label(cls, label: str, n_qubits: int) -> PauliString:
        """Parse ``"X0 Y1 Z3"``; ``"I"`` or an empty label is the identity."""
        label = label.strip()
        if label in ("", "I"):
            return cls(n_qubits)
        letters = {}
        for token in label.split():
            m = _TOKEN.fullmatch(token)
            if m is None:
                raise ValueError(f"bad Pauli token {token!r}")
            q = int(m.group(2))
            if q in letters:
                raise ValueError(f"qubit {q} repeated in {label!r}")
            letters[q] = m.group(1)
        return cls.from_letters(letters, n_qubits)

    @classmethod
    def from_dense(cls, text: str) -> PauliString:
        """Parse a positional string such as ``"XYIZ"`` (qubit 0 first)."""
        return cls.from_letters(dict(enumerate(text)), len(text))

    def letter(self, q: int) -> str:
        return _LETTER[((self.x_mask >> q) & 1, (self.z_mask >> q) & 1)]

    @property
    def label(self) -> str:
        parts = [f"{self.letter(q)}{q}" for q in range(self.n_qubits) if self.letter(q) != "I"]
        return " ".join(parts) if parts else "I"

    @property
    def dense(self) -> str:
        return "".join(self.letter(q) for q in range(self.n_qubits))

    @property
    def support(self) -> int:
        return self.x_mask | self.z_mask

    @property
    def weight(self) -> int:
        return _popcount(self.support)

    @property
    def is_identity(self) -> bool:
        return self.x_mask == 0 and self.z_mask == 0

    @property
    def sort_key(self) -> tuple[int, int]:
        return (self.z_mask, self.x_mask)

    def __str__(self) -> str:
        return self.label

    def __repr__(self) -> str:
        return f"PauliString({self.label!r}, n_qubits={self.n_qubits})"

    def _check(self, other: PauliString) -> None:
        if self.n_qubits != other.n_qubits:
            raise DimensionError(f"{self.n_qubits} vs {other.n_qubits} qubits")

    def __mul__(self, other):
        if isinstance(other, PauliString):
            phase, prod = multiply(self, other)
            return PauliSum({prod: phase})
        return NotImplemented

    def commutes(self, other: PauliString) -> bool:
        return commutes(self, other)

    @cached_property
    def _index_masks(self) -> tuple[int, int]:
        # masks re-expressed in the big-endian basis-index convention
        n = self.n_qubits
        return _reverse_bits(self.x_mask, n), _reverse_bits(self.z_mask, n)

    def apply(self, state: np.ndarray) -> np.ndarray:
        """Return ``P @ state`` without forming the 2^n x 2^n matrix."""
        state = np.asarray(state)
        dim = 1 << self.n_qubits
        if state.shape[0] != dim:
            raise DimensionError(f"state has dimension {state.shape[0]}, expected {dim}")
        xi, zi = self._index_masks
        idx = np.arange(dim)
        sign = 1 - 2 * (np.bitwise_count(idx & zi).astype(np.int64) & 1)
        phase = _PHASES[_popcount(self.x_mask & self.z_mask) % 4]
        out = np.empty(state.shape, dtype=complex)
        # (P psi)[b ^ x] = phase * (-1)^{b.z} psi[b]
        out[idx ^ xi] = phase * (sign.reshape((-1,) + (1,) * (state.ndim - 1)) * state)
        return out

    def to_matrix(self) -> np.ndarray:
        dim = 1 << self.n_qubits
        return self.apply(np.eye(dim, dtype=complex))


def multiply(a: PauliString, b: PauliString) -> tuple[complex, PauliString]:
    """Return ``(phase, product)`` with ``a @ b == phase * product``."""
    a._check(b)
    x = a.x_mask ^ b.x_mask
    z = a.z_mask ^ b.z_mask
    k = (
        _popcount(a.x_mask & a.z_mask)
        + _popcount(b.x_mask & b.z_mask)
        - _popcount(x & z)
        + 2 * _popcount(a.z_mask & b.x_mask)
    )
    return _PHASES[k % 4], PauliString(a.n_qubits, x, z)


def commutes(a: PauliString, b: PauliString) -> bool:
    a._check(b)
    return (_popcount(a.x_mask & b.z_mask) + _popcount(a.z_mask & b.x_mask)) % 2 == 0


class PauliSum:
    """Immutable linear combination of Pauli strings with complex weights.

    Duplicate strings are merged and weights with magnitude below
    ``PRUNE_TOL`` are dropped, so two sums compare equal when they represent
    the same operator up to that tolerance.
    """

    __slots__ = ("n_qubits", "_terms")

    def __init__(self, terms: Mapping[PauliString, complex] | Iterable[tuple[complex, PauliString]] = (), n_qubits: int | None = None):
        acc: dict[PauliString, complex] = {}
        items = terms.items() if isinstance(terms, Mapping) else ((s, c) for c, s in terms)
        for string, coeff in items:
            coeff = complex(coeff)
            if not np.isfinite(coeff):
                raise ValueError("non-finite coefficient")
            if n_qubits is None:
                n_qubits = string.n_qubits
            elif string.n_qubits != n_qubits:
                raise DimensionError(f"{string.n_qubits} vs {n_qubits} qubits")
            acc[string] = acc.get(string, 0j) + coeff
        if n_qubits is None:
            raise ValueError("cannot infer n_qubits of an empty PauliSum")
        self.n_qubits = n_qubits
        kept = [(s, c) for s, c in acc.items() if abs(c) >= PRUNE_TOL]
        kept.sort(key=lambda t: t[0].sort_key)
        self._terms = tuple(kept)

    @classmethod
    def identity(cls, n_qubits: int, coeff: complex = 1.0) -> PauliSum:
        return cls({PauliString(n_qubits): coeff})

    @classmethod
    def zero(cls, n_qubits: int) -> PauliSum:
        return cls({}, n_qubits=n_qubits)

    @classmethod
    def from_labels(cls, pairs: Iterable[tuple[complex, str]], n_qubits: int) -> PauliSum:
        return cls([(c, PauliString.from_label(lbl, n_qubits)) for c, lbl in pairs], n_qubits=n_qubits)

    @property
    def terms(self) -> tuple[tuple[PauliString, complex], ...]:
        return self._terms

    @property
    def strings(self) -> list[PauliString]:
        return [s for s, _ in self._terms]

    def coeff(self, string: PauliString) -> complex:
        for s, c in self._terms:
            if s == string:
                return c
        return 0j

    def __len__(self) -> int:
        return len(self._terms)

    def __iter__(self):
        return iter(self._terms)

    def __eq__(self, other) -> bool:
        if not isinstance(other, PauliSum):
            return NotImplemented
        return self.n_qubits == other.n_qubits and (self - other).is_zero()

    def __hash__(self):
        return hash((self.n_qubits, self._terms))

    def is_zero(self) -> bool:
        return len(self._terms) == 0

    def allclose(self, other: PauliSum, atol: float = 1e-12) -> bool:
        return all(abs(c) <= atol for _, c in (self - other).terms)

    def __add__(self, other):
        if isinstance(other, PauliSum):
            merged = list((c, s) for s, c in self._terms) + list((c, s) for s, c in other._terms)
            return PauliSum(merged, n_qubits=self._same(other))
        if isinstance(other, (int, float, complex)):
            return self + PauliSum.identity(self.n_qubits, other)
        return NotImplemented

    __radd__ = __add__

    def __neg__(self) -> PauliSum:
        return self * -1

    def __sub__(self, other):
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, (int, float, complex, np.number)):
            return PauliSum([(c * other, s) for s, c in self._terms], n_qubits=self.n_qubits)
        if isinstance(other, PauliString):
            other = PauliSum({other: 1.0})
        if isinstance(other, PauliSum):
            n = self._same(other)
            out = []
            for sa, ca in self._terms:
                for sb, cb in other._terms:
                    phase, prod = multiply(sa, sb)
                    out.append((ca * cb * phase, prod))
            return PauliSum(out, n_qubits=n)
        return NotImplemented

    def __rmul__(self, other):
        if isinstance(other, (int, float, complex, np.number)):
            return self * other
        return NotImplemented

    def __matmul__(self, other):
        return self * other

    def _same(self, other: PauliSum) -> int:
        if self.n_qubits != other.n_qubits:
            raise DimensionError(f"{self.n_qubits} vs {other.n_qubits} qubits")
        return self.n_qubits

    def adjoint(self) -> PauliSum:
        # every Pauli string is self-adjoint
        return PauliSum([(np.conj(c), s) for s, c in self._terms], n_qubits=self.n_qubits)

    def is_hermitian(self, atol: float = PRUNE_TOL) -> bool:
        return all(abs(c.imag) <= atol for _, c in self._terms)

    def without_identity(self) -> tuple[complex, PauliSum]:
        """Split off the identity coefficient: ``self == offset * I + rest``."""
        ident = PauliString(self.n_qubits)
        rest = [(c, s) for s, c in self._terms if s != ident]
        return self.coeff(ident), PauliSum(rest, n_qubits=self.n_qubits)

    def apply(self, state: np.ndarray) -> np.ndarray:
        out = np.zeros(np.shape(state), dtype=complex)
        for s, c in self._terms:
            out += c * s.apply(state)
        return out

    def to_matrix(self) -> np.ndarray:
        return self.apply(np.eye(1 << self.n_qubits, dtype=complex))

    def __repr__(self) -> str:
        if not self._terms:
            return f"PauliSum(0, n_qubits={self.n_qubits})"
        body = " + ".join(f"({c.real:+.6g}{c.imag:+.6g}j) {s.label}" for s, c in self._terms)
        return f"PauliSum({body})"


def check_state(state: np.ndarray, n_qubits: int) -> np.ndarray:
    state = np.asarray(state)
    if state.ndim != 1 or state.shape[0] != 1 << n_qubits:
        raise DimensionError(f"state of shape {state.shape} does not match {n_qubits} qubits")
    norm = np.linalg.norm(state)
    if abs(norm - 1.0) > NORM_TOL:
        raise ValueError(f"state is not normalized (norm {norm!r})")
    return state


def expectation(op: PauliSum | PauliString, state: np.ndarray) -> complex:
    """Exact ``<psi|op|psi>`` for a normalized dense statevector."""
    if isinstance(op, PauliString):
        op = PauliSum({op: 1.0})
    state = check_state(state, op.n_qubits)
    return complex(np.vdot(state, op.apply(state)))
