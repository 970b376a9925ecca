"""Local fermionic orbital operators and their Jordan-Wigner images.

Molecular orbital ``i`` owns qubits ``2i`` (spin up) and ``2i + 1`` (spin
down). Occupied spin orbitals are qubit ``|1>`` and the annihilator is

    f_q = (X_q + i Y_q) / 2 * prod_{k > q} Z_k

i.e. the parity string runs over the qubits *after* the target. The sixteen
local operators ``O_1 .. O_16`` are built here from their second-quantized
definitions with exact Pauli algebra; nothing is transcribed from printed
Pauli expansions.

Operator ``O_k`` sits at row ``(k - 1) // 4`` and column ``(k - 1) % 4`` of the
one-orbital matrix, with local basis order (empty, down, up, up-down).
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

import numpy as np

from .pauli import PauliString, PauliSum

LOCAL_IDS = range(1, 17)
DIAGONAL_IDS = (1, 6, 11, 16)
# odd operators change the local electron number by one
ODD_IDS = frozenset({2, 3, 5, 8, 9, 12, 14, 15})

# local Fock states in matrix order: (n_up, n_down)
LOCAL_OCCUPATIONS = ((0, 0), (0, 1), (1, 0), (1, 1))
LOCAL_NAMES = ("empty", "down", "up", "updown")


class StructurallyZeroError(LookupError):
    """Requested 2-ORDM element vanishes by global particle/spin symmetry."""


@dataclass(frozen=True)
class SectorLabel:
    n_e: int
    s_z: Fraction

    def __str__(self) -> str:
        return f"({self.n_e}, {self.s_z})"


def local_sector(state: int) -> SectorLabel:
    """Sector of local basis state ``state`` in 0..3."""
    up, down = LOCAL_OCCUPATIONS[state]
    return SectorLabel(up + down, Fraction(up - down, 2))


# Two-orbital basis, rows 1..16: (state of orbital i, state of orbital j).
# Ordered by sector (n_e, s_z) and within a sector as the diagonal of the
# 2-ORDM table lists it.
PAIR_BASIS = (
    (0, 0),
    (0, 1), (1, 0),
    (0, 2), (2, 0),
    (1, 1),
    (0, 3), (1, 2), (2, 1), (3, 0),
    (2, 2),
    (1, 3), (3, 1),
    (2, 3), (3, 2),
    (3, 3),
)


def pair_sector(row: int) -> SectorLabel:
    a, b = PAIR_BASIS[row - 1]
    sa, sb = local_sector(a), local_sector(b)
    return SectorLabel(sa.n_e + sb.n_e, sa.s_z + sb.s_z)


def _local_id(r: int, c: int) -> int:
    return 4 * r + c + 1


def _build_table() -> dict[tuple[int, int], tuple[int, int]]:
    table = {}
    for row in range(1, 17):
        for col in range(1, 17):
            (ri, rj), (ci, cj) = PAIR_BASIS[row - 1], PAIR_BASIS[col - 1]
            sr, sc = pair_sector(row), pair_sector(col)
            if (sr.n_e, sr.s_z) == (sc.n_e, sc.s_z):
                table[(row, col)] = (_local_id(ri, ci), _local_id(rj, cj))
    return table


# (row, col) -> (a, b) for the element <O(i)_a O(j)_b>; 36 entries
PAIR_TABLE = _build_table()

# Elements that change the local electron number of orbital i (and hence of
# j); zeroed under the local number superselection rule. 18 entries.
SSR_MASKED = frozenset(
    pos for pos in PAIR_TABLE
    if local_sector(PAIR_BASIS[pos[0] - 1][0]).n_e != local_sector(PAIR_BASIS[pos[1] - 1][0]).n_e
)


def _check_orbital(i: int, n_qubits: int) -> None:
    if n_qubits % 2:
        raise ValueError("n_qubits must be even")
    if not 0 <= i or 2 * i + 1 >= n_qubits:
        raise ValueError(f"orbital {i} out of range for {n_qubits} qubits")


@lru_cache(maxsize=None)
def annihilator(q: int, n_qubits: int) -> PauliSum:
    x = PauliString.from_letters({q: "X"}, n_qubits)
    y = PauliString.from_letters({q: "Y"}, n_qubits)
    tail = PauliString.from_letters({k: "Z" for k in range(q + 1, n_qubits)}, n_qubits)
    return (PauliSum({x: 0.5, y: 0.5j}) * tail)


@lru_cache(maxsize=None)
def creator(q: int, n_qubits: int) -> PauliSum:
    return annihilator(q, n_qubits).adjoint()


@lru_cache(maxsize=None)
def number(q: int, n_qubits: int) -> PauliSum:
    return creator(q, n_qubits) * annihilator(q, n_qubits)


@lru_cache(maxsize=None)
def local_operator_jw(i: int, k: int, n_qubits: int) -> PauliSum:
    """Pauli expansion of the local orbital operator ``O(i)_k``."""
    _check_orbital(i, n_qubits)
    if k not in LOCAL_IDS:
        raise ValueError(f"local operator id must be in 1..16, got {k}")
    n = n_qubits
    fu, fd = annihilator(2 * i, n), annihilator(2 * i + 1, n)
    cu, cd = creator(2 * i, n), creator(2 * i + 1, n)
    nu, nd = number(2 * i, n), number(2 * i + 1, n)
    one = PauliSum.identity(n)
    ops = {
        1: one - nu - nd + nu * nd,
        2: fd - nu * fd,
        3: fu - nd * fu,
        4: fd * fu,
        5: cd - nu * cd,
        6: nd - nu * nd,
        7: cd * fu,
        8: -(nd * fu),
        9: cu - nd * cu,
        10: fd * cu,
        11: nu - nu * nd,
        12: nu * fd,
        13: cd * cu,
        14: -(nd * cu),
        15: nu * cd,
        16: nu * nd,
    }
    return ops[k]


def pair_element_operator(i: int, j: int, row: int, col: int, n_qubits: int) -> PauliSum:
    """Operator whose expectation is 2-ORDM element ``(row, col)`` for orbitals ``(i, j)``.

    The product is ``O(i)_a O(j)_b`` in that order, times the sign in
    ``ELEMENT_SIGNS`` that turns it into the matrix unit ``|row><col|`` of the
    occupation basis (with JW parity strings on any orbitals in between).
    Positions absent from the nonzero pattern raise
    :class:`StructurallyZeroError`.
    """
    if i == j:
        raise ValueError("pair needs two distinct orbitals")
    _check_orbital(i, n_qubits)
    _check_orbital(j, n_qubits)
    if not (1 <= row <= 16 and 1 <= col <= 16):
        raise ValueError(f"position ({row}, {col}) outside the 16x16 matrix")
    try:
        a, b = PAIR_TABLE[(row, col)]
    except KeyError:
        raise StructurallyZeroError(f"element ({row}, {col}) is zero by symmetry") from None
    return _pair_product(i, j, a, b, n_qubits) * ELEMENT_SIGNS[(row, col)]


@lru_cache(maxsize=None)
def _pair_product(i: int, j: int, a: int, b: int, n_qubits: int) -> PauliSum:
    return local_operator_jw(i, a, n_qubits) * local_operator_jw(j, b, n_qubits)


def _occupation_index(row: int) -> int:
    si, sj = PAIR_BASIS[row - 1]
    bits = LOCAL_OCCUPATIONS[si] + LOCAL_OCCUPATIONS[sj]
    return int("".join(map(str, bits)), 2)


def _element_signs() -> dict[tuple[int, int], int]:
    # On two adjacent orbitals every product O_a O_b is +-|r><c| in the
    # occupation basis. The bare sign pattern is not hermitian-consistent
    # (e.g. O_4^dag = -O_13), so each element is rescaled to +|r><c|.
    signs = {}
    for (row, col), (a, b) in PAIR_TABLE.items():
        m = _pair_product(0, 1, a, b, 4).to_matrix()
        value = m[_occupation_index(row), _occupation_index(col)]
        assert abs(abs(value) - 1) < 1e-12 and np.count_nonzero(np.abs(m) > 1e-12) == 1
        signs[(row, col)] = int(round(value.real))
    return signs


# +-1 per position; -1 on 12 of the 36 elements
ELEMENT_SIGNS = _element_signs()


def ordm_positions(ssr: bool) -> list[tuple[int, int]]:
    """Nonzero 2-ORDM positions in row-major order (18 with SSR, 36 without)."""
    return sorted(p for p in PAIR_TABLE if not (ssr and p in SSR_MASKED))


def ordm_operator_pool(i: int, j: int, ssr: bool, n_qubits: int) -> list[tuple[tuple[int, int], PauliSum]]:
    if i == j:
        raise ValueError("pair needs two distinct orbitals")
    return [(pos, pair_element_operator(i, j, *pos, n_qubits)) for pos in ordm_positions(ssr)]
