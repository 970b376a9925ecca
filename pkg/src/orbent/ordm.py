"""Assembly of one- and two-orbital reduced density matrices from expectations.

The 2-ORDM is stored as ``M[r, c] = <|r><c|>`` in the occupation basis listed
by :data:`orbent.fermion.PAIR_BASIS`. That is the transpose of the usual
``rho[r, c] = <r|rho|c>``; both share the spectrum, which is all the
entropies need.
"""
from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Mapping

import numpy as np

from .fermion import (
    DIAGONAL_IDS,
    PAIR_BASIS,
    PAIR_TABLE,
    SSR_MASKED,
    SectorLabel,
    local_operator_jw,
    local_sector,
    ordm_positions,
    pair_element_operator,
    pair_sector,
)
from .pauli import expectation

HERMITIZE_MODES = ("mirror", "average")


@dataclass(frozen=True)
class Ordm1:
    orbital: int
    diag: np.ndarray  # (empty, down, up, updown)

    @property
    def matrix(self) -> np.ndarray:
        return np.diag(self.diag).astype(complex)

    def to_dict(self) -> dict:
        return {
            "orbital": self.orbital,
            "entries": [{"row": k + 1, "col": k + 1, "re": float(v), "im": 0.0} for k, v in enumerate(self.diag)],
        }


@dataclass(frozen=True)
class Ordm2:
    pair: tuple[int, int]
    matrix: np.ndarray
    ssr_applied: bool

    @property
    def sectors(self) -> list[SectorLabel]:
        return [pair_sector(r) for r in range(1, 17)]

    def to_dict(self) -> dict:
        entries = []
        for r in range(16):
            for c in range(16):
                v = self.matrix[r, c]
                if v != 0:
                    entries.append({"row": r + 1, "col": c + 1, "re": float(v.real), "im": float(v.imag)})
        return {"pair": list(self.pair), "ssr": self.ssr_applied, "entries": entries}

    @classmethod
    def from_dict(cls, data: dict) -> Ordm2:
        m = np.zeros((16, 16), dtype=complex)
        for e in data["entries"]:
            m[e["row"] - 1, e["col"] - 1] = complex(e["re"], e["im"])
        return cls(tuple(data["pair"]), m, bool(data["ssr"]))


def assemble_1ordm(orbital: int, values: Mapping[int, float]) -> Ordm1:
    """1-ORDM from ``<O_k>`` for the diagonal ids 1, 6, 11, 16 (keyed by id)."""
    missing = [k for k in DIAGONAL_IDS if k not in values]
    if missing:
        raise KeyError(f"missing expectation for local operator(s) {missing}")
    return Ordm1(orbital, np.array([float(np.real(values[k])) for k in DIAGONAL_IDS]))


def required_positions(ssr: bool, hermitize: str = "mirror") -> list[tuple[int, int]]:
    """Positions that must be supplied to :func:`assemble_2ordm`."""
    if hermitize not in HERMITIZE_MODES:
        raise ValueError(f"hermitize must be one of {HERMITIZE_MODES}")
    pos = ordm_positions(ssr)
    return [p for p in pos if p[0] <= p[1]] if hermitize == "mirror" else pos


def assemble_2ordm(pair: tuple[int, int], values: Mapping[tuple[int, int], complex], ssr: bool,
                   hermitize: str = "mirror") -> Ordm2:
    """16x16 2-ORDM from element expectations keyed by 1-based (row, col).

    ``mirror`` takes the upper triangle as measured and fills the lower
    triangle with conjugates (26 evaluations without SSR). ``average`` needs
    both triangles and replaces each pair by the mean of the value and the
    conjugate of its partner.
    """
    for pos in values:
        if pos not in PAIR_TABLE:
            raise ValueError(f"position {pos} is zero by symmetry and cannot carry a value")
        if ssr and pos in SSR_MASKED:
            raise ValueError(f"position {pos} is removed by the superselection rule")
    need = required_positions(ssr, hermitize)
    missing = [p for p in need if p not in values]
    if missing:
        raise KeyError(f"missing expectations for positions {missing}")
    m = np.zeros((16, 16), dtype=complex)
    for r, c in need:
        v = complex(values[(r, c)])
        if hermitize == "mirror":
            m[r - 1, c - 1] = v
            m[c - 1, r - 1] = np.conj(v)
            if r == c:
                m[r - 1, r - 1] = v.real
        else:
            m[r - 1, c - 1] = 0.5 * (v + np.conj(complex(values[(c, r)])))
    return Ordm2(tuple(pair), m, ssr)


def element_values(binding: Mapping, expectations: Mapping) -> dict:
    """Evaluate ``offset + sum(coeff * <string>)`` for every bound position.

    ``expectations`` is keyed by ``(set index, string)`` so that a string
    measured in several sets is read from the set the binding points at.
    """
    out = {}
    for pos, b in binding.items():
        out[pos] = b.offset + sum(c * expectations[(k, s)] for k, s, c in b.terms)
    return out


def exact_1ordm(state: np.ndarray, orbital: int, n_qubits: int) -> Ordm1:
    values = {k: expectation(local_operator_jw(orbital, k, n_qubits), state).real for k in DIAGONAL_IDS}
    return assemble_1ordm(orbital, values)


def exact_2ordm(state: np.ndarray, pair: tuple[int, int], ssr: bool, n_qubits: int,
                hermitize: str = "mirror") -> Ordm2:
    values = {
        pos: expectation(pair_element_operator(*pair, *pos, n_qubits), state)
        for pos in required_positions(ssr, hermitize)
    }
    return assemble_2ordm(pair, values, ssr, hermitize)


def sector_blocks_ok(o: Ordm2, atol: float = 0.0) -> bool:
    """True if every entry above ``atol`` sits in the nonzero pattern (and SSR blocks)."""
    for r in range(16):
        for c in range(16):
            if abs(o.matrix[r, c]) > atol:
                nr = local_sector(PAIR_BASIS[r][0]).n_e
                nc = local_sector(PAIR_BASIS[c][0]).n_e
                if o.ssr_applied and nr != nc:
                    return False
                if (r + 1, c + 1) not in PAIR_TABLE:
                    return False
    return True


def dumps(ordms) -> str:
    return json.dumps([o.to_dict() for o in ordms], indent=2, sort_keys=True) + "\n"
