"""Orbital entropies, mutual information and superselection-corrected measures.

All quantities are in bits. One-orbital spectra stay in occupation order
(empty, down, up, updown) because the corrected formulas single out the two
singly occupied weights by position.
"""
from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass, field
from typing import Callable, Mapping, Sequence

import numpy as np

from .state import derive_rng

NEG_TOL = 1e-9


def _xlogx(w) -> np.ndarray:
    w = np.asarray(w, dtype=float)
    out = np.zeros_like(w)
    pos = w > 0
    out[pos] = w[pos] * np.log2(w[pos])
    return out


def von_neumann(spectrum, tol: float = NEG_TOL) -> float:
    w = np.asarray(spectrum, dtype=float)
    if np.any(w < -tol):
        raise ValueError(f"spectrum has negative weight {w.min():.3g}; project it first")
    return float(-_xlogx(np.clip(w, 0.0, None)).sum()) + 0.0  # no -0.0


@dataclass(frozen=True)
class OneOrbital:
    s1: float
    E: float
    I: float


def one_orbital(spectrum) -> OneOrbital:
    s1 = von_neumann(spectrum)
    return OneOrbital(s1, s1, 2.0 * s1)


def one_orbital_ssr(spectrum) -> tuple[float, float]:
    """``(I_ssr, E_ssr)`` for a positional one-orbital spectrum."""
    w = np.clip(np.asarray(spectrum, dtype=float), 0.0, None)
    if w.shape != (4,):
        raise ValueError("one-orbital spectrum needs four weights")
    w1, w2, w3, w4 = w
    single = _xlogx(w2 + w3)
    e_ssr = float(single - _xlogx(w2) - _xlogx(w3))
    i_ssr = float(_xlogx(w1) + single + _xlogx(w4) - 2.0 * _xlogx(w).sum())
    return i_ssr, e_ssr


def two_orbital_mi(s1_i: float, s1_j: float, spectrum2, same: bool = False) -> tuple[float, float]:
    """``(s2, I)`` for an orbital pair; ``same`` applies the Kronecker delta."""
    s2 = von_neumann(spectrum2)
    return s2, 0.0 if same else 0.5 * (s1_i + s1_j - s2)


@dataclass
class Quantity:
    value: float
    lo: float | None = None
    hi: float | None = None
    n: int = 0


@dataclass
class EntropyReport:
    """Named scalar results, e.g. ``s1[2]``, ``Essr[2]``, ``s2[2,3]``, ``Issr[2,3]``."""

    label: str
    ssr: bool
    quantities: dict[str, Quantity] = field(default_factory=dict)

    def __getitem__(self, name: str) -> float:
        return self.quantities[name].value

    def values(self) -> dict[str, float]:
        return {k: q.value for k, q in self.quantities.items()}

    def attach_intervals(self, bounds: Mapping[str, tuple[float, float]], n: int) -> None:
        for k, (lo, hi) in bounds.items():
            q = self.quantities[k]
            q.lo, q.hi, q.n = lo, hi, n

    def to_dict(self) -> dict:
        return {
            "label": self.label,
            "ssr": self.ssr,
            "quantities": {k: {"value": q.value, "lo": q.lo, "hi": q.hi, "n": q.n}
                           for k, q in self.quantities.items()},
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2) + "\n"

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["label", "value", "lo", "hi"])
        for k, q in self.quantities.items():
            w.writerow([k, repr(q.value), "" if q.lo is None else repr(q.lo), "" if q.hi is None else repr(q.hi)])
        return buf.getvalue()

    @classmethod
    def from_dict(cls, data: dict) -> EntropyReport:
        rep = cls(data["label"], data["ssr"])
        for k, q in data["quantities"].items():
            rep.quantities[k] = Quantity(q["value"], q["lo"], q["hi"], q["n"])
        return rep


def entropy_quantities(one_spectra: Mapping[int, Sequence[float]],
                       pair_spectra: Mapping[tuple[int, int], Sequence[float]], ssr: bool) -> dict[str, float]:
    """Every reported quantity from positional 1-ORDM spectra and 2-ORDM spectra."""
    out: dict[str, float] = {}
    s1 = {}
    for i, w in sorted(one_spectra.items()):
        o = one_orbital(w)
        i_ssr, e_ssr = one_orbital_ssr(w)
        s1[i] = o.s1
        out[f"s1[{i}]"] = o.s1
        out[f"E[{i}]"] = o.E
        out[f"I[{i}]"] = o.I
        out[f"Issr[{i}]"] = i_ssr
        out[f"Essr[{i}]"] = e_ssr
    name = "Issr" if ssr else "I"
    for (i, j), w in sorted(pair_spectra.items()):
        s2, mi = two_orbital_mi(s1[i], s1[j], w, same=i == j)
        out[f"s2[{i},{j}]"] = s2
        out[f"{name}[{i},{j}]"] = mi
    return out


def percentile_bounds(samples: Mapping[str, Sequence[float]], level: float = 95.0) -> dict[str, tuple[float, float]]:
    lo_q, hi_q = (100 - level) / 2, 100 - (100 - level) / 2
    return {k: (float(np.percentile(v, lo_q)), float(np.percentile(v, hi_q))) for k, v in samples.items()}


def bootstrap(tables: Sequence, analyze: Callable[[Sequence], Mapping[str, float]], n_resamples: int = 1000,
              seed: int = 0, level: float = 95.0) -> tuple[dict[str, tuple[float, float]], dict[str, np.ndarray]]:
    """Percentile intervals from resampling shots within each measurement set.

    ``analyze`` maps a list of shot tables to named quantities and should run
    the whole estimate, assemble, denoise and entropy chain, so that
    threshold decisions are redone for every resample.
    """
    collected: dict[str, list[float]] = {}
    for b in range(n_resamples):
        resampled = [t.resample(derive_rng(seed, "bootstrap", b, k)) for k, t in enumerate(tables)]
        for name, v in analyze(resampled).items():
            collected.setdefault(name, []).append(v)
    samples = {k: np.asarray(v) for k, v in collected.items()}
    return percentile_bounds(samples, level), samples
