"""CI statevectors, exact expectations and simulated joint Pauli measurements.

Measurements are simulated at the level of outcome distributions: a set of
commuting strings splits the Hilbert space into joint eigenspaces, each shot
picks one eigenspace and records the +-1 eigenvalue of every string in it.
Global depolarizing noise mixes the Born distribution with the distribution of
the maximally mixed state, which is ``rank / 2^n``.
"""
from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from .pauli import PauliString, check_state, multiply

FIXTURE_LABELS = (
    "singlet-image-1",
    "singlet-image-8",
    "singlet-image-12",
    "singlet-image-16",
    "triplet-image-1",
    "triplet-image-8",
)
NORM_SLACK = 1e-3  # printed amplitudes are rounded; larger errors mean a bad fixture


@dataclass(frozen=True)
class CIState:
    n_qubits: int
    terms: tuple[tuple[str, float], ...]
    label: str = ""

    def __post_init__(self):
        bits = [b for b, _ in self.terms]
        if not bits:
            raise ValueError("CI state needs at least one term")
        if len(set(bits)) != len(bits):
            raise ValueError("duplicate occupation bitstrings")
        for b in bits:
            if len(b) != self.n_qubits or set(b) - {"0", "1"}:
                raise ValueError(f"bad occupation string {b!r} for {self.n_qubits} qubits")

    @property
    def norm(self) -> float:
        return float(np.sqrt(sum(a * a for _, a in self.terms)))

    @classmethod
    def from_dict(cls, data: dict) -> CIState:
        terms = tuple((t["bits"], float(t["amp"])) for t in data["terms"])
        return cls(int(data["n_qubits"]), terms, data.get("label", ""))

    def to_dict(self) -> dict:
        return {
            "label": self.label,
            "n_qubits": self.n_qubits,
            "terms": [{"bits": b, "amp": a} for b, a in self.terms],
        }


def load_fixture(name: str | Path) -> CIState:
    """Load an embedded fixture by label, or a JSON file by path."""
    path = Path(name)
    if path.suffix == ".json" and path.exists():
        return CIState.from_dict(json.loads(path.read_text()))
    if name not in FIXTURE_LABELS:
        raise KeyError(f"unknown fixture {name!r}; known: {', '.join(FIXTURE_LABELS)}")
    text = resources.files("orbent").joinpath("fixtures").joinpath(f"{name}.json").read_text()
    return CIState.from_dict(json.loads(text))


def build_state(ci: CIState) -> np.ndarray:
    """Dense big-endian statevector; occupation string ``b`` sits at ``int(b, 2)``."""
    norm = ci.norm
    if abs(norm - 1.0) > NORM_SLACK:
        raise ValueError(f"CI amplitudes have norm {norm:.6f}; fixture looks corrupted")
    psi = np.zeros(1 << ci.n_qubits, dtype=complex)
    for bits, amp in ci.terms:
        psi[int(bits, 2)] = amp
    return psi / np.linalg.norm(psi)


@dataclass(frozen=True)
class NoiseModel:
    p: float = 0.0
    shots: int = 10_000
    seed: int = 0

    def __post_init__(self):
        if not 0.0 <= self.p <= 1.0:
            raise ValueError(f"depolarizing p must be in [0, 1], got {self.p}")
        if self.shots < 1:
            raise ValueError("shots must be positive")


def derive_rng(seed: int, *labels) -> np.random.Generator:
    """Counter-based generator for the stream named by ``labels`` under ``seed``.

    Labels are hashed into the spawn key, so each (stage, target, resample)
    tuple gets its own reproducible stream independent of call order.
    """
    digest = hashlib.blake2b(repr(labels).encode(), digest_size=16).digest()
    key = tuple(int.from_bytes(digest[k:k + 4], "little") for k in range(0, 16, 4))
    ss = np.random.SeedSequence(entropy=int(seed) & (2**64 - 1), spawn_key=key)
    return np.random.Generator(np.random.Philox(ss))


@dataclass(frozen=True)
class Eigenspace:
    outcomes: tuple[int, ...]  # +-1 per string of the set
    rank: int
    signs: tuple[int, ...]  # +-1 per independent generator


def _check_commuting(strings: Sequence[PauliString]) -> None:
    for a_idx, a in enumerate(strings):
        for b in strings[a_idx + 1:]:
            if not a.commutes(b):
                raise ValueError(f"{a.label} and {b.label} do not commute")


def _decompose(strings: Sequence[PauliString]):
    """Pick independent generators and express every string through them.

    Returns ``(generators, expansions)`` where ``expansions[k] = (phase, idx)``
    means ``strings[k] == phase * prod(generators[i] for i in idx)`` with the
    product taken in index order. Independence is over GF(2) on the
    concatenated (x, z) bits.
    """
    n = strings[0].n_qubits
    pivots: dict[int, tuple[int, int]] = {}  # pivot bit -> (vector, generator combination)
    generators: list[PauliString] = []
    expansions = []
    for s in strings:
        vec, combo = s.x_mask | (s.z_mask << n), 0
        while vec:
            top = vec.bit_length() - 1
            if top not in pivots:
                break
            pv, pc = pivots[top]
            vec ^= pv
            combo ^= pc
        if vec:
            g = len(generators)
            generators.append(s)
            pivots[vec.bit_length() - 1] = (vec, combo ^ (1 << g))
            combo = 1 << g
        idx = [g for g in range(len(generators)) if combo >> g & 1]
        phase, prod = 1, PauliString.identity(n)
        for g in idx:
            ph, prod = multiply(prod, generators[g])
            phase *= ph
        if prod != s:
            raise AssertionError("generator expansion failed")  # pragma: no cover
        # s == phase * prod, so s's eigenvalue is phase * prod of generator signs
        expansions.append((complex(phase), tuple(idx)))
    for phase, _ in expansions:
        if abs(phase.imag) > 1e-12:
            raise ValueError("set generates an anti-hermitian product; strings do not commute")
    return generators, [(int(round(ph.real)), idx) for ph, idx in expansions]


def joint_eigenbasis(strings: Sequence[PauliString]) -> list[Eigenspace]:
    """Joint eigenspaces of a commuting set, with their outcome vectors.

    With ``r`` independent strings there are ``2^r`` eigenspaces, one per sign
    assignment of the generators, each of rank ``2^(n - r)``.
    """
    strings = list(strings)
    if not strings:
        raise ValueError("empty measurement set")
    _check_commuting(strings)
    gens, expansions = _decompose(strings)
    n, r = strings[0].n_qubits, len(gens)
    spaces = []
    for pattern in range(1 << r):
        signs = tuple(1 - 2 * (pattern >> g & 1) for g in range(r))
        outcomes = tuple(ph * int(np.prod([signs[g] for g in idx])) for ph, idx in expansions)
        spaces.append(Eigenspace(outcomes, 1 << (n - r), signs))
    return spaces


def born_probabilities(state: np.ndarray, strings: Sequence[PauliString], spaces=None) -> np.ndarray:
    """``<psi|Pi|psi>`` for each eigenspace returned by :func:`joint_eigenbasis`."""
    strings = list(strings)
    if spaces is None:
        spaces = joint_eigenbasis(strings)
    gens, _ = _decompose(strings)
    state = check_state(state, strings[0].n_qubits)
    # split psi by (I +- g)/2 one generator at a time
    parts = {(): state}
    for g in gens:
        nxt = {}
        for key, vec in parts.items():
            gv = g.apply(vec)
            nxt[key + (1,)] = (vec + gv) / 2
            nxt[key + (-1,)] = (vec - gv) / 2
        parts = nxt
    probs = np.array([np.vdot(parts[sp.signs], parts[sp.signs]).real for sp in spaces])
    probs = np.clip(probs, 0.0, None)
    return probs / probs.sum()


@dataclass(frozen=True)
class ShotTable:
    strings: tuple[PauliString, ...]
    outcomes: np.ndarray = field(repr=False)  # (shots, len(strings)) int8 of +-1

    @property
    def shots(self) -> int:
        return self.outcomes.shape[0]

    def resample(self, rng: np.random.Generator) -> ShotTable:
        idx = rng.integers(0, self.shots, self.shots)
        return ShotTable(self.strings, self.outcomes[idx])


def sample_set(state: np.ndarray, strings: Sequence[PauliString], noise: NoiseModel,
               rng: np.random.Generator | None = None) -> ShotTable:
    """Simulate ``noise.shots`` joint measurements of a commuting set."""
    strings = tuple(strings)
    spaces = joint_eigenbasis(strings)
    born = born_probabilities(state, strings, spaces)
    ranks = np.array([sp.rank for sp in spaces], dtype=float)
    mixed = ranks / ranks.sum()
    if rng is None:
        rng = derive_rng(noise.seed, "sample", tuple(s.label for s in strings))
    depolarized = rng.random(noise.shots) < noise.p
    picks = np.where(
        depolarized,
        rng.choice(len(spaces), size=noise.shots, p=mixed),
        rng.choice(len(spaces), size=noise.shots, p=born),
    )
    table = np.array([sp.outcomes for sp in spaces], dtype=np.int8)
    return ShotTable(strings, table[picks])


def estimate_expectations(table: ShotTable) -> dict[PauliString, tuple[float, float]]:
    """Mean and standard error (population std over sqrt(shots)) per string."""
    if table.shots == 0:
        raise ValueError("empty shot table")
    vals = table.outcomes.astype(float)
    means = vals.mean(axis=0)
    errs = vals.std(axis=0) / np.sqrt(table.shots)
    return {s: (float(m), float(e)) for s, m, e in zip(table.strings, means, errs)}


def exact_expectations(state: np.ndarray, strings: Iterable[PauliString]) -> dict[PauliString, float]:
    """Exact real expectation of each string (strings are hermitian)."""
    out = {}
    for s in strings:
        out[s] = float(np.vdot(state, s.apply(state)).real)
    return out
