"""Grouping of the Pauli strings behind each ORDM into commuting measurement sets.

Each target (a one-orbital or two-orbital RDM) contributes the strings of its
element operators. Identity components are never measured; they become
constant offsets in the binding. Strings are partitioned by greedy first-fit
in a fixed order: diagonal (Z-type) strings first, then by the number of X/Y
letters, then by the (z_mask, x_mask) integers.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from itertools import combinations
from typing import Iterable, Sequence

from .fermion import DIAGONAL_IDS, local_operator_jw, ordm_operator_pool
from .pauli import PauliString, PauliSum


@dataclass(frozen=True, order=True)
class Target:
    """One-orbital RDM of ``orbitals[0]`` or two-orbital RDM of the pair."""

    orbitals: tuple[int, ...]

    def __post_init__(self):
        if len(self.orbitals) not in (1, 2) or len(set(self.orbitals)) != len(self.orbitals):
            raise ValueError(f"target needs one orbital or two distinct orbitals, got {self.orbitals}")
        if list(self.orbitals) != sorted(self.orbitals) or min(self.orbitals) < 0:
            raise ValueError(f"pair orbitals must be non-negative and ascending, got {self.orbitals}")

    @property
    def is_pair(self) -> bool:
        return len(self.orbitals) == 2

    @property
    def label(self) -> str:
        return ("rho2" if self.is_pair else "rho1") + "[" + ",".join(map(str, self.orbitals)) + "]"

    @classmethod
    def parse(cls, label: str) -> Target:
        body = label[label.index("[") + 1:label.index("]")]
        return cls(tuple(int(v) for v in body.split(",")))


def default_targets(n_orbitals: int = 4) -> list[Target]:
    """All 1-ORDMs followed by all 2-ORDMs."""
    ones = [Target((i,)) for i in range(n_orbitals)]
    pairs = [Target(p) for p in combinations(range(n_orbitals), 2)]
    return ones + pairs


def element_operators(target: Target, ssr: bool, n_qubits: int) -> list[tuple[tuple[int, int], PauliSum]]:
    """(position, operator) for every element of the target that must be measured.

    1-ORDM positions are the diagonal (1, 1) .. (4, 4); off-diagonals vanish
    by symmetry and SSR does not affect them.
    """
    if target.is_pair:
        return ordm_operator_pool(*target.orbitals, ssr, n_qubits)
    i = target.orbitals[0]
    return [((p, p), local_operator_jw(i, k, n_qubits)) for p, k in enumerate(DIAGONAL_IDS, start=1)]


def grouping_key(s: PauliString) -> tuple[int, int, int]:
    return (bin(s.x_mask).count("1"), s.z_mask, s.x_mask)


def first_fit(strings: Iterable[PauliString]) -> list[list[PauliString]]:
    """Greedy first-fit colouring of the anticommutation graph."""
    sets: list[list[PauliString]] = []
    for s in sorted(set(strings), key=grouping_key):
        for group in sets:
            if all(s.commutes(t) for t in group):
                group.append(s)
                break
        else:
            sets.append([s])
    return sets


@dataclass(frozen=True)
class Binding:
    """Element value = offset + sum(coeff * <string>), strings found in ``sets``."""

    offset: complex
    terms: tuple[tuple[int, PauliString, complex], ...]  # (set index, string, coeff)


@dataclass(frozen=True)
class MeasurementPlan:
    targets: tuple[Target, ...]
    ssr: bool
    scope: str
    n_qubits: int
    sets: tuple[tuple[PauliString, ...], ...]
    owners: tuple[Target | None, ...]  # target per set; None in global scope
    binding: dict = field(compare=False, repr=False)  # Target -> {position: Binding}

    @property
    def total(self) -> int:
        return len(self.sets)

    def counts(self) -> dict[str, int]:
        if self.scope != "per-ordm":
            return {}
        out = {t.label: 0 for t in self.targets}
        for owner in self.owners:
            out[owner.label] += 1
        return out

    def sets_for(self, target: Target) -> list[tuple[PauliString, ...]]:
        return [s for s, o in zip(self.sets, self.owners) if o == target]

    def to_dict(self) -> dict:
        return {
            "ssr": self.ssr,
            "scope": self.scope,
            "n_qubits": self.n_qubits,
            "total": self.total,
            "counts": self.counts(),
            "sets": [
                {"owner": o.label if o else None, "strings": [s.label for s in group]}
                for group, o in zip(self.sets, self.owners)
            ],
            "binding": {
                t.label: [
                    {
                        "row": pos[0],
                        "col": pos[1],
                        "offset": [b.offset.real, b.offset.imag],
                        "terms": [
                            {"set": k, "string": s.label, "coeff": [c.real, c.imag]} for k, s, c in b.terms
                        ],
                    }
                    for pos, b in sorted(self.binding[t].items())
                ]
                for t in self.targets
            },
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True) + "\n"


def plan(targets: Sequence[Target] | None = None, ssr: bool = True, scope: str = "per-ordm",
         n_qubits: int = 8) -> MeasurementPlan:
    """Partition the strings needed by ``targets`` into commuting sets."""
    if scope not in ("per-ordm", "global"):
        raise ValueError(f"scope must be 'per-ordm' or 'global', got {scope!r}")
    targets = tuple(default_targets(n_qubits // 2) if targets is None else targets)
    if not targets:
        raise ValueError("no targets to plan")
    elements = {t: element_operators(t, ssr, n_qubits) for t in targets}

    def measured(ops):
        return {s for _, op in ops for s in op.strings if not s.is_identity}

    sets: list[tuple[PauliString, ...]] = []
    owners: list[Target | None] = []
    if scope == "per-ordm":
        for t in targets:
            for group in first_fit(measured(elements[t])):
                sets.append(tuple(group))
                owners.append(t)
    else:
        pool = set().union(*(measured(ops) for ops in elements.values()))
        for group in first_fit(pool):
            sets.append(tuple(group))
            owners.append(None)

    where: dict[tuple[Target | None, PauliString], int] = {}
    for k, (group, owner) in enumerate(zip(sets, owners)):
        for s in group:
            where[(owner, s)] = k
    binding = {}
    for t in targets:
        owner = t if scope == "per-ordm" else None
        table = {}
        for pos, op in elements[t]:
            offset, rest = op.without_identity()
            table[pos] = Binding(offset, tuple((where[(owner, s)], s, c) for s, c in rest))
        binding[t] = table
    return MeasurementPlan(targets, ssr, scope, n_qubits, tuple(sets), tuple(owners), binding)


# Commuting sets listed for orbitals (0, 1) under SSR, dense labels on qubits 0..3
REFERENCE_SETS_01 = (
    ("ZIII IZII IIZI IIIZ ZZII ZIZI ZIIZ IZZI IZIZ IIZZ ZZZI ZZIZ ZIZZ IZZZ ZZZZ").split(),
    "YYYY XXXX XYXY XYYX XXYY YXXY YYXX YXYX".split(),
    "XYYY XYXX XXXY YXYY YXXX YYXY YYYX XXYX".split(),
)


@dataclass(frozen=True)
class SetComparison:
    ok: bool
    missing: tuple[frozenset, ...] = ()  # reference sets absent from the plan
    extra: tuple[frozenset, ...] = ()  # plan sets absent from the reference
    diff: str = ""

    def __bool__(self) -> bool:
        return self.ok


def reference_sets(n_qubits: int = 8) -> list[frozenset[PauliString]]:
    pad = "I" * (n_qubits - 4)
    return [frozenset(PauliString.from_dense(d + pad) for d in group) for group in REFERENCE_SETS_01]


def compare_sets(found: Iterable[Iterable[PauliString]], expected: Iterable[Iterable[PauliString]]) -> SetComparison:
    """Compare two families of sets as unordered families of unordered sets."""
    found = [frozenset(g) for g in found]
    expected = [frozenset(g) for g in expected]
    missing = tuple(g for g in expected if g not in found)
    extra = tuple(g for g in found if g not in expected)
    if not missing and not extra and len(found) == len(expected):
        return SetComparison(True)
    lines = []
    home = {s: k for k, g in enumerate(expected) for s in g}
    for k, g in enumerate(found):
        refs = [home.get(s) for s in g]
        majority = max(set(refs), key=lambda r: (refs.count(r), r is not None, r or 0))
        for s in sorted(g, key=grouping_key):
            if home.get(s) is None:
                lines.append(f"{s.label}: not in any reference set")
            elif home[s] != majority:
                lines.append(f"{s.label}: in plan set {k}, belongs with reference set {home[s]}")
    placed = set().union(*found) if found else set()
    for s in sorted(set(home) - placed, key=grouping_key):
        lines.append(f"{s.label}: missing from the plan")
    if not lines:
        lines.append(f"plan has {len(found)} sets, reference has {len(expected)}")
    return SetComparison(False, missing, extra, "\n".join(lines))


def verify_reference_sets(p: MeasurementPlan) -> SetComparison:
    """Check the plan's sets for pair (0, 1) against the reference SSR listing."""
    pair = Target((0, 1))
    sets = p.sets_for(pair) if p.scope == "per-ordm" else p.sets
    return compare_sets(sets, reference_sets(p.n_qubits))
