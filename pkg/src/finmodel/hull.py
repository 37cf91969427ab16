"""Witness-closure hulls and increasing chains of them.

A hull is the least superset of a seed that is closed under the witness
step: whenever an existential formula from the pack holds in the host
with parameters from the current set, the smallest witness joins the
set.  For a subformula-closed pack this certifies elementarity of the
carrier for every pack member (the Tarski-Vaught argument), which the
tests re-verify by brute enumeration.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Iterable, Union

from .formula import (
    Exists,
    Formula,
    FormulaPack,
    free_vars,
    is_subformula_closed,
    parse,
    subformula_closure,
)
from .structure import (
    DEFAULT_BUDGET,
    FinStructure,
    _Budget,
    _compile,
    is_sigma_elementary,
)
from .universe import Hierarchy, hf_encode


@dataclass(frozen=True)
class TraceStep:
    """One element added during closure: which existential fired, under
    which valuation, and which witness was chosen."""

    formula: Formula
    valuation: tuple[tuple[str, int], ...]
    witness: int


@dataclass(frozen=True)
class Hull:
    seed: frozenset[int]
    carrier: frozenset[int]
    trace: tuple[TraceStep, ...]


@dataclass(frozen=True)
class StageRecord:
    added_cover_element: int | None
    self_encoding: str  # added | overflow | not-hierarchy | initial
    seed: frozenset[int]
    trace: tuple[TraceStep, ...]


@dataclass(frozen=True)
class Chain:
    stages: tuple[frozenset[int], ...]
    pack: FormulaPack
    records: tuple[StageRecord, ...]
    coherent: bool | None  # None when the ambient carries no set codes


def _ambient(N: Union[FinStructure, Hierarchy]) -> FinStructure:
    return N.structure if isinstance(N, Hierarchy) else N


class _WitnessOracle:
    """Finds, for an existential formula and a valuation, the smallest
    witness in the host; results are cached since they depend only on
    the host."""

    def __init__(self, N: FinStructure, pack: FormulaPack, budget: int):
        self.size = N.size
        self.budget = _Budget(budget)
        self.bodies = {}
        self.exists: list[Exists] = []
        for phi in pack.formulas:
            if isinstance(phi, Exists):
                self.exists.append(phi)
                self.bodies[phi] = (_compile(phi.body, N, None), free_vars(phi))
        self.cache: dict[tuple[int, tuple[int, ...]], int | None] = {}

    def witness(self, idx: int, values: tuple[int, ...]) -> int | None:
        key = (idx, values)
        if key in self.cache:
            return self.cache[key]
        phi = self.exists[idx]
        body, names = self.bodies[phi]
        env = dict(zip(names, values))
        found = None
        self.budget.spend(self.size)
        for candidate in range(self.size):
            env[phi.var] = candidate
            if body(env, self.budget):
                found = candidate
                break
        self.cache[key] = found
        return found


def _require_closed(pack: FormulaPack) -> None:
    if not pack.closed_under_subformulas or not is_subformula_closed(pack):
        raise ValueError(
            "pack must be closed under subformulas; call subformula_closure first"
        )


def _close(
    seed: frozenset[int],
    oracle: _WitnessOracle,
    trace: list[TraceStep] | None,
) -> frozenset[int]:
    current = set(seed)
    changed = True
    while changed:
        changed = False
        for idx, phi in enumerate(oracle.exists):
            names = oracle.bodies[phi][1]
            ordered = sorted(current)
            for values in itertools.product(ordered, repeat=len(names)):
                w = oracle.witness(idx, values)
                if w is not None and w not in current:
                    current.add(w)
                    if trace is not None:
                        trace.append(TraceStep(phi, tuple(zip(names, values)), w))
                    changed = True
    return frozenset(current)


def hull(
    N: Union[FinStructure, Hierarchy],
    pack: FormulaPack,
    seed: Iterable[int],
    budget: int = DEFAULT_BUDGET,
) -> Hull:
    """Least witness-closed superset of the seed.

    Deterministic (smallest-identifier witnesses), monotone in the seed,
    and sound: the carrier is elementary in the host for every formula
    of the pack.
    """
    structure = _ambient(N)
    _require_closed(pack)
    seed_set = frozenset(seed)
    for s in seed_set:
        if not (0 <= s < structure.size):
            raise ValueError(f"seed element {s} outside the universe")
    oracle = _WitnessOracle(structure, pack, budget)
    trace: list[TraceStep] = []
    carrier = _close(seed_set, oracle, trace)
    return Hull(seed_set, carrier, tuple(trace))


def verify_hull(
    N: Union[FinStructure, Hierarchy],
    pack: FormulaPack,
    h: Hull,
    budget: int = DEFAULT_BUDGET,
) -> bool:
    """Independent re-check: trace replay rebuilds the carrier and the
    carrier is elementary for the whole pack."""
    structure = _ambient(N)
    rebuilt = set(h.seed)
    for step in h.trace:
        if any(v not in rebuilt for _, v in step.valuation):
            return False
        rebuilt.add(step.witness)
    if frozenset(rebuilt) != h.carrier:
        return False
    return bool(is_sigma_elementary(h.carrier, structure, pack, budget))


def chain(
    N: Union[FinStructure, Hierarchy],
    pack: FormulaPack,
    seed: Iterable[int],
    cover: Iterable[int],
    budget: int = DEFAULT_BUDGET,
) -> Chain:
    """Strictly increasing hulls whose last stage contains the cover.

    Each step seeds the next hull with the previous stage, the smallest
    cover element still missing, and (over a hierarchy, when it fits in
    rank) the code of the previous stage itself, so a stage is an
    element of its successor whenever the finite universe allows it.
    """
    structure = _ambient(N)
    _require_closed(pack)
    cover_set = frozenset(cover)
    for c in cover_set:
        if not (0 <= c < structure.size):
            raise ValueError(f"cover element {c} outside the universe")
    oracle = _WitnessOracle(structure, pack, budget)
    seed_set = frozenset(seed)
    trace: list[TraceStep] = []
    stages = [_close(seed_set, oracle, trace)]
    records = [StageRecord(None, "initial", seed_set, tuple(trace))]
    while not cover_set <= stages[-1]:
        previous = stages[-1]
        nxt = min(cover_set - previous)
        seed_next = set(previous) | {nxt}
        encoding = "not-hierarchy"
        if isinstance(N, Hierarchy):
            code = hf_encode(previous)
            if code < structure.size:
                seed_next.add(code)
                encoding = "added"
            else:
                encoding = "overflow"
        trace = []
        frozen_seed = frozenset(seed_next)
        stage = _close(frozen_seed, oracle, trace)
        stages.append(stage)
        records.append(StageRecord(nxt, encoding, frozen_seed, tuple(trace)))
    return Chain(tuple(stages), pack, tuple(records), _chain_coherent(structure, stages))


def _chain_coherent(structure: FinStructure, stages: list[frozenset[int]]) -> bool | None:
    """Two-element-set coherence of every stage, judged through the
    ambient codes: a pair object belongs to a stage exactly when both of
    its members do.  None when the ambient carries no codes."""
    if structure.codes is None:
        return None
    index = {c: i for i, c in enumerate(structure.codes)}
    pair_objects = []
    for i, code in enumerate(structure.codes):
        if bin(code).count("1") == 2:
            high = code.bit_length() - 1
            low = (code & -code).bit_length() - 1
            if high in index and low in index:
                pair_objects.append((i, index[low], index[high]))
    for stage in stages:
        for obj, a, b in pair_objects:
            if (obj in stage) != (a in stage and b in stage):
                return False
    return True


# ---------------------------------------------------------------------------
# shipped packs

_SINGLETON = "(Aq ((q in w) -> (q = x)) & (x in w))"
_DOUBLETON = "(Aq ((q in w) -> ((q = x) | (q = y))) & ((x in w) & (y in w)))"
_IS_PAIR_OF = f"((Aw ((w in p) -> ({_SINGLETON} | {_DOUBLETON}))) & ((Ew ({_SINGLETON} & (w in p))) & (Ew ({_DOUBLETON} & (w in p)))))"

PACKS: dict[str, tuple[str, ...]] = {
    # smallest set containing two given elements; over set codes the
    # witness for two vertices is exactly the pair object joining them
    "pairing": ("Ez ((x in z) & (y in z))",),
    # two distinct members of a set; pulls both endpoints out of an edge
    "members": ("Eu (Ev (((u in s) & (v in s)) & ~(u = v)))",),
    # the exact union of a set's members
    "union": (
        "Eu (Aw (((w in u) -> (Et ((t in z) & (w in t)))) & ((Et ((t in z) & (w in t))) -> (w in u))))",
    ),
    # the exact successor x | {x}
    "successor": (
        "Ey (Aw (((w in y) -> ((w in x) | (w = x))) & (((w in x) | (w = x)) -> (w in y))))",
    ),
    # value of a set-of-ordered-pairs function at a point
    "evaluation": (f"Ey (Ep ((p in g) & {_IS_PAIR_OF}))",),
    # a two-step connection through shared containers, plus the
    # endpoint extractor; the workhorse for slicing experiments
    "path-existence": (
        "Ew ((Ee ((x in e) & (w in e))) & (Ed ((w in d) & (y in d))))",
        "Eu (Ev (((u in s) & (v in s)) & ~(u = v)))",
    ),
    # something with no member exists
    "empty-set": ("Ex (Ay ~(y in x))",),
}


def get_pack(names: str | Iterable[str]) -> FormulaPack:
    """Build a subformula-closed pack from shipped pack names.

    Accepts a single name, a comma-separated string, or an iterable of
    names; formulas keep the order the names were given in.
    """
    if isinstance(names, str):
        names = [n.strip() for n in names.split(",") if n.strip()]
    formulas = []
    label_parts = []
    for name in names:
        if name not in PACKS:
            raise KeyError(f"unknown pack {name!r}; available: {sorted(PACKS)}")
        label_parts.append(name)
        formulas.extend(parse(text) for text in PACKS[name])
    pack = FormulaPack("+".join(label_parts) or "empty", tuple(formulas))
    return subformula_closure(pack)
