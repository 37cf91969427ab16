"""Chain-based graph slicing, reflection probes over graph corpora, and
bond-faithful decomposition checking and search.

Slicing follows the scheme: with stages M_0 c M_1 c ... the alpha-th
slice is (G minus M_alpha's edge objects) restricted to M_{alpha+1}.
An implicit empty stage is prepended so that edges inside the first
given stage are not lost; with coherent stages whose last member covers
all vertex and edge objects, the slices partition the edge set.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Callable, Iterable, Sequence

from .graph import (
    Decomposition,
    Edge,
    Graph,
    bridges,
    components,
    cut_of,
    delete_edges,
    enumerate_bonds,
    is_bond,
    is_decomposition,
    make_graph,
    odd_cut_witness,
    odd_vertices,
    restrict,
)
from .hull import Chain, chain, get_pack
from .formula import FormulaPack
from .structure import DEFAULT_BUDGET, FinStructure
from .universe import build_hierarchy, membership_structure, recode_graph

BOND_COMPONENT_CAP = 20


# ---------------------------------------------------------------------------
# slicing


@dataclass(frozen=True)
class SliceSet:
    host: Graph
    stages: tuple[frozenset[int], ...]
    slices: tuple[Graph, ...]
    stage_coherent: tuple[bool, ...]
    covers_host: bool

    @property
    def all_coherent(self) -> bool:
        return all(self.stage_coherent)


def _edge_code(e: Edge) -> int:
    return (1 << e[0]) | (1 << e[1])


def _stage_coherent(G: Graph, stage: frozenset[int]) -> bool:
    # an edge object sits in the stage exactly when both endpoints do
    return all(
        (_edge_code(e) in stage) == (e[0] in stage and e[1] in stage)
        for e in G.edges
    )


def chain_slices(G: Graph, stages: Sequence[Iterable[int]]) -> SliceSet:
    """Slice a code-labelled graph along an increasing stage sequence.

    Stage sets mix vertex codes and edge-object codes.  An empty zeroth
    stage is prepended when the first given stage is nonempty.
    """
    frozen = [frozenset(s) for s in stages]
    for a, b in zip(frozen, frozen[1:]):
        if not (a < b):
            raise ValueError("stages must be strictly increasing")
    if not frozen:
        raise ValueError("need at least one stage")
    if frozen[0]:
        frozen.insert(0, frozenset())
    slices = tuple(
        restrict(delete_edges(G, frozen[i]), frozen[i + 1], edge_aware=True)
        for i in range(len(frozen) - 1)
    )
    everything = set(G.vertices) | {_edge_code(e) for e in G.edges}
    return SliceSet(
        host=G,
        stages=tuple(frozen),
        slices=slices,
        stage_coherent=tuple(_stage_coherent(G, s) for s in frozen),
        covers_host=everything <= frozen[-1],
    )


def slice_partition_check(S: SliceSet) -> bool:
    """Do the slices' edge sets partition the host's edge set?"""
    seen: set[Edge] = set()
    for part in S.slices:
        if seen & part.edges:
            return False
        seen |= part.edges
    return seen == set(S.host.edges)


def slices_from_chain(G: Graph, ambient: FinStructure, ch: Chain) -> SliceSet:
    """Translate a chain's stages from element identifiers to codes and
    slice the graph along them."""
    if ambient.codes is None:
        raise ValueError("ambient structure carries no set codes")
    stage_codes = [frozenset(ambient.codes[i] for i in stage) for stage in ch.stages]
    deduped = [stage_codes[0]]
    for s in stage_codes[1:]:
        if s != deduped[-1]:
            deduped.append(s)
    return chain_slices(G, deduped)


# ---------------------------------------------------------------------------
# graph properties for reflection probes


def _prop_nw(G: Graph) -> tuple[bool, object]:
    # literal reading: no cut has an odd number of edges
    witness = odd_cut_witness(G, mode="exhaustive")
    if witness is not None:
        return False, {
            "odd_cut_side": sorted(witness.side),
            "odd_cut_size": len(witness.edges),
        }
    return True, None


def _prop_even_degree(G: Graph) -> tuple[bool, object]:
    odd = odd_vertices(G)
    if odd:
        return False, {"odd_vertex": odd[0], "degree": G.degree(odd[0])}
    return True, None


def _prop_bridgeless(G: Graph) -> tuple[bool, object]:
    found = bridges(G)
    if found:
        return False, {"bridge": list(found[0])}
    return True, None


def _prop_no_small_component(G: Graph, bound: int = 3) -> tuple[bool, object]:
    for comp in components(G):
        if 1 < len(comp) < bound:
            return False, {"component": sorted(comp)}
    return True, None


PROPERTIES: dict[str, Callable[[Graph], tuple[bool, object]]] = {
    "nw": _prop_nw,
    "even-degree": _prop_even_degree,
    "bridgeless": _prop_bridgeless,
    "no-small-component": _prop_no_small_component,
}


@dataclass(frozen=True)
class ProbeCounterexample:
    subset: tuple[int, ...]
    piece: str  # restrict | delete | slice:<i>
    witness: object


@dataclass(frozen=True)
class ProbeInstance:
    index: int
    status: str  # ok | skipped-rank | skipped-precondition
    rank: int | None = None
    candidates_tested: int = 0
    counterexamples: tuple[ProbeCounterexample, ...] = ()

    @property
    def clean(self) -> bool:
        return self.status == "ok" and not self.counterexamples


@dataclass(frozen=True)
class ProbeReport:
    property_name: str
    pack_name: str
    instances: tuple[ProbeInstance, ...]

    @property
    def counterexample_count(self) -> int:
        return sum(len(i.counterexamples) for i in self.instances)


def _candidate_subsets(ch: Chain) -> list[frozenset[int]]:
    """Stage sets plus every closure prefix, deduplicated in order."""
    out: dict[frozenset[int], None] = {}
    for record in ch.records:
        current = set(record.seed)
        out.setdefault(frozenset(current), None)
        for step in record.trace:
            current.add(step.witness)
            out.setdefault(frozenset(current), None)
    for stage in ch.stages:
        out.setdefault(stage, None)
    return list(out)


def probe_one(
    G: Graph,
    pack: FormulaPack,
    prop: Callable[[Graph], tuple[bool, object]],
    index: int = 0,
    allow_rank5: bool = False,
    budget: int = DEFAULT_BUDGET,
) -> ProbeInstance:
    """Test one graph: encode into the smallest admitting hierarchy,
    chain from the empty seed to full coverage, and evaluate the
    property on the restriction, the deletion and the slices arising
    from every candidate subset."""
    holds, _ = prop(G)
    if not holds:
        return ProbeInstance(index, "skipped-precondition")
    coded, codes = recode_graph(G)
    max_rank = 5 if allow_rank5 else 4
    if codes.rank > max_rank:
        return ProbeInstance(index, "skipped-rank", rank=codes.rank)
    hierarchy = build_hierarchy(codes.rank, allow_rank5=allow_rank5)
    cover = set(coded.vertices) | {_edge_code(e) for e in coded.edges}
    ch = chain(hierarchy, pack, frozenset(), frozenset(cover), budget)
    counterexamples: list[ProbeCounterexample] = []
    tested = 0
    everything = frozenset(cover)
    for subset in _candidate_subsets(ch):
        pieces = [
            ("restrict", restrict(coded, subset)),
            ("delete", delete_edges(coded, subset)),
        ]
        if subset:
            # the two-stage slicing this subset induces: up to the
            # subset, then the rest of the graph
            stages = [frozenset(), frozenset(subset)]
            if not everything <= subset:
                stages.append(frozenset(subset) | everything)
            two_stage = chain_slices(coded, stages)
            pieces += [(f"slice:{i}", s) for i, s in enumerate(two_stage.slices)]
        for name, piece in pieces:
            tested += 1
            ok, witness = prop(piece)
            if not ok:
                counterexamples.append(
                    ProbeCounterexample(tuple(sorted(subset)), name, witness)
                )
    sliced = slices_from_chain(coded, hierarchy.structure, ch)
    for i, piece in enumerate(sliced.slices):
        tested += 1
        ok, witness = prop(piece)
        if not ok:
            counterexamples.append(
                ProbeCounterexample(
                    tuple(sorted(sliced.stages[i])), f"chain-slice:{i}", witness
                )
            )
    return ProbeInstance(
        index, "ok", rank=codes.rank,
        candidates_tested=tested, counterexamples=tuple(counterexamples),
    )


def well_reflecting_probe(
    corpus: Sequence[Graph],
    pack: FormulaPack,
    property_name: str,
    allow_rank5: bool = False,
    budget: int = DEFAULT_BUDGET,
    workers: int = 1,
) -> ProbeReport:
    """Empirically test whether a property survives restriction,
    deletion and slicing across a corpus.  Nothing is asserted a priori;
    the report simply records every failure found."""
    if property_name not in PROPERTIES:
        raise KeyError(f"unknown property {property_name!r}; available: {sorted(PROPERTIES)}")
    prop = PROPERTIES[property_name]
    if workers > 1:
        from concurrent.futures import ProcessPoolExecutor

        args = [(G, pack, property_name, i, allow_rank5, budget) for i, G in enumerate(corpus)]
        with ProcessPoolExecutor(max_workers=workers) as pool:
            instances = tuple(pool.map(_probe_star, args))
    else:
        instances = tuple(
            probe_one(G, pack, prop, i, allow_rank5, budget)
            for i, G in enumerate(corpus)
        )
    return ProbeReport(property_name, pack.name, instances)


def _probe_star(args) -> ProbeInstance:
    G, pack, property_name, index, allow_rank5, budget = args
    return probe_one(G, pack, PROPERTIES[property_name], index, allow_rank5, budget)


# ---------------------------------------------------------------------------
# bond-faithful decompositions


@dataclass(frozen=True)
class BondFaithfulReport:
    kappa: int
    size_ok: bool
    containment_ok: bool
    bond_preservation_ok: bool
    oversized_members: tuple[int, ...] = ()
    split_bonds: tuple[frozenset[Edge], ...] = ()
    foreign_bonds: tuple[tuple[int, frozenset[Edge]], ...] = ()
    sampled: bool = False

    @property
    def verdict(self) -> bool:
        return self.size_ok and self.containment_ok and self.bond_preservation_ok


def _host_bonds_upto(G: Graph, max_size: int, cap: int) -> tuple[list[frozenset[Edge]], bool]:
    """Bonds of G with at most max_size edges; falls back to sampling
    vertex-star and two-set cuts when a component exceeds the cap."""
    try:
        return enumerate_bonds(G, max_size=max_size, component_cap=cap), False
    except ValueError:
        sampled: dict[frozenset[Edge], None] = {}
        singles = [{v} for v in sorted(G.vertices)]
        doubles = [set(p) for p in itertools.combinations(sorted(G.vertices), 2)]
        for side in singles + doubles:
            F = cut_of(G, side).edges
            if F and len(F) <= max_size and is_bond(G, F):
                sampled.setdefault(F, None)
        return list(sampled), True


def check_bond_faithful(
    G: Graph,
    parts: Decomposition | Sequence[Graph],
    kappa: int,
    component_cap: int = BOND_COMPONENT_CAP,
) -> BondFaithfulReport:
    """Check the three clauses of bond-faithfulness with witnesses.

    Size: every member has at most kappa edges.  Containment: every
    host bond with at most kappa edges lies inside one member's edge
    set.  Preservation: every member bond with fewer than kappa edges is
    a bond of the host.
    """
    members = tuple(parts.parts) if isinstance(parts, Decomposition) else tuple(parts)
    if kappa < 1:
        raise ValueError("kappa must be at least 1")
    if not is_decomposition(G, members):
        raise ValueError("parts do not form a decomposition of the host")
    oversized = tuple(
        i for i, part in enumerate(members) if len(part.edges) > kappa
    )
    host_bonds, sampled = _host_bonds_upto(G, kappa, component_cap)
    split = tuple(
        F for F in host_bonds
        if not any(F <= part.edges for part in members)
    )
    foreign: list[tuple[int, frozenset[Edge]]] = []
    for i, part in enumerate(members):
        for F in enumerate_bonds(part, max_size=None, component_cap=component_cap):
            if len(F) < kappa and not is_bond(G, F):
                foreign.append((i, F))
    return BondFaithfulReport(
        kappa=kappa,
        size_ok=not oversized,
        containment_ok=not split,
        bond_preservation_ok=not foreign,
        oversized_members=oversized,
        split_bonds=split,
        foreign_bonds=tuple(foreign),
        sampled=sampled,
    )


@dataclass(frozen=True)
class BondFaithfulSearch:
    status: str  # found | budget-exhausted | proven-absent
    decomposition: Decomposition | None = None
    report: BondFaithfulReport | None = None


EXHAUSTIVE_EDGE_LIMIT = 8


def _subgraph_of(G: Graph, edges: Iterable[Edge]) -> Graph:
    es = frozenset(edges)
    vs = frozenset(v for e in es for v in e)
    return Graph(vs, es)


def _edge_partitions(edges: list[Edge]):
    """All set partitions of the edge list (restricted growth strings)."""
    if not edges:
        yield []
        return
    first, rest = edges[0], edges[1:]
    for sub in _edge_partitions(rest):
        for i in range(len(sub)):
            yield sub[:i] + [sub[i] + [first]] + sub[i + 1:]
        yield sub + [[first]]


def _slice_candidate(G: Graph, kappa: int) -> list[Graph] | None:
    """Chain-slice a connected graph over its membership structure;
    None when slicing makes no progress."""
    coded, codes = recode_graph(G)
    ambient = membership_structure(
        list(codes.vertex_code.values()) + list(codes.edge_code.values())
    )
    pack = get_pack("pairing,members")
    cover_codes = set(coded.vertices) | {_edge_code(e) for e in coded.edges}
    index = {c: i for i, c in enumerate(ambient.codes)}
    cover_ids = frozenset(index[c] for c in cover_codes)
    ch = chain(ambient, pack, frozenset(), cover_ids)
    sliced = slices_from_chain(coded, ambient, ch)
    if not (sliced.all_coherent and slice_partition_check(sliced)):
        return None
    pieces = [s for s in sliced.slices if s.edges]
    if len(pieces) <= 1:
        return None
    back = {c: v for v, c in codes.vertex_code.items()}
    return [
        make_graph(
            {back[v] for v in piece.vertices if v in back},
            {(back[u], back[v]) for u, v in piece.edges},
        )
        for piece in pieces
    ]


def _repair(G: Graph, members: list[frozenset[Edge]], kappa: int) -> list[frozenset[Edge]]:
    """Merge members until no small host bond is split across members."""
    bonds, _ = _host_bonds_upto(G, kappa, BOND_COMPONENT_CAP)
    current = [set(m) for m in members if m]
    changed = True
    while changed:
        changed = False
        for F in bonds:
            owners = [i for i, m in enumerate(current) if m & F]
            if len(owners) > 1:
                merged = set().union(*(current[i] for i in owners))
                current = [m for i, m in enumerate(current) if i not in owners]
                current.append(merged)
                changed = True
                break
    return [frozenset(m) for m in current]


def search_bond_faithful(
    G: Graph, kappa: int, budget: int = 50_000
) -> BondFaithfulSearch:
    """Heuristic pipeline: component split, chain slicing, recursion,
    then a merge repair pass; every candidate is validated before being
    returned.  On graphs with few edges a failed heuristic falls back to
    exhaustive partition search, which can prove absence."""
    if kappa < 1:
        raise ValueError("kappa must be at least 1")
    candidate = _search_candidate(G, kappa, budget)
    members = [_subgraph_of(G, m) for m in candidate if m]
    report = check_bond_faithful(G, members, kappa)
    if report.verdict:
        return BondFaithfulSearch("found", Decomposition(tuple(members)), report)
    if len(G.edges) <= EXHAUSTIVE_EDGE_LIMIT:
        spent = 0
        for partition in _edge_partitions(sorted(G.edges)):
            spent += 1
            if spent > budget:
                return BondFaithfulSearch("budget-exhausted")
            if any(len(block) > kappa for block in partition):
                continue
            parts = [_subgraph_of(G, block) for block in partition]
            rep = check_bond_faithful(G, parts, kappa)
            if rep.verdict:
                return BondFaithfulSearch("found", Decomposition(tuple(parts)), rep)
        return BondFaithfulSearch("proven-absent")
    return BondFaithfulSearch("budget-exhausted")


def _search_candidate(G: Graph, kappa: int, budget: int) -> list[frozenset[Edge]]:
    if not G.edges:
        return []
    if len(G.edges) <= kappa:
        return [frozenset(G.edges)]
    comps = components(G)
    if len(comps) > 1:
        out: list[frozenset[Edge]] = []
        for comp in comps:
            piece = restrict(G, comp)
            if piece.edges:
                out.extend(_search_candidate(piece, kappa, budget))
        return _repair(G, out, kappa)
    pieces = _slice_candidate(G, kappa)
    if pieces is None:
        # fall back to greedy buckets and let the repair pass regroup
        ordered = sorted(G.edges)
        buckets = [
            frozenset(ordered[i : i + kappa]) for i in range(0, len(ordered), kappa)
        ]
        return _repair(G, buckets, kappa)
    out = []
    for piece in pieces:
        if len(piece.edges) < len(G.edges):
            out.extend(_search_candidate(piece, kappa, budget))
        else:  # pragma: no cover - slicing guaranteed progress above
            out.append(frozenset(piece.edges))
    return _repair(G, out, kappa)
