"""Finite simple graphs with edge-set identity, and the cut/bond/cycle
machinery built on them.

Edges are canonical ordered tuples ``(min, max)`` and are treated as
first-class objects: in hereditarily-finite runs a vertex identifier is
its set code and an edge's object code is the code of the two-element
set, so "this edge belongs to M" is a meaningful membership question.
"""

from __future__ import annotations

import itertools
from collections import deque
from dataclasses import dataclass
from typing import Iterable, Sequence

Edge = tuple[int, int]


def edge(u: int, v: int) -> Edge:
    if u == v:
        raise ValueError(f"loop at {u} not allowed")
    return (u, v) if u < v else (v, u)


@dataclass(frozen=True)
class Graph:
    vertices: frozenset[int]
    edges: frozenset[Edge]

    def __post_init__(self) -> None:
        for u, v in self.edges:
            if u >= v:
                raise ValueError(f"edge {(u, v)} not in canonical order")
            if u not in self.vertices or v not in self.vertices:
                raise ValueError(f"edge {(u, v)} has an endpoint outside the vertex set")

    def degree(self, v: int) -> int:
        return sum(1 for e in self.edges if v in e)

    def neighbors(self, v: int) -> set[int]:
        return {u + w - v for u, w in self.edges if v in (u, w)}

    def adjacency(self) -> dict[int, set[int]]:
        adj: dict[int, set[int]] = {v: set() for v in self.vertices}
        for u, v in self.edges:
            adj[u].add(v)
            adj[v].add(u)
        return adj


def make_graph(vertices: Iterable[int], edges: Iterable[Sequence[int]]) -> Graph:
    vs = frozenset(vertices)
    es = frozenset(edge(u, v) for u, v in edges)
    return Graph(vs, es)


def cycle_graph(n: int, offset: int = 0) -> Graph:
    vs = range(offset, offset + n)
    return make_graph(vs, [(offset + i, offset + (i + 1) % n) for i in range(n)])


def complete_graph(n: int) -> Graph:
    return make_graph(range(n), itertools.combinations(range(n), 2))


def components(G: Graph) -> list[frozenset[int]]:
    """Connected components, each sorted internally, ordered by minimum."""
    adj = G.adjacency()
    seen: set[int] = set()
    out = []
    for start in sorted(G.vertices):
        if start in seen:
            continue
        comp = {start}
        stack = [start]
        while stack:
            v = stack.pop()
            for w in adj[v]:
                if w not in comp:
                    comp.add(w)
                    stack.append(w)
        seen |= comp
        out.append(frozenset(comp))
    return out


def is_connected(G: Graph) -> bool:
    return len(components(G)) <= 1


# ---------------------------------------------------------------------------
# restriction and deletion


def restrict(G: Graph, M: Iterable[int], edge_aware: bool = False) -> Graph:
    """The restriction to M: vertices in M, edges inside M.

    In edge-aware mode (hereditarily-finite runs, where M may contain
    edges as set objects) an edge additionally survives only if its own
    object code ``2**u + 2**v`` lies in M.
    """
    mset = set(M)
    vs = G.vertices & mset
    if edge_aware:
        es = {
            e for e in G.edges
            if e[0] in mset and e[1] in mset and (1 << e[0]) | (1 << e[1]) in mset
        }
    else:
        es = {e for e in G.edges if e[0] in mset and e[1] in mset}
    return Graph(frozenset(vs), frozenset(es))


def delete_edges(G: Graph, M: Iterable) -> Graph:
    """Remove the edges that belong to M, keeping every vertex.

    M may mix edge tuples with integer object codes; an integer removes
    the edge whose two-element-set code it is.  Everything else in M is
    ignored, matching removal of edge objects only.
    """
    doomed: set[Edge] = set()
    codes: set[int] = set()
    for item in M:
        if isinstance(item, int):
            codes.add(item)
        else:
            u, v = item
            doomed.add(edge(u, v))
    es = {
        e for e in G.edges
        if e not in doomed and ((1 << e[0]) | (1 << e[1])) not in codes
    }
    return Graph(G.vertices, frozenset(es))


# ---------------------------------------------------------------------------
# cuts and bonds


@dataclass(frozen=True)
class CutWitness:
    side: frozenset[int]
    edges: frozenset[Edge]


def cut_of(G: Graph, A: Iterable[int]) -> CutWitness:
    """The edges crossing between A and its complement."""
    aset = frozenset(A)
    crossing = frozenset(e for e in G.edges if (e[0] in aset) != (e[1] in aset))
    return CutWitness(aset & G.vertices, crossing)


def is_cut(G: Graph, F: Iterable[Edge]) -> bool:
    """Is F of the form ``E âˆ© [A, A-complement]`` for some vertex set A?

    Characterization used: every F-edge must join two different
    components of G minus F, and the component multigraph drawn by the
    F-edges must be two-colorable.
    """
    fset = frozenset(edge(u, v) for u, v in F)
    if not fset <= G.edges:
        return False
    if not fset:
        return True
    comp_of: dict[int, int] = {}
    for i, comp in enumerate(components(delete_edges(G, fset))):
        for v in comp:
            comp_of[v] = i
    links: dict[int, set[int]] = {}
    for u, v in fset:
        cu, cv = comp_of[u], comp_of[v]
        if cu == cv:
            return False
        links.setdefault(cu, set()).add(cv)
        links.setdefault(cv, set()).add(cu)
    color: dict[int, int] = {}
    for start in links:
        if start in color:
            continue
        color[start] = 0
        stack = [start]
        while stack:
            c = stack.pop()
            for d in links[c]:
                if d not in color:
                    color[d] = 1 - color[c]
                    stack.append(d)
                elif color[d] == color[c]:
                    return False
    return True


def is_bond(G: Graph, F: Iterable[Edge]) -> bool:
    """Nonempty F is a bond when two distinct components of G minus F
    account for exactly the edges of F between them."""
    fset = frozenset(edge(u, v) for u, v in F)
    if not fset or not fset <= G.edges:
        return False
    comp_of: dict[int, int] = {}
    comps = components(delete_edges(G, fset))
    for i, comp in enumerate(comps):
        for v in comp:
            comp_of[v] = i
    u, v = next(iter(fset))
    c1, c2 = comp_of[u], comp_of[v]
    if c1 == c2:
        return False
    between = frozenset(
        e for e in G.edges if {comp_of[e[0]], comp_of[e[1]]} == {c1, c2}
    )
    return between == fset


def cut_to_bonds(G: Graph, F: Iterable[Edge]) -> list[frozenset[Edge]]:
    """Split a cut into pairwise disjoint bonds whose union is the cut.

    Repeatedly peels off a minimal cut-subset (the first one in
    size-then-lexicographic order, necessarily a bond); what remains is
    again a cut because cuts are closed under symmetric difference.
    """
    fset = frozenset(edge(u, v) for u, v in F)
    if not is_cut(G, fset):
        raise ValueError("edge set is not a cut")
    bonds: list[frozenset[Edge]] = []
    remaining = fset
    while remaining:
        if is_bond(G, remaining):
            bonds.append(remaining)
            break
        ordered = sorted(remaining)
        peeled = None
        for size in range(1, len(ordered)):
            for combo in itertools.combinations(ordered, size):
                if is_cut(G, frozenset(combo)):
                    peeled = frozenset(combo)
                    break
            if peeled:
                break
        if peeled is None:  # pragma: no cover - a non-minimal cut has a smaller one
            raise AssertionError("failed to split a non-minimal cut")
        bonds.append(peeled)
        remaining = remaining - peeled
    return bonds


def enumerate_bonds(
    G: Graph, max_size: int | None = None, component_cap: int = 20
) -> list[frozenset[Edge]]:
    """All bonds (optionally only those up to max_size), deterministic.

    A bond always lives inside one connected component, so bipartitions
    are enumerated per component; components larger than the cap raise.
    """
    out: dict[frozenset[Edge], None] = {}
    for comp in components(G):
        members = sorted(comp)
        if len(members) > component_cap:
            raise ValueError(
                f"component with {len(members)} vertices exceeds the enumeration cap"
            )
        if len(members) < 2:
            continue
        anchor, rest = members[0], members[1:]
        for k in range(len(rest) + 1):
            for picked in itertools.combinations(rest, k):
                side = frozenset((anchor, *picked))
                F = cut_of(G, side).edges
                if not F or (max_size is not None and len(F) > max_size):
                    continue
                if F not in out and is_bond(G, F):
                    out[F] = None
    return sorted(out, key=lambda f: (len(f), sorted(f)))


@dataclass(frozen=True)
class BondInheritance:
    """How a bond of a subgraph sits inside the host graph.

    ``kind`` is ``bond-in-host`` when F is a bond of the host too,
    ``confined`` when instead all of F lies inside a single component of
    the host minus F (with that component reported), and ``violation``
    if neither holds, which would contradict a fact that is provably
    impossible and is therefore treated as fatal.
    """

    kind: str
    component: frozenset[int] | None = None


def check_bond_inheritance(G: Graph, H: Graph, F: Iterable[Edge]) -> BondInheritance:
    fset = frozenset(edge(u, v) for u, v in F)
    if not (H.vertices <= G.vertices and H.edges <= G.edges):
        raise ValueError("H is not a subgraph of G")
    if not is_bond(H, fset):
        raise ValueError("F is not a bond of the subgraph")
    if is_bond(G, fset):
        return BondInheritance("bond-in-host")
    comps = components(delete_edges(G, fset))
    endpoints = {v for e in fset for v in e}
    for comp in comps:
        if endpoints <= comp:
            return BondInheritance("confined", comp)
    return BondInheritance("violation")


# ---------------------------------------------------------------------------
# edge connectivity and disjoint paths


def edge_connectivity(G: Graph, x: int, y: int) -> int:
    """Minimum number of edges separating x from y (max-flow with unit
    capacities on both orientations of every edge)."""
    if x == y:
        raise ValueError("endpoints must differ")
    flow = _max_unit_flow(G, x, y)
    return flow[0]


def edge_disjoint_paths(G: Graph, x: int, y: int, k: int) -> list[list[int]]:
    """k pairwise edge-disjoint x-y paths extracted from a maximum flow."""
    if x == y:
        raise ValueError("endpoints must differ")
    value, used = _max_unit_flow(G, x, y)
    if k > value:
        raise ValueError(f"asked for {k} paths but connectivity is {value}")
    paths = []
    for _ in range(k):
        walk = [x]
        v = x
        while v != y:
            w = min(used[v])
            used[v].discard(w)
            if not used[v]:
                del used[v]
            walk.append(w)
            v = w
        # drop any flow cycles the trail walked through
        path: list[int] = []
        position: dict[int, int] = {}
        for v in walk:
            if v in position:
                for dropped in path[position[v] + 1:]:
                    del position[dropped]
                del path[position[v] + 1:]
            else:
                position[v] = len(path)
                path.append(v)
        paths.append(path)
    return paths


def _max_unit_flow(G: Graph, x: int, y: int) -> tuple[int, dict[int, set[int]]]:
    if x not in G.vertices or y not in G.vertices:
        raise ValueError("endpoints must be vertices")
    # residual[u][v] == 1 means one more unit can travel u -> v
    residual: dict[int, dict[int, int]] = {v: {} for v in G.vertices}
    for u, v in G.edges:
        residual[u][v] = 1
        residual[v][u] = 1
    value = 0
    while True:
        parent = {x: None}
        queue = deque([x])
        while queue and y not in parent:
            v = queue.popleft()
            for w in sorted(residual[v]):
                if residual[v][w] > 0 and w not in parent:
                    parent[w] = v
                    queue.append(w)
        if y not in parent:
            break
        v = y
        while parent[v] is not None:
            u = parent[v]
            residual[u][v] -= 1
            residual[v][u] += 1
            v = u
        value += 1
    # net flow along each undirected edge gives the path system
    used: dict[int, set[int]] = {}
    for u, v in G.edges:
        net_uv = 1 - residual[u][v]
        if net_uv > 0:
            used.setdefault(u, set()).add(v)
        elif net_uv < 0:
            used.setdefault(v, set()).add(u)
    return value, used


# ---------------------------------------------------------------------------
# parity, cycles, bridges


def odd_vertices(G: Graph) -> list[int]:
    return sorted(v for v in G.vertices if G.degree(v) % 2 == 1)


def odd_cut_witness(
    G: Graph, mode: str = "fast", component_cap: int = 20
) -> CutWitness | None:
    """A cut with an odd number of edges, or None.

    Fast mode returns the star of the smallest odd-degree vertex.
    Exhaustive mode scans every bipartition per component (capped).  The
    two modes agree on existence: the size of the cut at A has the
    parity of the sum of degrees over A.
    """
    if mode == "fast":
        odd = odd_vertices(G)
        if not odd:
            return None
        return cut_of(G, {odd[0]})
    if mode != "exhaustive":
        raise ValueError(f"unknown mode {mode!r}")
    for comp in components(G):
        members = sorted(comp)
        if len(members) > component_cap:
            raise ValueError(
                f"component with {len(members)} vertices exceeds the exhaustive cap"
            )
        for k in range(1, len(members) + 1):
            for picked in itertools.combinations(members, k):
                witness = cut_of(G, picked)
                if len(witness.edges) % 2 == 1:
                    return witness
    return None


@dataclass(frozen=True)
class Decomposition:
    """Subgraphs of a common host whose edge sets partition the host's."""

    parts: tuple[Graph, ...]


def is_decomposition(G: Graph, parts: Sequence[Graph]) -> bool:
    seen: set[Edge] = set()
    for part in parts:
        if not (part.vertices <= G.vertices and part.edges <= G.edges):
            return False
        if seen & part.edges:
            return False
        seen |= part.edges
    return seen == set(G.edges)


def is_cycle(G: Graph) -> bool:
    active = [v for v in G.vertices if G.degree(v) > 0]
    if not active or G.edges == frozenset():
        return False
    if any(G.degree(v) != 2 for v in active):
        return False
    sub = restrict(G, active)
    return is_connected(sub) and len(sub.edges) == len(active)


@dataclass(frozen=True)
class CycleDecompositionResult:
    decomposition: Decomposition | None
    odd_vertex: int | None

    @property
    def ok(self) -> bool:
        return self.decomposition is not None


def veblen_decomposition(G: Graph) -> CycleDecompositionResult:
    """Partition the edges into cycles, possible exactly when every
    degree is even; otherwise report the smallest odd-degree vertex.

    Peeling is deterministic: walks start at the smallest vertex with
    remaining edges and always leave along the smallest-numbered unused
    neighbor.
    """
    odd = odd_vertices(G)
    if odd:
        return CycleDecompositionResult(None, odd[0])
    remaining: dict[int, set[int]] = {v: set() for v in G.vertices}
    for u, v in G.edges:
        remaining[u].add(v)
        remaining[v].add(u)
    cycles = []
    while True:
        start = min((v for v in remaining if remaining[v]), default=None)
        if start is None:
            break
        walk = [start]
        index = {start: 0}
        v = start
        while remaining[v]:
            w = min(remaining[v])
            remaining[v].discard(w)
            remaining[w].discard(v)
            if w in index:
                # close the cycle and keep walking from w; evenness
                # guarantees the remaining walk can still be consumed
                cycle_vertices = walk[index[w]:]
                cycle_edges = [
                    edge(cycle_vertices[i], cycle_vertices[(i + 1) % len(cycle_vertices)])
                    for i in range(len(cycle_vertices))
                ]
                cycles.append(make_graph(cycle_vertices, cycle_edges))
                for u in walk[index[w] + 1:]:
                    del index[u]
                del walk[index[w] + 1:]
            else:
                walk.append(w)
                index[w] = len(walk) - 1
            v = w
        assert walk == [start], "walk finished away from its start"
    return CycleDecompositionResult(Decomposition(tuple(cycles)), None)


def bridges(G: Graph) -> list[Edge]:
    """Edges whose removal separates their endpoints (low-link DFS)."""
    adj = G.adjacency()
    preorder: dict[int, int] = {}
    low: dict[int, int] = {}
    out: list[Edge] = []
    counter = itertools.count()

    for root in sorted(G.vertices):
        if root in preorder:
            continue
        # iterative DFS, tracking the edge used to enter each vertex
        stack: list[tuple[int, int | None, Iterable[int]]] = []
        preorder[root] = low[root] = next(counter)
        stack.append((root, None, iter(sorted(adj[root]))))
        while stack:
            v, parent, it = stack[-1]
            advanced = False
            for w in it:
                if w not in preorder:
                    preorder[w] = low[w] = next(counter)
                    stack.append((w, v, iter(sorted(adj[w]))))
                    advanced = True
                    break
                if w != parent:
                    low[v] = min(low[v], preorder[w])
            if not advanced:
                stack.pop()
                if stack:
                    p = stack[-1][0]
                    low[p] = min(low[p], low[v])
                    if low[v] > preorder[p]:
                        out.append(edge(p, v))
    return sorted(out)


def is_bridgeless(G: Graph) -> bool:
    return not bridges(G)


# ---------------------------------------------------------------------------
# cycle double cover search


def enumerate_cycles(G: Graph) -> list[frozenset[Edge]]:
    """Edge sets of all simple cycles, canonically ordered.

    Each cycle is found once, rooted at its smallest vertex, extending
    paths only through larger-or-equal vertices.
    """
    adj = G.adjacency()
    cycles: set[frozenset[Edge]] = set()
    for root in sorted(G.vertices):
        stack = [(root, [root], set())]
        while stack:
            v, path, used = stack.pop()
            for w in sorted(adj[v]):
                e = edge(v, w)
                if e in used:
                    continue
                if w == root and len(path) >= 3:
                    cycles.add(frozenset(used | {e}))
                    continue
                if w in path or w < root:
                    continue
                stack.append((w, path + [w], used | {e}))
    return sorted(cycles, key=lambda c: (len(c), sorted(c)))


@dataclass(frozen=True)
class DoubleCoverResult:
    status: str  # found | budget-exhausted | proven-absent
    cycles: tuple[frozenset[Edge], ...] | None = None


def cycle_double_cover_search(
    G: Graph, budget: int = 200_000, max_edges: int = 14
) -> DoubleCoverResult:
    """Backtracking search for a family of cycles covering each edge
    exactly twice.  Bridged input is rejected outright (a bridge lies on
    no cycle, so no cover can exist)."""
    if bridges(G):
        raise ValueError("graph has a bridge; no cycle can cover it")
    if len(G.edges) > max_edges:
        raise ValueError(f"graph exceeds the {max_edges}-edge search gate")
    if not G.edges:
        return DoubleCoverResult("found", ())
    cycles = enumerate_cycles(G)
    edges = sorted(G.edges)
    cycles_through: dict[Edge, list[int]] = {e: [] for e in edges}
    for i, cyc in enumerate(cycles):
        for e in cyc:
            cycles_through[e].append(i)

    demand = {e: 2 for e in edges}
    chosen: list[int] = []
    nodes = 0

    def search(min_cycle: int) -> str:
        nonlocal nodes
        nodes += 1
        if nodes > budget:
            return "budget"
        open_edges = [e for e in edges if demand[e] > 0]
        if not open_edges:
            return "found"
        target = open_edges[0]
        for i in cycles_through[target]:
            if i < min_cycle:
                continue
            cyc = cycles[i]
            if any(demand[e] == 0 for e in cyc):
                continue
            for e in cyc:
                demand[e] -= 1
            chosen.append(i)
            verdict = search(i)  # same cycle may repeat (e.g. a lone triangle)
            if verdict != "absent":
                return verdict
            chosen.pop()
            for e in cyc:
                demand[e] += 1
        return "absent"

    verdict = search(0)
    if verdict == "found":
        family = tuple(cycles[i] for i in chosen)
        counts: dict[Edge, int] = {e: 0 for e in edges}
        for cyc in family:
            for e in cyc:
                counts[e] += 1
        assert all(c == 2 for c in counts.values()), "search produced a bad cover"
        return DoubleCoverResult("found", family)
    if verdict == "budget":
        return DoubleCoverResult("budget-exhausted")
    return DoubleCoverResult("proven-absent")
