"""Definition-transcribing brute-force oracles.

Each function here recomputes something the fast path also computes, by
a deliberately different route lifted straight from the definitions:
cuts come from explicit bipartitions, minimality from subset scans,
connectivity from separator enumeration.  The CLI ``--validate`` mode
and the test suite compare fast paths against these.
"""

from __future__ import annotations

import itertools
from typing import Iterable, Sequence

from .combinatorics import DeltaSystem, SetFamily, is_delta_system
from .graph import Edge, Graph, components, delete_edges, edge

BIPARTITION_GATE = 16


def all_cuts(G: Graph) -> set[frozenset[Edge]]:
    """Every edge set of the form E intersected with [A, complement]."""
    vertices = sorted(G.vertices)
    if len(vertices) > BIPARTITION_GATE:
        raise ValueError(f"{len(vertices)} vertices exceed the bipartition gate")
    cuts: set[frozenset[Edge]] = set()
    for k in range(len(vertices) + 1):
        for side in itertools.combinations(vertices, k):
            aset = set(side)
            cuts.add(
                frozenset(e for e in G.edges if (e[0] in aset) != (e[1] in aset))
            )
    return cuts


def bonds_by_definition(G: Graph) -> list[frozenset[Edge]]:
    """Nonempty cuts that are inclusion-minimal among the cuts."""
    cuts = all_cuts(G)
    nonempty = [c for c in cuts if c]
    return sorted(
        (
            c for c in nonempty
            if not any(other and other < c for other in nonempty)
        ),
        key=lambda f: (len(f), sorted(f)),
    )


def is_bond_by_definition(G: Graph, F: Iterable[Edge]) -> bool:
    fset = frozenset(edge(u, v) for u, v in F)
    if not fset:
        return False
    cuts = all_cuts(G)
    if fset not in cuts:
        return False
    return not any(c and c < fset for c in cuts)


def separates(G: Graph, F: Iterable[Edge], x: int, y: int) -> bool:
    comps = components(delete_edges(G, frozenset(F)))
    return not any(x in c and y in c for c in comps)


def edge_connectivity_brute(G: Graph, x: int, y: int) -> int:
    """Smallest separating edge set, by ascending-size enumeration."""
    if separates(G, frozenset(), x, y):
        return 0
    edges = sorted(G.edges)
    for size in range(1, len(edges) + 1):
        for combo in itertools.combinations(edges, size):
            if separates(G, combo, x, y):
                return size
    raise AssertionError("removing all edges must separate distinct vertices")


def bridges_by_deletion(G: Graph) -> list[Edge]:
    return sorted(e for e in G.edges if separates(G, {e}, *e))


def bond_faithful_by_definition(
    G: Graph, parts: Sequence[Graph], kappa: int
) -> bool:
    """Literal transcription of the three bond-faithfulness clauses,
    everything enumerated through :func:`bonds_by_definition`."""
    if any(len(part.edges) > kappa for part in parts):
        return False
    host_bonds = bonds_by_definition(G)
    for F in host_bonds:
        if len(F) <= kappa and not any(F <= part.edges for part in parts):
            return False
    host_bond_set = set(host_bonds)
    for part in parts:
        for F in bonds_by_definition(part):
            if len(F) < kappa and F not in host_bond_set:
                return False
    return True


def max_sunflower_by_kernels(family: SetFamily) -> DeltaSystem:
    """Second, kernel-indexed route to the maximum delta-subfamily.

    Candidate kernels are all pairwise intersections plus every member
    and the empty set; for each kernel the best compatible subfamily is
    found by exact search over the members containing it.  Ties resolve
    to the lexicographically least index set, matching the subset-scan
    route.
    """
    sets = family.sets
    n = len(sets)
    if n == 0:
        return DeltaSystem((), (), frozenset(), degenerate=True)
    kernels: set[frozenset[int]] = {frozenset()}
    kernels.update(sets)
    for a, b in itertools.combinations(sets, 2):
        kernels.add(a & b)
    best: tuple[int, tuple[int, ...]] | None = None

    def consider(indices: tuple[int, ...]) -> None:
        nonlocal best
        key = (-len(indices), indices)
        if best is None or key < (-best[0], best[1]):
            best = (len(indices), indices)

    for kernel in kernels:
        carriers = [i for i in range(n) if kernel <= sets[i]]
        # exact maximum pairwise-compatible subfamily for this kernel
        stack: list[tuple[tuple[int, ...], int]] = [((), 0)]
        while stack:
            chosen, start = stack.pop()
            consider(chosen)
            for pos in range(start, len(carriers)):
                i = carriers[pos]
                if all(sets[i] & sets[j] == kernel for j in chosen):
                    stack.append((chosen + (i,), pos + 1))
    assert best is not None
    size, indices = best
    members = tuple(sets[i] for i in indices)
    kernel = is_delta_system(members)
    assert kernel is not None
    return DeltaSystem(indices, members, kernel, degenerate=size < 2)
