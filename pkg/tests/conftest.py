import random

from finmodel.graph import Graph, make_graph
from finmodel.structure import FinStructure

from hypothesis import settings

settings.register_profile("suite", deadline=None, max_examples=60, derandomize=True)
settings.load_profile("suite")


def bowtie() -> Graph:
    # two triangles sharing vertex 2
    return make_graph(range(5), [(0, 1), (1, 2), (0, 2), (2, 3), (3, 4), (2, 4)])


def random_bitmask_graph(n: int, mask: int) -> Graph:
    """Graph on n labelled vertices from an edge bitmask over the
    lexicographic edge slots of the complete graph."""
    slots = [(u, v) for u in range(n) for v in range(u + 1, n)]
    edges = [slots[i] for i in range(len(slots)) if mask >> i & 1]
    return make_graph(range(n), edges)


def edge_slot_count(n: int) -> int:
    return n * (n - 1) // 2


def seeded(seed: int) -> random.Random:
    return random.Random(seed)


def structure_of_pairs(n: int, pairs) -> FinStructure:
    return FinStructure(n, frozenset(pairs))
