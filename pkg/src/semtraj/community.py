"""Communities of common interest as maximal cliques of the similarity graph."""

from __future__ import annotations

import heapq
from collections.abc import Iterable

from ._parallel import parallel_map
from .model import Community, ResourceExceeded, ScoredPair, canonical_pair

DEFAULT_MAX_CLIQUES = 10**6

Graph = dict[int, set[int]]


def build_graph(similar: Iterable[ScoredPair | tuple[int, int]]) -> Graph:
    graph: Graph = {}
    for p in similar:
        a, b = (p.id1, p.id2) if isinstance(p, ScoredPair) else canonical_pair(*p)
        graph.setdefault(a, set()).add(b)
        graph.setdefault(b, set()).add(a)
    return graph


def degeneracy_order(graph: Graph) -> list[int]:
    """Vertices in smallest-last order (ties broken by vertex id)."""
    degree = {v: len(n) for v, n in graph.items()}
    heap = [(d, v) for v, d in degree.items()]
    heapq.heapify(heap)
    removed: set[int] = set()
    order = []
    while heap:
        d, v = heapq.heappop(heap)
        if v in removed or d != degree[v]:
            continue
        removed.add(v)
        order.append(v)
        for w in graph[v]:
            if w not in removed:
                degree[w] -= 1
                heapq.heappush(heap, (degree[w], w))
    return order


def _expand(r: list[int], p: set[int], x: set[int], graph: Graph, out: list[tuple[int, ...]],
            found: list[int], limit: int) -> None:
    if not p and not x:
        if len(r) >= 2:
            out.append(tuple(sorted(r)))
            found[0] += 1
            if found[0] > limit:
                raise ResourceExceeded(f"more than {limit} maximal cliques")
        return
    pivot = max(p | x, key=lambda u: (len(p & graph[u]), -u))
    for v in sorted(p - graph[pivot]):
        nbrs = graph[v]
        r.append(v)
        _expand(r, p & nbrs, x & nbrs, graph, out, found, limit)
        r.pop()
        p.discard(v)
        x.add(v)


def maximal_cliques(graph: Graph, max_cliques: int = DEFAULT_MAX_CLIQUES, workers: int = 1) -> list[Community]:
    """All maximal cliques with at least two members, sorted.

    Bron-Kerbosch with pivoting; the outer level walks vertices in
    degeneracy order so each outer branch is independent and can run on its
    own worker. Raises ``ResourceExceeded`` past ``max_cliques``.
    """
    order = degeneracy_order(graph)
    pos = {v: i for i, v in enumerate(order)}
    found = [0]

    def outer(v: int) -> list[tuple[int, ...]]:
        nbrs = graph[v]
        out: list[tuple[int, ...]] = []
        _expand([v], {w for w in nbrs if pos[w] > pos[v]}, {w for w in nbrs if pos[w] < pos[v]},
                graph, out, found, max_cliques)
        return out

    branches = parallel_map(outer, order, workers)
    cliques = sorted(c for branch in branches for c in branch)
    if len(cliques) > max_cliques:
        raise ResourceExceeded(f"more than {max_cliques} maximal cliques")
    return [Community(c) for c in cliques]
