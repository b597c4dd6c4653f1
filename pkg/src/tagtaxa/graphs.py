"""Small directed-graph helpers shared by the meronomy and synonymy code.

Graphs here are plain ``(nodes, edges)`` pairs: an iterable of hashable nodes and an
iterable of ``(src, dst)`` tuples.
"""

from __future__ import annotations

from collections import defaultdict, deque
from typing import Hashable, Iterable, TypeVar

N = TypeVar("N", bound=Hashable)


def successors(nodes: Iterable[N], edges: Iterable[tuple[N, N]]) -> dict[N, set[N]]:
    adj: dict[N, set[N]] = {n: set() for n in nodes}
    for u, v in edges:
        adj.setdefault(u, set()).add(v)
        adj.setdefault(v, set())
    return adj


def predecessors(nodes: Iterable[N], edges: Iterable[tuple[N, N]]) -> dict[N, set[N]]:
    return successors(nodes, ((v, u) for u, v in edges))


def reachable(adj: dict[N, set[N]], start: N, blocked: N | None = None) -> set[N]:
    """Vertices reachable from ``start`` (itself included), never entering ``blocked``."""
    seen = {start}
    queue = deque([start])
    while queue:
        u = queue.popleft()
        for v in adj.get(u, ()):
            if v not in seen and v != blocked:
                seen.add(v)
                queue.append(v)
    return seen


def closure(nodes: Iterable[N], edges: Iterable[tuple[N, N]]) -> set[tuple[N, N]]:
    """All pairs (u, v), u != v, with a directed path from u to v."""
    adj = successors(nodes, edges)
    return {(u, v) for u in adj for v in reachable(adj, u) if v != u}


def weak_components(nodes: Iterable[N], edges: Iterable[tuple[N, N]]) -> list[set[N]]:
    """Weakly connected components, each a set; ordered by their smallest member."""
    und: dict[N, set[N]] = defaultdict(set)
    for n in nodes:
        und[n]
    for u, v in edges:
        und[u].add(v)
        und[v].add(u)
    seen: set[N] = set()
    comps = []
    for n in sorted(und):
        if n in seen:
            continue
        comp = reachable(und, n)
        seen |= comp
        comps.append(comp)
    return comps


def sink_candidates(nodes: Iterable[N], edges: Iterable[tuple[N, N]]) -> set[N]:
    """Vertices reachable by a directed path from every other vertex."""
    nodes = list(nodes)
    pred = predecessors(nodes, edges)
    everyone = set(nodes)
    return {v for v in nodes if reachable(pred, v) >= everyone}


def redundant_edges(nodes: Iterable[N], edges: Iterable[tuple[N, N]]) -> list[tuple[N, N]]:
    """Edges (u, w) bypassed by some other directed path u -> ... -> w of length >= 2."""
    edges = list(edges)
    adj = successors(nodes, edges)
    out = []
    for u, w in edges:
        # A simple path of length >= 2 leaves u by another edge and never returns to u.
        if any(w in reachable(adj, v, blocked=u) for v in adj[u] if v != w):
            out.append((u, w))
    return out
