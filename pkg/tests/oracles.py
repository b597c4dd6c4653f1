"""Independent reference implementations the package is checked against.

These favour obviousness over speed: plain loops, dense lists, exhaustive search.
"""

from __future__ import annotations

import itertools
import math
import random


def brute_priorities(data: dict[str, dict[str, int]]) -> dict[tuple[str, str], float]:
    out = {}
    for gid, counts in data.items():
        top = max(counts.values())
        for tag, n in counts.items():
            out[(gid, tag)] = n / top
    return out


def direct_pearson(x: list[float], y: list[float]) -> float:
    n = len(x)
    mx, my = sum(x) / n, sum(y) / n
    cov = sum((a - mx) * (b - my) for a, b in zip(x, y))
    vx = sum((a - mx) ** 2 for a in x)
    vy = sum((b - my) ** 2 for b in y)
    return cov / math.sqrt(vx * vy)


def dense(data: dict[str, dict[str, int]]) -> tuple[list[str], dict[str, list[float]]]:
    tags = sorted({t for g in data.values() for t in g})
    cols = {t: [] for t in tags}
    for g in data.values():
        top = max(g.values())
        for t in tags:
            cols[t].append(g.get(t, 0) / top)
    return tags, cols


def random_matrix(rnd: random.Random, n_games: int, n_tags: int) -> dict[str, dict[str, int]]:
    tags = [f"t{i}" for i in range(n_tags)]
    data = {}
    for g in range(n_games):
        chosen = rnd.sample(tags, rnd.randint(1, n_tags))
        data[f"g{g}"] = {t: rnd.randint(1, 50) for t in chosen}
    return data


def reach_matrix(nodes, edges) -> set[tuple[str, str]]:
    """Floyd-Warshall style closure."""
    idx = {v: i for i, v in enumerate(nodes)}
    n = len(nodes)
    r = [[False] * n for _ in range(n)]
    for u, v in edges:
        r[idx[u]][idx[v]] = True
    for k in range(n):
        for i in range(n):
            if r[i][k]:
                for j in range(n):
                    if r[k][j]:
                        r[i][j] = True
    return {(nodes[i], nodes[j]) for i in range(n) for j in range(n) if r[i][j] and i != j}


def brute_coverage(data: dict[str, dict[str, int]], tags: list[str]) -> list[tuple[float, float]]:
    full = [g for g in data.values() if len(g) == 20]
    out = []
    for i in range(len(tags)):
        prefix = set(tags[: i + 1])
        hit_all = sum(1 for g in data.values() if prefix & set(g))
        hit_full = sum(1 for g in full if prefix & set(g))
        out.append((100 * hit_all / len(data), 100 * hit_full / len(full) if full else 0.0))
    return out


def random_cover_corpus(rnd: random.Random, n: int) -> dict[str, dict[str, int]]:
    pool = [f"t{i:02d}" for i in range(25)]
    data = {}
    for g in range(n):
        k = 20 if rnd.random() < 0.3 else rnd.randint(1, 19)
        data[f"g{g}"] = {t: rnd.randint(5, 50) for t in rnd.sample(pool, k)}
    return data


def reach(nodes, edges) -> dict:
    r = {u: {u} for u in nodes}
    changed = True
    while changed:
        changed = False
        for u, v in edges:
            for w in nodes:
                if u in r[w] and v not in r[w]:
                    r[w].add(v)
                    changed = True
    return r  # r[w] = vertices reachable from w


def oracle_components(nodes, edges) -> list[set]:
    parent = {v: v for v in nodes}

    def find(v):
        while parent[v] != v:
            v = parent[v]
        return v

    for u, v in edges:
        parent[find(u)] = find(v)
    comps: dict = {}
    for v in nodes:
        comps.setdefault(find(v), set()).add(v)
    return list(comps.values())


def oracle_feasible(nodes, edges) -> bool:
    for comp in oracle_components(nodes, edges):
        sub = [(u, v) for u, v in edges if u in comp]
        r = reach(sorted(comp), sub)
        sinks = [v for v in comp if all(v in r[u] for u in comp)]
        if len(sinks) != 1:
            return False
    return True


def brute_min_cost(nodes, edges) -> int:
    for k in range(len(edges) + 1):
        for drop in itertools.combinations(edges, k):
            if oracle_feasible(nodes, [e for e in edges if e not in drop]):
                return k
    raise AssertionError


def residual(groups) -> list:
    return [e for g in groups for e in g.edges]


def deleted(groups) -> list:
    return sorted(e for g in groups for e in g.deleted_edges)
