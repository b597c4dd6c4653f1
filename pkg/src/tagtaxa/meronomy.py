"""Correlation-gated orientation graph, capital tags, coverage and Hasse repair.

Two tags are linked when their priority vectors are correlated both over all games
(global Pearson) and over the games carrying at least one of them (local Pearson).
Each link points from the tag that occurs in fewer games to the one occurring in more.
"""

from __future__ import annotations

import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
from typing import Iterable, Sequence

import numpy as np

from . import graphs
from .corpus import MAX_TAGS, Corpus, TagId
from .priority import PriorityMatrix

log = logging.getLogger(__name__)

GLOBAL_MIN = 0.1
LOCAL_MIN = -0.7
INDEGREE_MIN = 9


@dataclass(frozen=True)
class CorrelatedPair:
    a: TagId
    b: TagId
    global_r: float
    local_r: float = math.nan


@dataclass(frozen=True)
class Edge:
    src: TagId
    dst: TagId
    kind: str = "plain"
    tie: bool = False


@dataclass
class TagGraph:
    nodes: dict[TagId, int] = field(default_factory=dict)
    edges: dict[tuple[TagId, TagId], Edge] = field(default_factory=dict)

    def add_edge(self, edge: Edge) -> None:
        if edge.src == edge.dst:
            raise ValueError(f"self-loop on {edge.src!r}")
        if (edge.dst, edge.src) in self.edges:
            raise ValueError(f"edge {edge.src!r}-{edge.dst!r} already present reversed")
        self.edges[(edge.src, edge.dst)] = edge

    def pairs(self) -> list[tuple[TagId, TagId]]:
        return sorted(self.edges)

    def in_degree(self) -> dict[TagId, int]:
        deg = dict.fromkeys(self.nodes, 0)
        for _, v in self.edges:
            deg[v] += 1
        return deg

    def out_degree(self) -> dict[TagId, int]:
        deg = dict.fromkeys(self.nodes, 0)
        for u, _ in self.edges:
            deg[u] += 1
        return deg

    def in_neighbors(self, tag: TagId) -> list[TagId]:
        return sorted(u for u, v in self.edges if v == tag)

    def induced(self, keep: Iterable[TagId]) -> "TagGraph":
        keep = set(keep)
        return TagGraph(
            nodes={t: n for t, n in self.nodes.items() if t in keep},
            edges={k: e for k, e in self.edges.items() if k[0] in keep and k[1] in keep},
        )


# -- correlation ---------------------------------------------------------------


def _design(m: PriorityMatrix, presence: bool):
    x = m.values
    if presence:
        x = x.copy()
        x.data = np.ones_like(x.data)
    return x


def correlation_matrix(m: PriorityMatrix, presence: bool = False) -> np.ndarray:
    """Dense tag x tag Pearson matrix over all games (absent entries count as 0).

    Zero-variance columns give NaN rows/columns.
    """
    n = m.shape[0]
    if n < 2:
        raise ValueError("Pearson correlation needs at least 2 games")
    x = _design(m, presence)
    gram = (x.T @ x).toarray()
    mean = np.asarray(x.sum(axis=0)).ravel() / n
    cov = gram / n - np.outer(mean, mean)
    var = np.diag(cov).copy()
    var[var < 1e-15] = 0.0
    with np.errstate(divide="ignore", invalid="ignore"):
        std = np.sqrt(var)
        r = cov / np.outer(std, std)
    r[:, var == 0] = np.nan
    r[var == 0, :] = np.nan
    return np.clip(r, -1.0, 1.0)


def pearson_all_pairs(
    m: PriorityMatrix, global_min: float = GLOBAL_MIN, presence: bool = False
) -> list[CorrelatedPair]:
    """Pairs (a < b) whose global Pearson coefficient exceeds ``global_min``."""
    r = correlation_matrix(m, presence)
    dead = [t for j, t in enumerate(m.tags) if math.isnan(r[j, j])]
    if dead:
        log.warning("skipping %d zero-variance tags: %s", len(dead), ", ".join(dead))
    ii, jj = np.nonzero(np.triu(np.nan_to_num(r, nan=-np.inf) > global_min, k=1))
    return [CorrelatedPair(m.tags[i], m.tags[j], float(r[i, j])) for i, j in zip(ii, jj)]


def pearson(x: np.ndarray, y: np.ndarray) -> float:
    """Pearson coefficient of two equal-length vectors; NaN when either is constant."""
    dx = x - x.mean()
    dy = y - y.mean()
    sxx = float(dx @ dx)
    syy = float(dy @ dy)
    if sxx <= 1e-15 or syy <= 1e-15:
        return math.nan
    return max(-1.0, min(1.0, float(dx @ dy) / math.sqrt(sxx * syy)))


def local_pearson(m: PriorityMatrix, a: TagId, b: TagId, presence: bool = False) -> float:
    """Pearson coefficient restricted to games carrying ``a`` or ``b``.

    Returns NaN (and logs a warning) when a restricted vector is constant.
    """
    x = _design(m, presence).tocsc()
    ca = x[:, m.tag_index(a)]
    cb = x[:, m.tag_index(b)]
    rows = np.union1d(ca.indices, cb.indices)
    va = ca[rows].toarray().ravel()
    vb = cb[rows].toarray().ravel()
    r = pearson(va, vb) if rows.size else math.nan
    if math.isnan(r):
        log.warning("local Pearson undefined for (%s, %s): constant on %d games", a, b, rows.size)
    return r


def with_local(
    m: PriorityMatrix, pairs: Sequence[CorrelatedPair], presence: bool = False, jobs: int = 1
) -> list[CorrelatedPair]:
    """Attach local coefficients; pairs where it is undefined are dropped."""
    x = _design(m, presence).tocsc()
    cols = {}

    def column(tag: TagId):
        if tag not in cols:
            cols[tag] = x[:, m.tag_index(tag)]
        return cols[tag]

    for p in pairs:
        column(p.a), column(p.b)

    def one(p: CorrelatedPair) -> float:
        ca, cb = cols[p.a], cols[p.b]
        rows = np.union1d(ca.indices, cb.indices)
        return pearson(ca[rows].toarray().ravel(), cb[rows].toarray().ravel())

    if jobs > 1:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            values = list(pool.map(one, pairs))
    else:
        values = [one(p) for p in pairs]
    out = []
    for p, r in zip(pairs, values):
        if math.isnan(r):
            log.warning("dropping (%s, %s): local Pearson undefined", p.a, p.b)
            continue
        out.append(replace(p, local_r=r))
    return out


# -- orientation graph ---------------------------------------------------------


def orient_pairs(
    pairs: Iterable[CorrelatedPair], local_min: float, m: PriorityMatrix
) -> TagGraph:
    """Keep pairs with local_r > local_min and point each toward the more frequent tag.

    Equal occurrence counts point toward the lexicographically smaller tag and are
    flagged ``tie``.
    """
    occ = m.occurrences()
    g = TagGraph()
    for p in pairs:
        if math.isnan(p.local_r):
            raise ValueError(f"pair ({p.a}, {p.b}) has no local coefficient")
        if not p.local_r > local_min:
            continue
        oa, ob = occ[p.a], occ[p.b]
        if oa < ob:
            edge = Edge(p.a, p.b)
        elif ob < oa:
            edge = Edge(p.b, p.a)
        else:
            lo, hi = sorted((p.a, p.b))
            edge = Edge(hi, lo, tie=True)
        g.nodes[p.a] = oa
        g.nodes[p.b] = ob
        g.add_edge(edge)
    return g


def capital_tags(g: TagGraph, indegree_min: int = INDEGREE_MIN) -> tuple[TagGraph, frozenset[TagId]]:
    """Subgraph induced by high in-degree tags, and its tags without outgoing edges."""
    indeg = g.in_degree()
    sub = g.induced(t for t, d in indeg.items() if d >= indegree_min)
    outdeg = sub.out_degree()
    return sub, frozenset(t for t, d in outdeg.items() if d == 0)


def transitive_reduce(g: TagGraph) -> tuple[TagGraph, list[tuple[TagId, TagId]]]:
    """Drop every edge that a longer directed path already implies.

    Returns the reduced graph and the removed edges. All decisions are taken on the
    input graph.
    """
    removed = graphs.redundant_edges(g.nodes, g.pairs())
    gone = set(removed)
    reduced = TagGraph(
        nodes=dict(g.nodes), edges={k: e for k, e in g.edges.items() if k not in gone}
    )
    return reduced, removed


# -- coverage ------------------------------------------------------------------


@dataclass(frozen=True)
class CoverageRow:
    tag_set: tuple[TagId, ...]
    pct_all_games: float
    pct_20tag_games: float
    single_all_games: float = 0.0
    single_20tag_games: float = 0.0


def _pct(num: int, den: int) -> float:
    return 100.0 * num / den if den else 0.0


class _CoverageIndex:
    def __init__(self, c: Corpus):
        self.n_all = len(c.games)
        self.full = frozenset(i for i, g in enumerate(c.games) if len(g.tag_counts) == MAX_TAGS)
        self.games_of: dict[TagId, frozenset[int]] = {}
        tmp: dict[TagId, set[int]] = {}
        for i, g in enumerate(c.games):
            for t, n in g.tag_counts.items():
                if n > 0:
                    tmp.setdefault(t, set()).add(i)
        self.games_of = {t: frozenset(s) for t, s in tmp.items()}

    def of(self, tag: TagId) -> frozenset[int]:
        return self.games_of.get(tag, frozenset())

    def row(self, tags: tuple[TagId, ...], covered: frozenset[int], last: TagId | None) -> CoverageRow:
        single = self.of(last) if last is not None else frozenset()
        return CoverageRow(
            tag_set=tags,
            pct_all_games=_pct(len(covered), self.n_all),
            pct_20tag_games=_pct(len(covered & self.full), len(self.full)),
            single_all_games=_pct(len(single), self.n_all),
            single_20tag_games=_pct(len(single & self.full), len(self.full)),
        )


def coverage(c: Corpus, tags: Sequence[TagId]) -> list[CoverageRow]:
    """Cumulative coverage of each prefix of ``tags``, over all games and 20-tag games.

    A game is covered when at least one tag of the set is assigned to it.
    """
    idx = _CoverageIndex(c)
    if not tags:
        return [idx.row((), frozenset(), None)]
    rows = []
    covered: frozenset[int] = frozenset()
    for i, t in enumerate(tags):
        covered = covered | idx.of(t)
        rows.append(idx.row(tuple(tags[: i + 1]), covered, t))
    return rows


def sort_by_coverage(c: Corpus, tags: Iterable[TagId]) -> list[TagId]:
    """Tags by decreasing number of games carrying them, then by name."""
    idx = _CoverageIndex(c)
    return sorted(tags, key=lambda t: (-len(idx.of(t)), t))


@dataclass(frozen=True)
class CoverageStep:
    tag: TagId
    new_games: int
    pct_all_games: float
    pct_20tag_games: float


def greedy_cover_extension(c: Corpus, base: Iterable[TagId], k: int) -> list[CoverageStep]:
    """Append up to ``k`` tags to ``base``, each covering the most still-uncovered games."""
    if k < 0:
        raise ValueError("k must be non-negative")
    idx = _CoverageIndex(c)
    chosen = set(base)
    covered = frozenset().union(*(idx.of(t) for t in chosen)) if chosen else frozenset()
    candidates = sorted(set(idx.games_of) - chosen)
    steps = []
    for _ in range(k):
        if not candidates:
            break
        best, gain = candidates[0], -1
        for t in candidates:  # sorted, so ties keep the smaller name
            g = len(idx.of(t) - covered)
            if g > gain:
                best, gain = t, g
        covered = covered | idx.of(best)
        candidates.remove(best)
        steps.append(CoverageStep(
            best, gain, _pct(len(covered), idx.n_all), _pct(len(covered & idx.full), len(idx.full))
        ))
    return steps
