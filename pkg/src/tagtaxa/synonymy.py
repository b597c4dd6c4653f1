"""Synonym groups from a co-occurrence graph.

Each correlated pair becomes a directed edge toward the tag that more often appears
alone, or a mutual edge when the two mostly appear together. After mutual edges are
contracted, every weakly connected component is split, by deleting as few edges as
possible, into *well-oriented* parts: parts with exactly one vertex that every other
vertex reaches. That vertex names the group.
"""

from __future__ import annotations

import itertools
import logging
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Mapping, Sequence

import numpy as np

from . import graphs
from .corpus import TagId
from .meronomy import CorrelatedPair
from .priority import PriorityMatrix
from .taxonomy import TaxonAssignment

log = logging.getLogger(__name__)

LOCAL_MIN = -0.6
EXACT_BUDGET = 20
DISTORTION_TAGS = frozenset(
    {"2D", "Shooter", "Puzzle", "Atmospheric", "Simulation", "Story Rich", "Fantasy"}
)
CROSS_TAXON_KEEP = (("Trading Card Game", "Card Game"),)

A_TO_B = "a_to_b"
B_TO_A = "b_to_a"
MUTUAL = "mutual"

Arc = tuple[TagId, TagId]


class BudgetExceeded(ValueError):
    """The exact solver was given more edges than its enumeration budget."""


@dataclass(frozen=True)
class PairCounts:
    x_a: int
    x_b: int
    x_inter: int

    @property
    def x_union(self) -> int:
        return self.x_a + self.x_b + self.x_inter

    def ratios(self) -> tuple[float, float, float]:
        """(r_A, r_B, r_AB): shares of the union holding only A, only B, and both."""
        u = self.x_union
        if u < 1:
            raise ValueError("pair never occurs")
        return self.x_a / u, self.x_b / u, self.x_inter / u


def classify_edge(pc: PairCounts, a: TagId | None = None, b: TagId | None = None) -> str:
    """Edge kind for a pair from its co-occurrence counts.

    The arrow points toward the tag that more often appears without the other; if
    co-occurrence dominates the edge is mutual. A tie that includes co-occurrence is
    mutual; an only-A/only-B tie points toward the lexicographically smaller name
    (toward B when names are not given).
    """
    pc.ratios()  # rejects an empty union
    # The three ratios share a denominator, so comparing integer counts is exact.
    if pc.x_inter >= pc.x_a and pc.x_inter >= pc.x_b:
        return MUTUAL
    if pc.x_a > pc.x_b:
        return B_TO_A
    if pc.x_b > pc.x_a:
        return A_TO_B
    if a is not None and b is not None and a < b:
        return B_TO_A
    return A_TO_B


@dataclass(frozen=True)
class SynEdge:
    a: TagId
    b: TagId
    kind: str
    cross_taxon: bool = False
    origin: tuple[Arc, ...] = ()

    @property
    def arc(self) -> Arc:
        """(src, dst) for directed kinds; (a, b) for mutual edges."""
        return (self.b, self.a) if self.kind == B_TO_A else (self.a, self.b)


@dataclass
class SynonymGraph:
    nodes: dict[TagId, int] = field(default_factory=dict)
    edges: list[SynEdge] = field(default_factory=list)
    aliases: dict[TagId, tuple[TagId, ...]] = field(default_factory=dict)

    def arcs(self) -> list[Arc]:
        return sorted({e.arc for e in self.edges if e.kind != MUTUAL})

    def members_of(self, label: TagId) -> tuple[TagId, ...]:
        return self.aliases.get(label, (label,))


@dataclass(frozen=True)
class SynonymGroup:
    members: tuple[TagId, ...]
    representative: TagId
    deleted_edges: tuple[Arc, ...] = ()
    exact: bool = True
    edges: tuple[Arc, ...] = ()
    redundant_edges: tuple[Arc, ...] = ()

    def as_dict(self) -> dict:
        return {
            "members": list(self.members),
            "representative": self.representative,
            "deleted_edges": [list(e) for e in self.deleted_edges],
            "exact": self.exact,
        }


# -- graph construction --------------------------------------------------------


def pair_counts(m: PriorityMatrix, a: TagId, b: TagId) -> PairCounts:
    csc = m.values.tocsc()
    ga = csc[:, m.tag_index(a)].indices
    gb = csc[:, m.tag_index(b)].indices
    inter = np.intersect1d(ga, gb).size
    return PairCounts(ga.size - inter, gb.size - inter, inter)


def default_excluded(capitals: Iterable[TagId]) -> frozenset[TagId]:
    return frozenset(capitals) | DISTORTION_TAGS


def build_synonym_graph(
    m: PriorityMatrix,
    pairs: Sequence[CorrelatedPair],
    local_min: float = LOCAL_MIN,
    excluded: Iterable[TagId] = DISTORTION_TAGS,
    ta: TaxonAssignment | None = None,
) -> SynonymGraph:
    excluded = frozenset(excluded)
    occ = m.occurrences()
    csc = m.values.tocsc()
    rows = {}

    def games(tag: TagId) -> np.ndarray:
        if tag not in rows:
            rows[tag] = csc[:, m.tag_index(tag)].indices
        return rows[tag]

    g = SynonymGraph()
    for p in pairs:
        if math.isnan(p.local_r):
            raise ValueError(f"pair ({p.a}, {p.b}) has no local coefficient")
        if not p.local_r > local_min or p.a in excluded or p.b in excluded:
            continue
        a, b = sorted((p.a, p.b))
        inter = np.intersect1d(games(a), games(b)).size
        pc = PairCounts(games(a).size - inter, games(b).size - inter, inter)
        kind = classify_edge(pc, a, b)
        cross = ta is not None and ta.taxon.get(a) != ta.taxon.get(b)
        arc = (b, a) if kind == B_TO_A else (a, b)
        g.nodes[a] = occ[a]
        g.nodes[b] = occ[b]
        g.edges.append(SynEdge(a, b, kind, cross, (arc,)))
    g.edges.sort(key=lambda e: (e.a, e.b))
    return g


def drop_cross_taxon(g: SynonymGraph, keep: Iterable[Arc] = CROSS_TAXON_KEEP) -> SynonymGraph:
    """Remove cross-taxon edges except those whose endpoints form a kept pair."""
    keep_pairs = {frozenset(k) for k in keep}
    edges = [e for e in g.edges if not e.cross_taxon or frozenset((e.a, e.b)) in keep_pairs]
    return SynonymGraph(nodes=dict(g.nodes), edges=edges, aliases=dict(g.aliases))


def merge_mutual(g: SynonymGraph) -> SynonymGraph:
    """Contract every mutual edge.

    A merged vertex is labelled by its member with the most occurrences (ties: smaller
    name), which makes the result independent of contraction order. Parallel edges are
    deduplicated; their original edges are kept in ``origin``.
    """
    parent = {t: t for t in g.nodes}

    def find(t: TagId) -> TagId:
        while parent[t] != t:
            parent[t] = parent[parent[t]]
            t = parent[t]
        return t

    for e in g.edges:
        if e.kind == MUTUAL:
            ra, rb = find(e.a), find(e.b)
            if ra != rb:
                parent[ra] = rb

    classes: dict[TagId, list[TagId]] = {}
    for t in g.nodes:
        classes.setdefault(find(t), []).append(t)
    label_of: dict[TagId, TagId] = {}
    aliases: dict[TagId, tuple[TagId, ...]] = {}
    nodes: dict[TagId, int] = {}
    for members in classes.values():
        expanded = sorted({x for t in members for x in g.members_of(t)})
        label = min(members, key=lambda t: (-g.nodes[t], t))
        for t in members:
            label_of[t] = label
        nodes[label] = g.nodes[label]
        if len(expanded) > 1:
            aliases[label] = tuple(expanded)

    merged: dict[Arc, tuple[bool, set[Arc]]] = {}
    for e in g.edges:
        if e.kind == MUTUAL:
            continue
        src, dst = (label_of[x] for x in e.arc)
        if src == dst:
            log.info("dropping edge %s -> %s: both ends merged into %s", *e.arc, src)
            continue
        cross, origin = merged.get((src, dst), (False, set()))
        merged[(src, dst)] = (cross or e.cross_taxon, origin | set(e.origin or (e.arc,)))
    edges = [
        SynEdge(src, dst, A_TO_B, cross, tuple(sorted(origin)))
        for (src, dst), (cross, origin) in sorted(merged.items())
    ]
    return SynonymGraph(nodes=dict(sorted(nodes.items())), edges=edges, aliases=aliases)


# -- well-orientedness ---------------------------------------------------------


def is_well_oriented(nodes: Iterable[TagId], edges: Iterable[Arc]) -> tuple[bool, set[TagId]]:
    """Whether exactly one vertex is reached from all others, and the reached set."""
    sinks = graphs.sink_candidates(nodes, edges)
    return len(sinks) == 1, sinks


def _all_well_oriented(nodes: Sequence[TagId], edges: Sequence[Arc]) -> bool:
    for comp in graphs.weak_components(nodes, edges):
        sub = [(u, v) for u, v in edges if u in comp]
        if len(graphs.sink_candidates(comp, sub)) != 1:
            return False
    return True


def _groups_from_residual(
    nodes: Sequence[TagId], kept: Sequence[Arc], deleted: Sequence[Arc], exact: bool
) -> list[SynonymGroup]:
    out = []
    for comp in graphs.weak_components(nodes, kept):
        sub = sorted((u, v) for u, v in kept if u in comp)
        ok, sinks = is_well_oriented(comp, sub)
        if not ok:
            raise AssertionError(f"residual component {sorted(comp)} is not well-oriented")
        out.append(SynonymGroup(
            members=tuple(sorted(comp)),
            representative=next(iter(sinks)),
            deleted_edges=tuple(sorted(e for e in deleted if e[0] in comp)),
            exact=exact,
            edges=tuple(sub),
        ))
    return out


def min_deletion_exact(
    nodes: Iterable[TagId], edges: Iterable[Arc], max_edges: int = EXACT_BUDGET
) -> list[SynonymGroup]:
    """Smallest edge deletion leaving every weak component well-oriented.

    Deletion sets are tried by increasing size, each size in lexicographic order of the
    sorted edge list, so the answer is deterministic. Deleting every edge is always
    feasible, so a solution exists. Each deleted edge is reported with the group of
    its source vertex.
    """
    nodes = sorted(set(nodes))
    edges = sorted(set(edges))
    if len(edges) > max_edges:
        raise BudgetExceeded(
            f"{len(edges)} edges exceed the exact budget of {max_edges}; use min_deletion_greedy"
        )
    for k in range(len(edges) + 1):
        for drop in itertools.combinations(range(len(edges)), k):
            gone = set(drop)
            kept = [e for i, e in enumerate(edges) if i not in gone]
            if _all_well_oriented(nodes, kept):
                return _groups_from_residual(nodes, kept, [edges[i] for i in drop], exact=True)
    raise AssertionError("unreachable: deleting every edge is feasible")


def min_deletion_greedy(
    nodes: Iterable[TagId], edges: Iterable[Arc], occurrence: Mapping[TagId, int] | None = None
) -> list[SynonymGroup]:
    """Heuristic split into well-oriented groups; never cheaper than the exact optimum.

    Inside a component that is not yet well-oriented, every vertex ``v`` is a possible
    group root: its ancestors would form the group, at the price of ``v``'s outgoing
    edges plus every edge leaving the ancestor set. The root with the fewest deleted
    edges per grouped vertex wins (then the larger group, the more frequent tag, the
    smaller name). The rest of the component is handled the same way.
    """
    occurrence = occurrence or {}
    nodes = sorted(set(nodes))
    edges = sorted(set(edges))
    kept = set(edges)
    deleted: list[Arc] = []
    work = graphs.weak_components(nodes, edges)
    while work:
        comp = work.pop()
        sub = [e for e in kept if e[0] in comp]
        if len(graphs.sink_candidates(comp, sub)) == 1:
            continue
        pred = graphs.predecessors(comp, sub)
        best = None
        for v in sorted(comp):
            anc = graphs.reachable(pred, v)
            cut = {(u, w) for u, w in sub if (u == v) or (u in anc and w not in anc)}
            key = (Fraction(len(cut), len(anc)), -len(anc), -occurrence.get(v, 0), v)
            if best is None or key < best[0]:
                best = (key, anc, cut)
        _, anc, cut = best
        kept -= cut
        deleted.extend(sorted(cut))
        rest = comp - anc
        rest_edges = [e for e in kept if e[0] in rest]
        work.extend(graphs.weak_components(rest, rest_edges))
    return _groups_from_residual(nodes, sorted(kept), deleted, exact=False)


# -- pipeline ------------------------------------------------------------------


def synonym_groups(
    g: SynonymGraph,
    exact_budget: int = EXACT_BUDGET,
    keep_cross: Iterable[Arc] = CROSS_TAXON_KEEP,
) -> list[SynonymGroup]:
    """Drop cross-taxon edges, merge mutual edges, and split each component.

    Components within ``exact_budget`` edges are solved exactly, larger ones greedily.
    Groups list original tags (merged aliases expanded) and original deleted edges; the
    ``edges`` field holds the group's edges in merged labels after removing edges that
    longer paths already imply.
    """
    merged = merge_mutual(drop_cross_taxon(g, keep_cross))
    origin = {e.arc: e.origin for e in merged.edges}
    arcs = merged.arcs()
    out: list[SynonymGroup] = []
    for comp in graphs.weak_components(merged.nodes, arcs):
        sub = [e for e in arcs if e[0] in comp]
        if len(sub) <= exact_budget:
            parts = min_deletion_exact(comp, sub, max_edges=exact_budget)
        else:
            parts = min_deletion_greedy(comp, sub, merged.nodes)
        for grp in parts:
            redundant = graphs.redundant_edges(grp.members, grp.edges)
            out.append(SynonymGroup(
                members=tuple(sorted(x for t in grp.members for x in merged.members_of(t))),
                representative=grp.representative,
                deleted_edges=tuple(sorted(o for e in grp.deleted_edges for o in origin.get(e, (e,)))),
                exact=grp.exact,
                edges=tuple(e for e in grp.edges if e not in set(redundant)),
                redundant_edges=tuple(redundant),
            ))
    out.sort(key=lambda grp: grp.members[0])
    return out
