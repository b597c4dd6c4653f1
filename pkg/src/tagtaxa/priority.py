"""Per-game tag priorities and their distributions.

The priority of tag T for game G is the number of players who assigned T to G divided
by the count of G's most assigned tag. Absent tags have priority 0.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np
import scipy.sparse as sp

from .corpus import Corpus, TagId

DEFAULT_BINS = 100


@dataclass(frozen=True)
class PriorityMatrix:
    """Sparse game x tag matrix of priorities, with the raw counts kept alongside.

    Rows follow ``games`` (corpus order), columns follow ``tags`` (sorted).
    """

    games: tuple[str, ...]
    tags: tuple[TagId, ...]
    counts: sp.csr_matrix
    values: sp.csr_matrix
    max_counts: np.ndarray

    def __post_init__(self) -> None:
        object.__setattr__(self, "_tag_index", {t: j for j, t in enumerate(self.tags)})
        object.__setattr__(self, "_game_index", {g: i for i, g in enumerate(self.games)})

    @property
    def shape(self) -> tuple[int, int]:
        return self.values.shape

    def tag_index(self, tag: TagId) -> int:
        try:
            return self._tag_index[tag]
        except KeyError:
            raise KeyError(f"tag {tag!r} not in matrix") from None

    def __contains__(self, tag: object) -> bool:
        return tag in self._tag_index

    def get(self, game_id: str, tag: TagId) -> float:
        i = self._game_index[game_id]
        j = self._tag_index.get(tag)
        return 0.0 if j is None else float(self.values[i, j])

    def row(self, game_id: str) -> dict[TagId, float]:
        i = self._game_index[game_id]
        start, end = self.values.indptr[i], self.values.indptr[i + 1]
        return {
            self.tags[j]: float(v)
            for j, v in zip(self.values.indices[start:end], self.values.data[start:end])
        }

    def entries(self) -> Iterable[tuple[str, TagId, float]]:
        """Every stored (game_id, tag, priority), games in row order and tags sorted."""
        for i, gid in enumerate(self.games):
            start, end = self.values.indptr[i], self.values.indptr[i + 1]
            for j, v in zip(self.values.indices[start:end], self.values.data[start:end]):
                yield gid, self.tags[j], float(v)

    def occurrences(self) -> dict[TagId, int]:
        """Number of games where each tag has positive priority."""
        per_tag = np.diff(self.values.tocsc().indptr)
        return {t: int(n) for t, n in zip(self.tags, per_tag)}

    def column(self, tag: TagId) -> np.ndarray:
        """Dense priority vector of one tag over all games."""
        return self.values[:, self.tag_index(tag)].toarray().ravel()

    def tag_counts(self, tag: TagId) -> tuple[np.ndarray, np.ndarray]:
        """(assigner counts, per-game max counts) for games where ``tag`` is assigned."""
        col = self.counts.tocsc()[:, self.tag_index(tag)]
        rows = col.indices
        return col.data.astype(np.int64), self.max_counts[rows]


def priority_matrix(c: Corpus) -> PriorityMatrix:
    tags = tuple(sorted({t for g in c.games for t in g.tag_counts}))
    index = {t: j for j, t in enumerate(tags)}
    rows, cols, counts = [], [], []
    max_counts = np.zeros(len(c.games), dtype=np.int64)
    for i, g in enumerate(c.games):
        max_counts[i] = g.max_count
        for tag, n in g.tag_counts.items():
            if n > 0:
                rows.append(i)
                cols.append(index[tag])
                counts.append(n)
    shape = (len(c.games), len(tags))
    count_m = sp.csr_matrix(
        (np.asarray(counts, dtype=np.int64), (np.asarray(rows, dtype=np.int64), np.asarray(cols, dtype=np.int64))),
        shape=shape,
    )
    count_m.sort_indices()
    values = count_m.astype(np.float64)
    row_of_entry = np.repeat(np.arange(shape[0]), np.diff(values.indptr))
    values.data = count_m.data / max_counts[row_of_entry]
    return PriorityMatrix(
        games=tuple(g.game_id for g in c.games),
        tags=tags,
        counts=count_m,
        values=values,
        max_counts=max_counts,
    )


def positive_priority_stats(m: PriorityMatrix) -> tuple[float, float, float]:
    """Mean, median and population standard deviation of all positive priorities."""
    data = m.values.data
    if data.size == 0:
        raise ValueError("priority matrix has no positive entries")
    return float(np.mean(data)), float(np.median(data)), float(np.std(data))


# -- per-tag distributions -----------------------------------------------------


@dataclass(frozen=True)
class DistributionSummary:
    tag: TagId
    n_games: int
    median: float
    mean: float
    std: float
    histogram: tuple[int, ...]
    peak_priority: float

    @property
    def bins(self) -> int:
        return len(self.histogram)

    def bin_edges(self) -> list[float]:
        return [k / self.bins for k in range(self.bins)]


def bin_indices(counts: np.ndarray, max_counts: np.ndarray, bins: int) -> np.ndarray:
    """Histogram bin of each priority ``counts / max_counts`` over [0, 1].

    Bins are ``[k/bins, (k+1)/bins)``, the last one closed. Integer arithmetic keeps
    priorities that sit exactly on an edge (0.5, 0.75, ...) in the upper bin.
    """
    idx = (counts.astype(np.int64) * bins) // max_counts.astype(np.int64)
    return np.minimum(idx, bins - 1)


def tag_distribution(m: PriorityMatrix, tag: TagId, bins: int = DEFAULT_BINS) -> DistributionSummary:
    if bins < 1:
        raise ValueError("bins must be positive")
    if tag not in m:
        raise KeyError(f"tag {tag!r} does not occur in the matrix")
    counts, maxes = m.tag_counts(tag)
    if counts.size == 0:
        raise KeyError(f"tag {tag!r} has no positive priority")
    samples = counts / maxes
    hist = np.bincount(bin_indices(counts, maxes, bins), minlength=bins)
    top = hist.max()
    peak_bin = int(np.flatnonzero(hist == top)[-1])
    return DistributionSummary(
        tag=tag,
        n_games=int(samples.size),
        median=float(np.median(samples)),
        mean=float(np.mean(samples)),
        std=float(np.std(samples)),
        histogram=tuple(int(h) for h in hist),
        peak_priority=peak_bin / bins,
    )


def all_distributions(
    m: PriorityMatrix, bins: int = DEFAULT_BINS, jobs: int = 1
) -> dict[TagId, DistributionSummary]:
    """Distribution summaries for every tag, keyed in sorted tag order."""
    occ = m.occurrences()
    tags = [t for t in m.tags if occ[t] > 0]
    if jobs > 1:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(lambda t: tag_distribution(m, t, bins), tags))
    else:
        results = [tag_distribution(m, t, bins) for t in tags]
    return dict(zip(tags, results))


# -- pair ratios ---------------------------------------------------------------


@dataclass(frozen=True)
class RatioReport:
    tag_a: TagId
    tag_b: TagId
    n_games: int
    ratios: tuple[float, ...]
    mean: float
    median: float

    def as_dict(self) -> dict:
        return {
            "tag_a": self.tag_a,
            "tag_b": self.tag_b,
            "n_games": self.n_games,
            "mean": self.mean,
            "median": self.median,
            "ratios": list(self.ratios),
        }


def pair_ratio_analysis(m: PriorityMatrix, a: TagId, b: TagId) -> RatioReport:
    """Ratios priority(b)/priority(a) over games where both are assigned and a outranks b."""
    if a == b:
        raise ValueError("pair_ratio_analysis needs two distinct tags")
    ratios: Sequence[float] = ()
    if a in m and b in m:
        ca = m.counts[:, m.tag_index(a)].toarray().ravel()
        cb = m.counts[:, m.tag_index(b)].toarray().ravel()
        keep = (cb > 0) & (ca > cb)
        ratios = tuple(float(x) for x in cb[keep] / ca[keep])
    if not ratios:
        return RatioReport(a, b, 0, (), math.nan, math.nan)
    return RatioReport(a, b, len(ratios), tuple(ratios), float(np.mean(ratios)), float(np.median(ratios)))
