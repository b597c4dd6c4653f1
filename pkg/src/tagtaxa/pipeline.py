"""End-to-end analysis run: corpus -> priorities -> taxa -> meronomy -> synonyms."""

from __future__ import annotations

import hashlib
import logging
from dataclasses import dataclass, field
from datetime import datetime, timezone
from pathlib import Path
from typing import Callable

from . import __version__
from . import export
from .config import PipelineConfig
from .corpus import Corpus, clean_corpus, corpus_stats, load_corpus, snapshot_files
from .meronomy import (
    TagGraph,
    capital_tags,
    coverage,
    greedy_cover_extension,
    orient_pairs,
    pearson_all_pairs,
    sort_by_coverage,
    transitive_reduce,
    with_local,
)
from .priority import PriorityMatrix, positive_priority_stats, priority_matrix
from .synonymy import build_synonym_graph, synonym_groups
from .taxonomy import (
    TaxonAssignment,
    bin_sensitive_tags,
    classify_taxa,
    genre_list,
    subdivide_high,
)

log = logging.getLogger(__name__)

STAGES = ("corpus", "priority", "taxonomy", "meronomy", "synonymy", "report")
OUTPUTS = (
    "matrix.csv",
    "taxa.csv",
    "genres.txt",
    "graph.dot",
    "capital.json",
    "coverage.csv",
    "groups.json",
    "synonyms.dot",
    "stats.json",
)


class StageError(RuntimeError):
    def __init__(self, stage: str, cause: BaseException, manifest: "RunManifest | None" = None):
        super().__init__(f"stage {stage!r} failed: {cause}")
        self.stage = stage
        self.cause = cause
        self.manifest = manifest


def sha256_file(path: Path) -> str:
    return hashlib.sha256(Path(path).read_bytes()).hexdigest()


def input_digest(path: str | Path) -> str:
    h = hashlib.sha256()
    for f in snapshot_files(Path(path)):
        h.update(f.name.encode())
        h.update(b"\0")
        h.update(f.read_bytes())
    return h.hexdigest()


def _now() -> str:
    return datetime.now(timezone.utc).isoformat(timespec="seconds")


@dataclass
class RunManifest:
    input_digest: str
    config_digest: str
    tool_version: str = __version__
    stages: dict[str, list[str]] = field(default_factory=dict)
    outputs: dict[str, str] = field(default_factory=dict)
    started_at: str = field(default_factory=_now)
    finished_at: str | None = None
    failed_stage: str | None = None

    def as_dict(self) -> dict:
        return {
            "input_digest": self.input_digest,
            "config_digest": self.config_digest,
            "tool_version": self.tool_version,
            "stages": self.stages,
            "outputs": self.outputs,
            "started_at": self.started_at,
            "finished_at": self.finished_at,
            "failed_stage": self.failed_stage,
        }


# -- stage helpers shared with the CLI -----------------------------------------


def load_clean(path: str | Path, cfg: PipelineConfig):
    raw = load_corpus(path)
    return clean_corpus(raw, min_players=cfg.min_players)


def taxonomy_of(m: PriorityMatrix, c: Corpus, cfg: PipelineConfig, jobs: int = 1) -> TaxonAssignment:
    ta = classify_taxa(m, cfg.thresholds(), cfg.bins, jobs=jobs)
    return subdivide_high(ta, c, cfg.curated(), cfg.thresholds())


def taxa_rows(ta: TaxonAssignment, sort: str = "tag") -> list[tuple]:
    tags = sorted(ta.taxon)
    if sort == "median":
        tags.sort(key=lambda t: (ta.summaries[t].median, t))
    rows = []
    for t in tags:
        s = ta.summaries[t]
        sub = ta.high_subtaxon.get(t)
        rows.append((t, ta.taxon[t].value, sub.value if sub else "", export.fmt(s.median),
                     export.fmt(s.peak_priority), s.n_games))
    return rows


TAXA_HEADER = ("tag", "taxon", "subtaxon", "median", "peak", "n_games")


def correlated_pairs(m: PriorityMatrix, cfg: PipelineConfig, jobs: int = 1):
    pairs = pearson_all_pairs(m, cfg.global_min, presence=cfg.presence_mode)
    return with_local(m, pairs, presence=cfg.presence_mode, jobs=jobs)


def capital_report(g: TagGraph, indegree_min: int) -> tuple[dict, frozenset[str]]:
    sub, capitals = capital_tags(g, indegree_min)
    indeg = g.in_degree()
    _, hasse_removed = transitive_reduce(sub)
    report = {
        "indegree_min": indegree_min,
        "capital_tags": sorted(capitals),
        "nodes": {t: {"in_degree": indeg[t], "occ": sub.nodes[t]} for t in sorted(sub.nodes)},
        "edges": [list(e) for e in sub.pairs()],
        "in_neighbors": {t: g.in_neighbors(t) for t in sorted(capitals)},
        "hasse_removed": [list(e) for e in hasse_removed],
    }
    return report, capitals


def excluded_tags(cfg: PipelineConfig, capitals) -> frozenset[str]:
    if cfg.excluded_tags is not None:
        return frozenset(cfg.excluded_tags)
    return frozenset(capitals) | frozenset(cfg.distortion_tags)


# -- analyze -------------------------------------------------------------------


def analyze(
    input_path: str | Path,
    cfg: PipelineConfig,
    outdir: str | Path,
    jobs: int = 1,
) -> RunManifest:
    """Run every stage and write the artifacts plus ``manifest.json`` into ``outdir``.

    A failing stage raises :class:`StageError` after a partial manifest is written.
    """
    input_path = Path(input_path)
    if not input_path.exists():
        raise FileNotFoundError(f"input not found: {input_path}")
    outdir = Path(outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    manifest = RunManifest(input_digest(input_path), cfg.digest())
    state: dict = {}

    def run(stage: str, fn: Callable[[], list[str]]) -> None:
        log.info("stage %s", stage)
        try:
            written = fn()
        except Exception as exc:
            manifest.failed_stage = stage
            manifest.finished_at = _now()
            export.write_json(manifest.as_dict(), outdir / "manifest.json")
            raise StageError(stage, exc, manifest) from exc
        manifest.stages[stage] = written
        for name in written:
            manifest.outputs[name] = sha256_file(outdir / name)

    def corpus_stage():
        c, report = load_clean(input_path, cfg)
        if not c.games:
            raise ValueError("no games left after cleaning")
        state.update(corpus=c, clean=report)
        return []

    def priority_stage():
        m = priority_matrix(state["corpus"])
        state["matrix"] = m
        export.write_matrix(m, outdir / "matrix.csv")
        return ["matrix.csv"]

    def taxonomy_stage():
        ta = taxonomy_of(state["matrix"], state["corpus"], cfg, jobs)
        state["taxa"] = ta
        export.write_csv(TAXA_HEADER, taxa_rows(ta), outdir / "taxa.csv")
        genres = genre_list(ta, cfg.curated())
        (outdir / "genres.txt").write_text("".join(t + "\n" for t in genres), encoding="utf-8")
        state["genres"] = genres
        return ["taxa.csv", "genres.txt"]

    def meronomy_stage():
        m, c = state["matrix"], state["corpus"]
        pairs = correlated_pairs(m, cfg, jobs)
        state["pairs"] = pairs
        g = orient_pairs(pairs, cfg.meronomy_local_min, m)
        state["graph"] = g
        (outdir / "graph.dot").write_text(export.tag_graph_dot(g), encoding="utf-8")
        report, capitals = capital_report(g, cfg.indegree_min)
        state["capitals"] = capitals
        export.write_json(report, outdir / "capital.json")
        ordered = sort_by_coverage(c, capitals)
        rows = coverage(c, ordered)
        ext = greedy_cover_extension(c, capitals, cfg.extend_k)
        state["coverage"] = (rows, ext)
        export.write_coverage(rows, outdir / "coverage.csv", ext)
        return ["graph.dot", "capital.json", "coverage.csv"]

    def synonymy_stage():
        excluded = excluded_tags(cfg, state["capitals"])
        sg = build_synonym_graph(
            state["matrix"], state["pairs"], cfg.synonymy_local_min, excluded, state["taxa"]
        )
        groups = synonym_groups(sg, cfg.exact_budget, [tuple(p) for p in cfg.cross_taxon_keep])
        state["synonym_graph"] = sg
        state["groups"] = groups
        export.write_json(export.groups_json(groups), outdir / "groups.json")
        (outdir / "synonyms.dot").write_text(export.synonym_graph_dot(sg), encoding="utf-8")
        return ["groups.json", "synonyms.dot"]

    def report_stage():
        m, ta = state["matrix"], state["taxa"]
        mean, median, std = positive_priority_stats(m)
        rows, ext = state["coverage"]
        stats = {
            "corpus": corpus_stats(state["corpus"]).as_dict(),
            "cleaning": state["clean"].by_rule(),
            "positive_priority": {"mean": mean, "median": median, "std": std},
            "taxon_sizes": ta.sizes(),
            "n_genres": len(state["genres"]),
            "bin_sensitive_tags": bin_sensitive_tags(m, cfg.thresholds()),
            "pairs": {
                "global": len(state["pairs"]),
                "meronomy": sum(p.local_r > cfg.meronomy_local_min for p in state["pairs"]),
                "synonymy": sum(p.local_r > cfg.synonymy_local_min for p in state["pairs"]),
            },
            "meronomy_edges": len(state["graph"].edges),
            "tie_edges": sum(e.tie for e in state["graph"].edges.values()),
            "capital_tags": sorted(state["capitals"]),
            "capital_coverage": {
                "all": rows[-1].pct_all_games,
                "twenty_tag": rows[-1].pct_20tag_games,
            },
            "extended_coverage": {
                "tags": [s.tag for s in ext],
                "all": ext[-1].pct_all_games if ext else rows[-1].pct_all_games,
                "twenty_tag": ext[-1].pct_20tag_games if ext else rows[-1].pct_20tag_games,
            },
            "synonym_groups": len(state["groups"]),
        }
        export.write_json(stats, outdir / "stats.json")
        return ["stats.json"]

    for stage, fn in zip(STAGES, (corpus_stage, priority_stage, taxonomy_stage,
                                  meronomy_stage, synonymy_stage, report_stage)):
        run(stage, fn)
    manifest.finished_at = _now()
    export.write_json(manifest.as_dict(), outdir / "manifest.json")
    return manifest
