"""Plain-text exports: DOT graphs, CSV tables and JSON reports.

Every writer orders its output deterministically and prints floats with 9 decimals so
that repeated runs produce identical bytes.
"""

from __future__ import annotations

import csv
import io
import json
import math
from pathlib import Path
from typing import Iterable, Sequence

from .meronomy import CoverageRow, CoverageStep, TagGraph
from .priority import DistributionSummary, PriorityMatrix
from .synonymy import MUTUAL, SynonymGraph, SynonymGroup


def fmt(x: float) -> str:
    return "nan" if math.isnan(x) else f"{x:.9f}"


def _round_floats(obj):
    if isinstance(obj, float):
        return None if math.isnan(obj) else round(obj, 9)
    if isinstance(obj, dict):
        return {k: _round_floats(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_round_floats(v) for v in obj]
    return obj


def dumps_json(obj) -> str:
    return json.dumps(_round_floats(obj), indent=2, sort_keys=True, ensure_ascii=False) + "\n"


def write_json(obj, path: str | Path) -> Path:
    path = Path(path)
    path.write_text(dumps_json(obj), encoding="utf-8")
    return path


def _csv_text(header: Sequence[str], rows: Iterable[Sequence[object]]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    w.writerows(rows)
    return buf.getvalue()


def write_csv(header: Sequence[str], rows: Iterable[Sequence[object]], path: str | Path) -> Path:
    path = Path(path)
    path.write_text(_csv_text(header, rows), encoding="utf-8")
    return path


def write_matrix(m: PriorityMatrix, path: str | Path) -> Path:
    rows = sorted(((g, t, fmt(p)) for g, t, p in m.entries()), key=lambda r: (r[0], r[1]))
    return write_csv(("game_id", "tag", "priority"), rows, path)


def export_histogram(summary: DistributionSummary, path: str | Path) -> tuple[Path, Path]:
    """Write ``bin_left,count`` rows plus a ``.json`` sidecar with the summary numbers."""
    path = Path(path)
    rows = [(fmt(left), n) for left, n in zip(summary.bin_edges(), summary.histogram)]
    write_csv(("bin_left", "count"), rows, path)
    sidecar = write_json(
        {
            "tag": summary.tag,
            "n_games": summary.n_games,
            "bins": summary.bins,
            "median": summary.median,
            "mean": summary.mean,
            "std": summary.std,
            "peak_priority": summary.peak_priority,
        },
        path.with_suffix(".json"),
    )
    return path, sidecar


def coverage_rows(rows: Sequence[CoverageRow]) -> list[tuple]:
    return [
        (
            r.tag_set[-1] if r.tag_set else "",
            fmt(r.single_all_games),
            fmt(r.single_20tag_games),
            fmt(r.pct_all_games),
            fmt(r.pct_20tag_games),
        )
        for r in rows
    ]


COVERAGE_HEADER = ("tag", "pct_all", "pct_20tag", "cum_pct_all", "cum_pct_20tag")


def write_coverage(
    rows: Sequence[CoverageRow], path: str | Path, extension: Sequence[CoverageStep] = ()
) -> Path:
    body = coverage_rows(rows)
    body += [("+" + s.tag, "", "", fmt(s.pct_all_games), fmt(s.pct_20tag_games)) for s in extension]
    return write_csv(COVERAGE_HEADER, body, path)


def _q(s: str) -> str:
    return '"' + s.replace("\\", "\\\\").replace('"', '\\"') + '"'


def tag_graph_dot(g: TagGraph, name: str = "meronomy") -> str:
    lines = [f"digraph {_q(name)} {{"]
    for tag in sorted(g.nodes):
        lines.append(f"  {_q(tag)} [occ={g.nodes[tag]}];")
    for key in g.pairs():
        e = g.edges[key]
        style = " [style=dashed]" if e.tie else ""
        lines.append(f"  {_q(e.src)} -> {_q(e.dst)}{style};")
    lines.append("}")
    return "\n".join(lines) + "\n"


def synonym_graph_dot(g: SynonymGraph, name: str = "synonyms") -> str:
    lines = [f"digraph {_q(name)} {{"]
    for tag in sorted(g.nodes):
        lines.append(f"  {_q(tag)} [occ={g.nodes[tag]}];")
    for e in sorted(g.edges, key=lambda e: e.arc):
        src, dst = e.arc
        attrs = []
        if e.kind == MUTUAL:
            attrs.append("dir=both")
        if e.cross_taxon:
            attrs.append("style=dashed")
            attrs.append("color=red")
        suffix = f" [{', '.join(attrs)}]" if attrs else ""
        lines.append(f"  {_q(src)} -> {_q(dst)}{suffix};")
    lines.append("}")
    return "\n".join(lines) + "\n"


def groups_json(groups: Sequence[SynonymGroup]) -> list[dict]:
    return [grp.as_dict() for grp in groups]
