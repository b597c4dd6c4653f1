"""``tagtaxa`` command-line interface.

Exit codes: 0 success, 1 unexpected error, 2 usage error, 3 input/corpus error,
4 config error, 5 fetch error, 6 priority stage, 7 taxonomy stage, 8 meronomy stage,
9 synonymy stage, 10 report/output stage.
"""

from __future__ import annotations

import argparse
import logging
import sys
from dataclasses import replace
from pathlib import Path

from . import __version__, export
from .config import ConfigError, PipelineConfig, load_config
from .corpus import CorpusError, dump_snapshot
from .fetch import DEFAULT_ENDPOINT, FetchError, default_cache_dir, fetch_snapshot, parse_page_range
from .meronomy import coverage, greedy_cover_extension, orient_pairs, sort_by_coverage
from .pipeline import (
    TAXA_HEADER,
    StageError,
    analyze,
    capital_report,
    correlated_pairs,
    excluded_tags,
    load_clean,
    taxa_rows,
    taxonomy_of,
)
from .priority import pair_ratio_analysis, priority_matrix, tag_distribution
from .synonymy import build_synonym_graph, synonym_groups
from .taxonomy import genre_list

log = logging.getLogger("tagtaxa")

EXIT_UNEXPECTED = 1
EXIT_INPUT = 3
EXIT_CONFIG = 4
EXIT_FETCH = 5
STAGE_EXIT = {
    "corpus": 3,
    "priority": 6,
    "taxonomy": 7,
    "meronomy": 8,
    "synonymy": 9,
    "report": 10,
}


def _read_tag_file(path: str) -> list[str]:
    lines = Path(path).read_text(encoding="utf-8").splitlines()
    return [ln.strip() for ln in lines if ln.strip() and not ln.lstrip().startswith("#")]


def _write_lines(lines, path: str) -> None:
    Path(path).write_text("".join(x + "\n" for x in lines), encoding="utf-8")


def _override(cfg: PipelineConfig, **values) -> PipelineConfig:
    given = {k: v for k, v in values.items() if v is not None}
    return replace(cfg, **given).validate() if given else cfg


# -- subcommands ---------------------------------------------------------------


def cmd_fetch(args, cfg):
    cache = args.cache or cfg.cache_dir or default_cache_dir()
    result = fetch_snapshot(
        parse_page_range(args.pages), cache, args.endpoint, delay=args.delay, retries=args.retries
    )
    log.info("%d pages requested, %d served from cache", len(set(result.requested)), len(result.cached))
    for p in result.paths:
        print(p)


def cmd_clean(args, cfg):
    from .corpus import clean_corpus, load_corpus

    c, report = clean_corpus(load_corpus(args.input), min_players=cfg.min_players)
    dump_snapshot(c, args.output)
    if args.report:
        export.write_json(report.as_dict(), args.report)
    log.info("kept %d games; removals %s", len(c.games), report.by_rule())


def cmd_priority(args, cfg):
    c, _ = load_clean(args.input, cfg)
    export.write_matrix(priority_matrix(c), args.out)


def cmd_ratios(args, cfg):
    c, _ = load_clean(args.input, cfg)
    report = pair_ratio_analysis(priority_matrix(c), args.a, args.b)
    export.write_json(
        {"n_games": report.n_games, "mean": report.mean, "median": report.median,
         "ratios": list(report.ratios)},
        args.out,
    )


def cmd_dist(args, cfg):
    c, _ = load_clean(args.input, cfg)
    summary = tag_distribution(priority_matrix(c), args.tag, args.bins or cfg.bins)
    export.export_histogram(summary, args.out)


def cmd_taxa(args, cfg):
    c, _ = load_clean(args.input, cfg)
    ta = taxonomy_of(priority_matrix(c), c, cfg, args.jobs)
    export.write_csv(TAXA_HEADER, taxa_rows(ta, args.sort), args.out)


def cmd_genres(args, cfg):
    c, _ = load_clean(args.input, cfg)
    ta = taxonomy_of(priority_matrix(c), c, cfg, args.jobs)
    _write_lines(genre_list(ta, cfg.curated()), args.out)


def _meronomy_graph(args, cfg):
    cfg = _override(cfg, global_min=args.global_min, meronomy_local_min=args.local_min)
    if args.presence:
        cfg = replace(cfg, presence_mode=True)
    c, _ = load_clean(args.input, cfg)
    m = priority_matrix(c)
    return c, m, orient_pairs(correlated_pairs(m, cfg, args.jobs), cfg.meronomy_local_min, m)


def cmd_meronomy(args, cfg):
    _, _, g = _meronomy_graph(args, cfg)
    Path(args.out).write_text(export.tag_graph_dot(g), encoding="utf-8")


def cmd_capital(args, cfg):
    _, _, g = _meronomy_graph(args, cfg)
    report, _ = capital_report(g, args.indegree_min if args.indegree_min is not None else cfg.indegree_min)
    export.write_json(report, args.out)


def cmd_coverage(args, cfg):
    c, _ = load_clean(args.input, cfg)
    tags = _read_tag_file(args.tags)
    if args.sort == "coverage":
        tags = sort_by_coverage(c, tags)
    ext = greedy_cover_extension(c, tags, args.extend) if args.extend else []
    export.write_coverage(coverage(c, tags), args.out, ext)


def cmd_synonyms(args, cfg):
    cfg = _override(cfg, synonymy_local_min=args.local_min, exact_budget=args.exact_budget)
    if args.exclude:
        cfg = replace(cfg, excluded_tags=_read_tag_file(args.exclude))
    c, _ = load_clean(args.input, cfg)
    m = priority_matrix(c)
    ta = taxonomy_of(m, c, cfg, args.jobs)
    pairs = correlated_pairs(m, cfg, args.jobs)
    capitals = ()
    if cfg.excluded_tags is None:
        g = orient_pairs(pairs, cfg.meronomy_local_min, m)
        _, capitals = capital_report(g, cfg.indegree_min)
    sg = build_synonym_graph(m, pairs, cfg.synonymy_local_min, excluded_tags(cfg, capitals), ta)
    groups = synonym_groups(sg, cfg.exact_budget, [tuple(p) for p in cfg.cross_taxon_keep])
    export.write_json(export.groups_json(groups), args.out)
    if args.dot:
        Path(args.dot).write_text(export.synonym_graph_dot(sg), encoding="utf-8")


def cmd_analyze(args, cfg):
    manifest = analyze(args.input, cfg, args.out, jobs=args.jobs)
    log.info("wrote %d artifacts to %s", len(manifest.outputs), args.out)


# -- parser --------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", default=argparse.SUPPRESS, help="TOML config file")
    common.add_argument("--jobs", type=int, default=argparse.SUPPRESS, help="worker threads")
    common.add_argument("--quiet", action="store_true", default=argparse.SUPPRESS)

    p = argparse.ArgumentParser(prog="tagtaxa", parents=[common], description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=f"tagtaxa {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    def add(name, func, help):
        sp = sub.add_parser(name, parents=[common], help=help)
        sp.set_defaults(func=func)
        return sp

    sp = add("fetch", cmd_fetch, "download snapshot pages into the cache")
    sp.add_argument("--pages", required=True, help="inclusive page range A..B")
    sp.add_argument("--cache", help="cache directory (default: $TAGTAXA_CACHE)")
    sp.add_argument("--endpoint", default=DEFAULT_ENDPOINT, help="URL template with {page}")
    sp.add_argument("--delay", type=float, default=1.0, help="seconds between requests")
    sp.add_argument("--retries", type=int, default=3)

    sp = add("clean", cmd_clean, "apply the cleaning rules and write a snapshot")
    sp.add_argument("input")
    sp.add_argument("output")
    sp.add_argument("--report", help="JSON file listing every removal")

    sp = add("priority", cmd_priority, "write the game x tag priority matrix")
    sp.add_argument("input")
    sp.add_argument("--out", required=True)

    sp = add("dist", cmd_dist, "priority histogram of one tag")
    sp.add_argument("input")
    sp.add_argument("--tag", required=True)
    sp.add_argument("--bins", type=int)
    sp.add_argument("--out", required=True)

    sp = add("ratios", cmd_ratios, "priority ratios of a tag pair")
    sp.add_argument("input")
    sp.add_argument("--a", required=True)
    sp.add_argument("--b", required=True)
    sp.add_argument("--out", required=True)

    for name, func, help in (("taxa", cmd_taxa, "classify tags into priority taxa"),
                             ("genres", cmd_genres, "list genre tags")):
        sp = add(name, func, help)
        sp.add_argument("input")
        sp.add_argument("--out", required=True)
        if name == "taxa":
            sp.add_argument("--sort", choices=("tag", "median"), default="tag")

    for name, func, help in (("meronomy", cmd_meronomy, "write the orientation graph as DOT"),
                             ("capital", cmd_capital, "capital tags of the orientation graph")):
        sp = add(name, func, help)
        sp.add_argument("input")
        sp.add_argument("--global-min", type=float)
        sp.add_argument("--local-min", type=float)
        sp.add_argument("--presence", action="store_true", help="correlate 0/1 presence")
        sp.add_argument("--out", required=True)
        if name == "capital":
            sp.add_argument("--indegree-min", type=int)

    sp = add("coverage", cmd_coverage, "cumulative coverage of a tag list")
    sp.add_argument("input")
    sp.add_argument("--tags", required=True, help="file with one tag per line")
    sp.add_argument("--extend", type=int, default=0, help="greedily add K tags")
    sp.add_argument("--sort", choices=("given", "coverage"), default="given")
    sp.add_argument("--out", required=True)

    sp = add("synonyms", cmd_synonyms, "synonym groups and their representatives")
    sp.add_argument("input")
    sp.add_argument("--local-min", type=float)
    sp.add_argument("--exclude", help="file with tags to leave out (default: capitals + distortion tags)")
    sp.add_argument("--exact-budget", type=int)
    sp.add_argument("--out", required=True)
    sp.add_argument("--dot")

    sp = add("analyze", cmd_analyze, "run the whole pipeline")
    sp.add_argument("input")
    sp.add_argument("--out", required=True, help="output directory")
    return p


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    args.config = getattr(args, "config", None)
    args.jobs = getattr(args, "jobs", 1)
    quiet = getattr(args, "quiet", False)
    logging.basicConfig(
        level=logging.WARNING if quiet else logging.INFO,
        format="%(levelname)s %(name)s: %(message)s",
    )
    try:
        cfg = load_config(args.config)
        args.func(args, cfg)
    except ConfigError as exc:
        log.error("config: %s", exc)
        return EXIT_CONFIG
    except FetchError as exc:
        log.error("fetch: %s", exc)
        return EXIT_FETCH
    except StageError as exc:
        log.error("%s", exc)
        return STAGE_EXIT.get(exc.stage, EXIT_UNEXPECTED)
    except (CorpusError, FileNotFoundError) as exc:
        log.error("input: %s", exc)
        return EXIT_INPUT
    except KeyError as exc:
        log.error("%s", exc.args[0] if exc.args else exc)
        return EXIT_INPUT
    except Exception as exc:  # noqa: BLE001
        log.exception("unexpected error: %s", exc)
        return EXIT_UNEXPECTED
    return 0


if __name__ == "__main__":
    sys.exit(main())
