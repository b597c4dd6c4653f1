"""Tag-assignment snapshots: loading, cleaning and summary counts.

A game record maps each tag to the number of players who assigned it. Tags are
plain strings compared byte-for-byte (Steam tags are case and hyphen sensitive).
"""

from __future__ import annotations

import csv
import json
import logging
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Mapping

log = logging.getLogger(__name__)

TagId = str

MAX_TAGS = 20
MIN_PLAYERS = 5
VR_ONLY = "VR Only"

RULE_VR_ONLY = "vr-only"
RULE_MIN_PLAYERS = "min-players"
RULE_CAP = "cap"
RULE_EMPTY = "empty-game"


class CorpusError(ValueError):
    """Raised when a snapshot cannot be parsed or violates a corpus invariant."""


@dataclass(frozen=True)
class GameRecord:
    game_id: str
    title: str
    tag_counts: Mapping[TagId, int]

    def ranked_tags(self) -> list[tuple[TagId, int]]:
        """Tags by decreasing count, ties broken by tag name."""
        return sorted(self.tag_counts.items(), key=lambda kv: (-kv[1], kv[0]))

    @property
    def max_count(self) -> int:
        return max(self.tag_counts.values(), default=0)


@dataclass(frozen=True)
class Corpus:
    games: tuple[GameRecord, ...]
    tags: tuple[TagId, ...]

    def __post_init__(self) -> None:
        seen: set[str] = set()
        for g in self.games:
            if g.game_id in seen:
                raise CorpusError(f"duplicate game_id {g.game_id!r}")
            seen.add(g.game_id)
        registry = set(self.tags)
        for g in self.games:
            missing = set(g.tag_counts) - registry
            if missing:
                raise CorpusError(f"game {g.game_id!r} uses unregistered tags {sorted(missing)}")

    @classmethod
    def from_games(cls, games: Iterable[GameRecord]) -> "Corpus":
        games = tuple(games)
        tags = sorted({t for g in games for t in g.tag_counts})
        return cls(games=games, tags=tuple(tags))

    @classmethod
    def from_dict(cls, data: Mapping[str, Mapping[str, int]]) -> "Corpus":
        """Build a corpus from ``{game_id: {tag: count}}``; titles equal ids."""
        return cls.from_games(
            GameRecord(str(gid), str(gid), dict(counts)) for gid, counts in data.items()
        )

    def __len__(self) -> int:
        return len(self.games)


@dataclass(frozen=True)
class Removal:
    game_id: str
    tag: TagId | None
    count: int | None
    rule: str

    def as_dict(self) -> dict:
        return {"game_id": self.game_id, "tag": self.tag, "count": self.count, "rule": self.rule}


@dataclass
class CleanReport:
    removals: list[Removal] = field(default_factory=list)

    def by_rule(self) -> dict[str, int]:
        out = {RULE_VR_ONLY: 0, RULE_MIN_PLAYERS: 0, RULE_CAP: 0, RULE_EMPTY: 0}
        for r in self.removals:
            out[r.rule] += 1
        return out

    def as_dict(self) -> dict:
        return {"summary": self.by_rule(), "removals": [r.as_dict() for r in self.removals]}


@dataclass(frozen=True)
class CorpusStats:
    n_games: int
    n_tags: int
    n_games_with_20_tags: int
    n_games_min100_taggers: int

    def as_dict(self) -> dict:
        return {
            "n_games": self.n_games,
            "n_tags": self.n_tags,
            "n_games_with_20_tags": self.n_games_with_20_tags,
            "n_games_min100_taggers": self.n_games_min100_taggers,
        }


# -- loading -----------------------------------------------------------------


def _check_count(game_id: str, tag: object, count: object) -> int:
    if not isinstance(tag, str) or not tag:
        raise CorpusError(f"game {game_id!r}: invalid tag name {tag!r}")
    if isinstance(count, bool) or not isinstance(count, int):
        if isinstance(count, float) and count.is_integer():
            count = int(count)
        elif isinstance(count, str) and count.strip().lstrip("-").isdigit():
            count = int(count)
        else:
            raise CorpusError(f"game {game_id!r}: non-integer count {count!r} for tag {tag!r}")
    if count < 0:
        raise CorpusError(f"game {game_id!r}: negative count {count} for tag {tag!r}")
    return count


def _record_from_json(obj: object, where: str) -> GameRecord:
    if not isinstance(obj, dict):
        raise CorpusError(f"{where}: expected an object, got {type(obj).__name__}")
    if "appid" not in obj:
        raise CorpusError(f"{where}: missing 'appid'")
    game_id = str(obj["appid"])
    tags = obj.get("tags", {})
    # SteamSpy serialises an empty tag map as [].
    if tags == []:
        tags = {}
    if not isinstance(tags, dict):
        raise CorpusError(f"game {game_id!r}: 'tags' must be an object")
    counts = {tag: _check_count(game_id, tag, c) for tag, c in tags.items()}
    return GameRecord(game_id, str(obj.get("name", "")), counts)


def _parse_json_text(text: str, source: str) -> list[GameRecord]:
    if not text.strip():
        return []
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise CorpusError(f"{source}: malformed JSON ({exc})") from exc
    if isinstance(data, dict):
        # SteamSpy page shape: {appid: {...}}; a single bare record is also accepted.
        items = [data] if "appid" in data and "tags" in data else list(data.values())
    elif isinstance(data, list):
        items = data
    else:
        raise CorpusError(f"{source}: expected a list or an object of game records")
    return [_record_from_json(obj, f"{source}[{i}]") for i, obj in enumerate(items)]


def _parse_csv(path: Path) -> list[GameRecord]:
    titles: dict[str, str] = {}
    counts: dict[str, dict[str, int]] = {}
    with path.open(newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None:
            return []
        if [h.strip() for h in header] != ["game_id", "title", "tag", "count"]:
            raise CorpusError(f"{path}: header must be game_id,title,tag,count")
        for lineno, row in enumerate(reader, start=2):
            if not row:
                continue
            if len(row) != 4:
                raise CorpusError(f"{path}:{lineno}: expected 4 fields, got {len(row)}")
            gid, title, tag, raw = row
            try:
                count = int(raw)
            except ValueError as exc:
                raise CorpusError(f"{path}:{lineno}: game {gid!r}: bad count {raw!r}") from exc
            count = _check_count(gid, tag, count)
            game = counts.setdefault(gid, {})
            if tag in game:
                raise CorpusError(f"{path}:{lineno}: game {gid!r}: tag {tag!r} repeated")
            game[tag] = count
            titles.setdefault(gid, title)
    return [GameRecord(gid, titles[gid], c) for gid, c in counts.items()]


def snapshot_files(path: Path) -> list[Path]:
    """Files making up a snapshot: the path itself, or a directory's page files in order."""
    path = Path(path)
    if path.is_dir():
        return sorted(p for p in path.iterdir() if p.suffix == ".json" and p.is_file())
    return [path]


def load_corpus(path: str | Path, format: str | None = None) -> Corpus:
    """Load an uncleaned corpus from a snapshot-json file, a directory of pages, or a CSV file.

    ``format`` is ``"snapshot-json"`` or ``"csv"``; when omitted it is inferred from the
    file extension.
    """
    path = Path(path)
    if not path.exists():
        raise FileNotFoundError(path)
    if format is None:
        format = "csv" if path.suffix.lower() == ".csv" else "snapshot-json"
    if format == "csv":
        games = _parse_csv(path)
    elif format == "snapshot-json":
        games = []
        for f in snapshot_files(path):
            games.extend(_parse_json_text(f.read_text(encoding="utf-8"), str(f)))
    else:
        raise ValueError(f"unknown corpus format {format!r}")
    return Corpus.from_games(games)


def dump_snapshot(c: Corpus, path: str | Path) -> None:
    """Write ``c`` as snapshot-json, games and tags in a stable order."""
    records = [
        {"appid": _maybe_int(g.game_id), "name": g.title, "tags": dict(g.ranked_tags())}
        for g in c.games
    ]
    Path(path).write_text(json.dumps(records, indent=1, ensure_ascii=False) + "\n", encoding="utf-8")


def _maybe_int(game_id: str) -> int | str:
    return int(game_id) if game_id.isdigit() else game_id


# -- cleaning ----------------------------------------------------------------


def clean_corpus(
    c: Corpus, min_players: int = MIN_PLAYERS, max_tags: int = MAX_TAGS
) -> tuple[Corpus, CleanReport]:
    """Apply the snapshot cleaning rules and report every removal.

    Rules, in order: drop a ``VR Only`` tag of count 1 sitting in 21st position; drop
    counts below ``min_players`` (counts of 0 are always dropped); keep the ``max_tags``
    highest counts; drop games left without tags. Pass ``min_players=1`` to keep
    small synthetic counts.
    """
    floor = max(min_players, 1)
    report = CleanReport()
    games = []
    for g in c.games:
        ranked = g.ranked_tags()
        # The injected tag always has the lowest count; equal-count neighbours still count it 21st.
        if (
            len(ranked) == max_tags + 1
            and g.tag_counts.get(VR_ONLY) == 1
            and min(n for t, n in ranked if t != VR_ONLY) >= 1
        ):
            report.removals.append(Removal(g.game_id, VR_ONLY, 1, RULE_VR_ONLY))
            ranked = [(t, n) for t, n in ranked if t != VR_ONLY]
        kept = []
        for tag, count in ranked:
            if count < floor:
                report.removals.append(Removal(g.game_id, tag, count, RULE_MIN_PLAYERS))
            else:
                kept.append((tag, count))
        for tag, count in kept[max_tags:]:
            report.removals.append(Removal(g.game_id, tag, count, RULE_CAP))
        kept = kept[:max_tags]
        if not kept:
            report.removals.append(Removal(g.game_id, None, None, RULE_EMPTY))
            continue
        games.append(GameRecord(g.game_id, g.title, dict(kept)))
    if report.removals:
        log.info("cleaning removed %s", report.by_rule())
    return Corpus.from_games(games), report


def corpus_stats(c: Corpus) -> CorpusStats:
    return CorpusStats(
        n_games=len(c.games),
        n_tags=len({t for g in c.games for t in g.tag_counts}),
        n_games_with_20_tags=sum(1 for g in c.games if len(g.tag_counts) == MAX_TAGS),
        n_games_min100_taggers=sum(1 for g in c.games if g.max_count >= 100),
    )
