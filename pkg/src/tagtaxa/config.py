"""Pipeline configuration: a flat TOML file whose keys mirror the fields below."""

from __future__ import annotations

import hashlib
import json
import sys
from dataclasses import asdict, dataclass, field, fields
from pathlib import Path

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

from . import meronomy, synonymy
from .corpus import MIN_PLAYERS
from .priority import DEFAULT_BINS
from .taxonomy import (
    DEFAULT_MEDIUM_GENRE_OVERRIDES,
    DEFAULT_MISC_TAGS,
    DEFAULT_NON_GAME_TAGS,
    CuratedLists,
    TaxaThresholds,
)


class ConfigError(ValueError):
    pass


def _tags(default) -> list[str]:
    return field(default_factory=lambda: sorted(default))


@dataclass
class PipelineConfig:
    # taxonomy
    low_median_max: float = 0.45
    high_median_min: float = 0.574803
    high_peak_min: float = 0.765644
    min_genre_games: int = 100
    bins: int = DEFAULT_BINS
    non_game_tags: list[str] = _tags(DEFAULT_NON_GAME_TAGS)
    misc_tags: list[str] = _tags(DEFAULT_MISC_TAGS)
    medium_genre_overrides: list[str] = _tags(DEFAULT_MEDIUM_GENRE_OVERRIDES)
    # corpus
    min_players: int = MIN_PLAYERS
    # correlation and meronomy
    global_min: float = meronomy.GLOBAL_MIN
    meronomy_local_min: float = meronomy.LOCAL_MIN
    presence_mode: bool = False
    indegree_min: int = meronomy.INDEGREE_MIN
    extend_k: int = 6
    # synonymy
    synonymy_local_min: float = synonymy.LOCAL_MIN
    distortion_tags: list[str] = _tags(synonymy.DISTORTION_TAGS)
    excluded_tags: list[str] | None = None
    exact_budget: int = synonymy.EXACT_BUDGET
    cross_taxon_keep: list[list[str]] = field(
        default_factory=lambda: [list(p) for p in synonymy.CROSS_TAXON_KEEP]
    )
    # fetching
    cache_dir: str | None = None

    def thresholds(self) -> TaxaThresholds:
        return TaxaThresholds(
            self.low_median_max, self.high_median_min, self.high_peak_min, self.min_genre_games
        )

    def curated(self) -> CuratedLists:
        return CuratedLists(
            frozenset(self.non_game_tags),
            frozenset(self.misc_tags),
            frozenset(self.medium_genre_overrides),
        )

    def validate(self) -> "PipelineConfig":
        try:
            self.thresholds()
            self.curated()
        except ValueError as exc:
            raise ConfigError(str(exc)) from exc
        if self.bins < 1:
            raise ConfigError("bins must be positive")
        if self.exact_budget < 0 or self.indegree_min < 0 or self.extend_k < 0:
            raise ConfigError("exact_budget, indegree_min and extend_k must be non-negative")
        for pair in self.cross_taxon_keep:
            if len(pair) != 2:
                raise ConfigError(f"cross_taxon_keep entries must be [from, to] pairs: {pair!r}")
        return self

    def canonical(self) -> dict:
        data = asdict(self)
        for k, v in data.items():
            if isinstance(v, list) and all(isinstance(x, str) for x in v):
                data[k] = sorted(v)
        return data

    def digest(self) -> str:
        blob = json.dumps(self.canonical(), sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(blob.encode()).hexdigest()


_KNOWN = {f.name for f in fields(PipelineConfig)}


def config_from_mapping(data: dict) -> PipelineConfig:
    unknown = sorted(set(data) - _KNOWN)
    if unknown:
        raise ConfigError(f"unknown config keys: {', '.join(unknown)}")
    cfg = PipelineConfig()
    for key, value in data.items():
        default = getattr(cfg, key)
        if isinstance(default, bool) and not isinstance(value, bool):
            raise ConfigError(f"{key} must be true or false")
        if isinstance(default, float) and isinstance(value, int) and not isinstance(value, bool):
            value = float(value)
        if isinstance(default, int) and not isinstance(default, bool) and (
            not isinstance(value, int) or isinstance(value, bool)
        ):
            raise ConfigError(f"{key} must be an integer")
        if isinstance(default, float) and not isinstance(value, float):
            raise ConfigError(f"{key} must be a number")
        if (isinstance(default, list) or key == "excluded_tags") and not isinstance(value, list):
            raise ConfigError(f"{key} must be a list")
        setattr(cfg, key, value)
    return cfg.validate()


def load_config(path: str | Path | None) -> PipelineConfig:
    """Read a config file; ``None`` gives the defaults. Absent keys keep their defaults."""
    if path is None:
        return PipelineConfig()
    path = Path(path)
    try:
        data = tomllib.loads(path.read_text(encoding="utf-8"))
    except FileNotFoundError:
        raise ConfigError(f"config file not found: {path}") from None
    except tomllib.TOMLDecodeError as exc:
        raise ConfigError(f"{path}: {exc}") from exc
    return config_from_mapping(data)
