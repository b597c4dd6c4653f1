"""High / Medium / Low priority taxa and the sub-taxa of High priority tags."""

from __future__ import annotations

import enum
import logging
from importlib import resources
from dataclasses import dataclass, field

from .corpus import Corpus, TagId
from .priority import DEFAULT_BINS, DistributionSummary, PriorityMatrix, all_distributions

log = logging.getLogger(__name__)


class Taxon(str, enum.Enum):
    LOW = "Low"
    MEDIUM = "Medium"
    HIGH = "High"


class SubTaxon(str, enum.Enum):
    GENRE = "Genre"
    TOO_FEW_GAMES = "TooFewGames"
    NON_GAME = "NonGame"
    MISC = "Misc"


DEFAULT_NON_GAME_TAGS = frozenset({
    "Utilities", "Audio Production", "Video Production", "Animation & Modeling",
    "Design & Illustration", "Photo Editing", "Software Training", "Web Publishing",
    "Game Development", "Programming",
})

DEFAULT_MISC_TAGS = frozenset({
    "Free to Play", "Indie", "Early Access", "Massively Multiplayer", "e-sports",
    "Sexual Content", "Nudity", "LGBTQ+", "Dinosaurs", "Mechs", "Cats", "Experimental",
    "Noir", "Lovecraftian", "Western",
})

DEFAULT_MEDIUM_GENRE_OVERRIDES = frozenset({
    "FPS", "Shooter", "Fighting", "Stealth", "Hack and Slash", "Survival",
    "Survival Horror", "Horror", "MOBA", "4X", "RTS", "Grand Strategy",
    "Trading Card Game", "Match 3", "Hidden Object", "MMORPG",
})


@dataclass(frozen=True)
class TaxaThresholds:
    low_median_max: float = 0.45
    high_median_min: float = 0.574803
    high_peak_min: float = 0.765644
    min_genre_games: int = 100

    def __post_init__(self) -> None:
        if not 0 < self.low_median_max < self.high_median_min < 1:
            raise ValueError("need 0 < low_median_max < high_median_min < 1")
        if not 0 < self.high_peak_min < 1:
            raise ValueError("need 0 < high_peak_min < 1")
        if self.min_genre_games < 1:
            raise ValueError("min_genre_games must be at least 1")


@dataclass(frozen=True)
class CuratedLists:
    non_game_tags: frozenset[TagId] = DEFAULT_NON_GAME_TAGS
    misc_tags: frozenset[TagId] = DEFAULT_MISC_TAGS
    medium_genre_overrides: frozenset[TagId] = DEFAULT_MEDIUM_GENRE_OVERRIDES

    def __post_init__(self) -> None:
        for name in ("non_game_tags", "misc_tags", "medium_genre_overrides"):
            object.__setattr__(self, name, frozenset(getattr(self, name)))
        overlap = (
            (self.non_game_tags & self.misc_tags)
            | (self.non_game_tags & self.medium_genre_overrides)
            | (self.misc_tags & self.medium_genre_overrides)
        )
        if overlap:
            raise ValueError(f"curated lists overlap on {sorted(overlap)}")


@dataclass
class TaxonAssignment:
    taxon: dict[TagId, Taxon]
    high_subtaxon: dict[TagId, SubTaxon] = field(default_factory=dict)
    summaries: dict[TagId, DistributionSummary] = field(default_factory=dict)

    def members(self, taxon: Taxon) -> list[TagId]:
        return sorted(t for t, x in self.taxon.items() if x is taxon)

    def sizes(self) -> dict[str, int]:
        return {x.value: len(self.members(x)) for x in Taxon}


def classify_summary(s: DistributionSummary, th: TaxaThresholds) -> Taxon:
    if s.median <= th.low_median_max:
        return Taxon.LOW
    if s.median >= th.high_median_min and s.peak_priority >= th.high_peak_min:
        return Taxon.HIGH
    return Taxon.MEDIUM


def classify_taxa(
    m: PriorityMatrix,
    th: TaxaThresholds = TaxaThresholds(),
    bins: int = DEFAULT_BINS,
    jobs: int = 1,
) -> TaxonAssignment:
    summaries = all_distributions(m, bins, jobs=jobs)
    return TaxonAssignment(
        taxon={t: classify_summary(s, th) for t, s in summaries.items()},
        summaries=summaries,
    )


def subdivide_high(
    ta: TaxonAssignment,
    c: Corpus,
    cl: CuratedLists = CuratedLists(),
    th: TaxaThresholds = TaxaThresholds(),
) -> TaxonAssignment:
    """Fill ``high_subtaxon``; precedence is NonGame, TooFewGames, Misc, then Genre."""
    present = set(ta.taxon)
    for name in ("non_game_tags", "misc_tags", "medium_genre_overrides"):
        absent = sorted(getattr(cl, name) - present)
        if absent:
            log.warning("%s: tags not in corpus: %s", name, ", ".join(absent))

    occurrence: dict[TagId, int] = {}
    for g in c.games:
        for t, n in g.tag_counts.items():
            if n > 0:
                occurrence[t] = occurrence.get(t, 0) + 1

    sub: dict[TagId, SubTaxon] = {}
    for tag in ta.members(Taxon.HIGH):
        if tag in cl.non_game_tags:
            sub[tag] = SubTaxon.NON_GAME
        elif occurrence.get(tag, 0) < th.min_genre_games:
            sub[tag] = SubTaxon.TOO_FEW_GAMES
        elif tag in cl.misc_tags:
            sub[tag] = SubTaxon.MISC
        else:
            sub[tag] = SubTaxon.GENRE
    return TaxonAssignment(taxon=dict(ta.taxon), high_subtaxon=sub, summaries=ta.summaries)


def genre_list(ta: TaxonAssignment, cl: CuratedLists = CuratedLists()) -> list[TagId]:
    """High priority genre tags plus the curated Medium overrides found in the corpus."""
    genres = {t for t, s in ta.high_subtaxon.items() if s is SubTaxon.GENRE}
    genres |= {t for t in cl.medium_genre_overrides if t in ta.taxon}
    return sorted(genres)


def bin_sensitive_tags(
    m: PriorityMatrix, th: TaxaThresholds = TaxaThresholds(), bins: tuple[int, ...] = (50, 200)
) -> list[TagId]:
    """Tags whose High/Medium call changes across the given histogram resolutions."""
    calls = [classify_taxa(m, th, b).taxon for b in bins]
    return sorted(t for t in calls[0] if len({c[t] for c in calls}) > 1)


def reference_genres() -> list[TagId]:
    """The published 127-tag genre list shipped with the package, for comparison runs."""
    text = (resources.files(__package__) / "data" / "reference_genres.txt").read_text(encoding="utf-8")
    return [ln.strip() for ln in text.splitlines() if ln.strip()]
