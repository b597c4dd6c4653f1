from __future__ import annotations

import json
from pathlib import Path

from tagtaxa.corpus import Corpus, GameRecord

FIXTURES = Path(__file__).parent / "fixtures"


def corpus_of(data: dict[str, dict[str, int]]) -> Corpus:
    return Corpus.from_dict(data)


def write_snapshot(path: Path, records: list[dict]) -> Path:
    path.write_text(json.dumps(records), encoding="utf-8")
    return path


def game(gid: str, **counts: int) -> GameRecord:
    return GameRecord(gid, gid, counts)


def planted_capital_corpus(seed: int = 0) -> dict[str, dict[str, int]]:
    """Three broad tags, each sharing every game of its 12 narrower tags.

    Each narrow tag lives in 3 games together with its broad tag only, and each broad
    tag also has 10 games of its own, so it occurs far more often than its parts.
    """
    import random

    rnd = random.Random(seed)
    data: dict[str, dict[str, int]] = {}
    for b in "ABC":
        broad = f"Broad {b}"
        for k in range(12):
            narrow = f"Narrow {b}{k:02d}"
            for j in range(3):
                data[f"{b}{k:02d}-{j}"] = {broad: rnd.randint(50, 100), narrow: rnd.randint(20, 100)}
        for j in range(10):
            data[f"{b}-solo-{j}"] = {broad: rnd.randint(50, 100)}
    return data


def random_digraph(rnd, n: int, m: int, dag: bool = False) -> tuple[list[str], list[tuple[str, str]]]:
    nodes = [f"v{i}" for i in range(n)]
    possible = [(u, v) for i, u in enumerate(nodes) for j, v in enumerate(nodes)
                if i != j and (not dag or i < j)]
    edges = rnd.sample(possible, min(m, len(possible)))
    return nodes, sorted(edges)


# Graphs named after the worked examples; edges not in the text are marked synthetic.

FIG5_EDGES = [
    ("Fantasy", "RPG"), ("RPG", "Adventure"),
    ("Fantasy", "Atmospheric"), ("Fantasy", "Singleplayer"),
    ("Atmospheric", "Exploration"), ("Exploration", "Singleplayer"),
    ("Atmospheric", "Singleplayer"),
    ("Story Rich", "Atmospheric"), ("Story Rich", "Singleplayer"),
    ("Puzzle", "Atmospheric"), ("Puzzle", "Singleplayer"),
]

CARD_ROGUE = [
    ("Card Battler", "Card Game"), ("Deckbuilding", "Card Game"),
    ("Trading Card Game", "Card Game"),
    ("Roguelike Deckbuilder", "Deckbuilding"), ("Roguelike Deckbuilder", "Card Battler"),
    ("Roguelike Deckbuilder", "Card Game"),
    ("Roguelike Deckbuilder", "Rogue-lite"), ("Roguelike Deckbuilder", "Rogue-like"),
    ("Roguevania", "Action Roguelike"), ("Roguevania", "Rogue-lite"),
    ("Action Roguelike", "Rogue-lite"), ("Traditional Roguelike", "Rogue-like"),
    ("Rogue-lite", "Rogue-like"),  # synthetic: the text treats the two as one label
]

CARD_NODES = sorted({v for e in CARD_ROGUE for v in e})

# Only Software Training's two edges and Photo Editing -> Utilities come from the text.
SOFTWARE = [
    ("Audio Production", "Utilities"), ("Video Production", "Utilities"),
    ("Photo Editing", "Design & Illustration"), ("Photo Editing", "Utilities"),
    ("Design & Illustration", "Utilities"), ("Animation & Modeling", "Design & Illustration"),
    ("Web Publishing", "Utilities"), ("Software Training", "Utilities"),
    ("Software Training", "Education"),
]

SOFT_NODES = sorted({v for e in SOFTWARE for v in e})



# (criterion number, status, detail) rows printed at the end of the session
ACCEPTANCE: list[tuple[int, str, str]] = []
