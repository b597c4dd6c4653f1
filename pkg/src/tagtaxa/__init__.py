"""Mining player-assigned game tags: priorities, taxa, meronomies and synonym groups."""

__version__ = "0.1.0"
