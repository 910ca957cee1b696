"""Generalized Beggar-My-Neighbour: engine, statistics, and loop search."""

from .engine import (
    BudgetExceeded,
    GameState,
    Looped,
    MatchOutcome,
    Settings,
    Terminated,
    format_deck,
    parse_deck,
    play_match,
    play_trick,
)

__version__ = "0.1.0"

__all__ = [
    "BudgetExceeded",
    "GameState",
    "Looped",
    "MatchOutcome",
    "Settings",
    "Terminated",
    "format_deck",
    "parse_deck",
    "play_match",
    "play_trick",
    "__version__",
]
