"""Seeded Monte Carlo harness: uniform deals and reproducible batch runs."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import _kernels, engine, stats
from ._rng import SplitMix64
from .engine import PLAYER_A, GameState, Settings


@dataclass(frozen=True)
class SimConfig:
    """Batch parameters. Match i always draws from the (seed, i) stream."""

    settings: Settings
    matches: int
    seed: int = 0
    max_tricks: int = engine.DEFAULT_BATCH_TRICKS
    detect_loops: bool = False
    workers: int = 1

    def __post_init__(self):
        if self.matches < 1:
            raise ValueError("matches must be >= 1")
        if self.workers < 1:
            raise ValueError("workers must be >= 1")
        if self.max_tricks < 1:
            raise ValueError("max_tricks must be >= 1")


def full_deck(settings: Settings) -> list:
    """The complete card multiset in canonical pre-shuffle order."""
    cards = [r for r in range(1, settings.max_rank + 1) for _ in range(4)]
    cards += [0] * settings.n_ordinary
    return cards


def deal(settings: Settings, rng: SplitMix64) -> GameState:
    """Uniform random even split: shuffle the full multiset, top half to A."""
    cards = full_deck(settings)
    rng.shuffle(cards)
    half = settings.half
    return GameState(tuple(cards[:half]), tuple(cards[half:]), PLAYER_A)


def match_state(config: SimConfig, index: int) -> GameState:
    """Reconstruct the initial deal of match `index` of a batch."""
    return deal(config.settings, SplitMix64.for_stream(config.seed, index))


def run_batch(config: SimConfig) -> stats.DurationSummary:
    """Play config.matches independent matches and summarize the durations.

    Results are bitwise identical for any worker count and either kernel
    backend. With detect_loops=False (the default) matches run on the fast
    kernel; any match that hits the trick budget is replayed individually
    with loop detection so loops and genuinely over-budget matches are
    reported apart.
    """
    if config.detect_loops:
        return stats.summarize(
            engine.play_match(match_state(config, i), config.max_tricks,
                              detect_loops=True)
            for i in range(config.matches))

    durations, winners = _kernels.simulate_batch(
        config.matches, config.settings.n_total, config.settings.max_rank,
        config.seed, config.max_tricks, config.workers)

    histogram: dict[int, int] = {}
    term = winners >= 0
    if term.any():
        counts = np.bincount(durations[term])
        histogram = {int(n): int(c) for n, c in enumerate(counts) if c > 0}
    wins_a = int(np.count_nonzero(winners == 0))
    wins_b = int(np.count_nonzero(winners == 1))

    loop_count = 0
    budget_count = 0
    for idx in np.nonzero(winners == -1)[0]:
        outcome = engine.play_match(match_state(config, int(idx)),
                                    config.max_tricks, detect_loops=True)
        if isinstance(outcome, engine.Looped):
            loop_count += 1
        else:
            budget_count += 1
    return stats.summarize_counts(histogram, wins_a, wins_b, loop_count, budget_count)
