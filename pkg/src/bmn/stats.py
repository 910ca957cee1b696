"""Combinatorial counts, duration statistics, and exponential-tail fitting."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable, NamedTuple, Sequence

import numpy as np

from .engine import (
    PLAYER_A,
    BudgetExceeded,
    Looped,
    MatchOutcome,
    Settings,
    Terminated,
)


class InsufficientDataError(ValueError):
    """Not enough usable histogram bins for a fit."""


def config_count(settings: Settings) -> int:
    """Number of distinct initial deck arrangements, exactly.

    Cards of equal rank are interchangeable, so the count is the multinomial
    N! / ((4!)^R * (N - 4R)!). Values grow past 10^30; everything stays in
    arbitrary-precision integers.
    """
    n, r = settings.n_total, settings.max_rank
    return math.factorial(n) // (math.factorial(4) ** r * math.factorial(n - 4 * r))


class StateSpaceSizes(NamedTuple):
    total: int
    playable: int


def state_space_sizes(settings: Settings) -> StateSpaceSizes:
    """Cardinalities of the full and the playable state space.

    Each arrangement admits N+1 splits into two ordered decks (N-1 of them
    leaving both players with cards), times 2 for who moves next.
    """
    c = config_count(settings)
    n = settings.n_total
    return StateSpaceSizes(total=2 * (n + 1) * c, playable=2 * (n - 1) * c)


def hypergeometric_pmf(population: int, successes: int, draws: int, k: int) -> float:
    """P(X = k) for X ~ Hypergeometric(population, successes, draws)."""
    if not 0 <= successes <= population:
        raise ValueError("need 0 <= successes <= population")
    if not 0 <= draws <= population:
        raise ValueError("need 0 <= draws <= population")
    if k < 0 or k > successes or k > draws or draws - k > population - successes:
        return 0.0
    num = math.comb(successes, k) * math.comb(population - successes, draws - k)
    return num / math.comb(population, draws)


# ---------------------------------------------------------------------------
# Duration summaries
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class DurationSummary:
    """Summary statistics over a batch of match outcomes.

    All numeric statistics cover terminated matches only; looped and
    over-budget matches are counted separately. Mode ties break toward the
    smaller trick count.
    """

    matches: int
    min_tricks: int
    max_tricks: int
    mode: int
    mean: float
    std_dev: float
    variance_to_mean: float
    wins_a_pct: float
    wins_b_pct: float
    histogram: dict = field(repr=False)
    loop_count: int = 0
    budget_exceeded_count: int = 0

    @property
    def terminated(self) -> int:
        return sum(self.histogram.values())

    def to_text(self) -> str:
        """Flat key/value form, one statistic per line."""
        lines = [
            f"matches = {self.matches}",
            f"terminated = {self.terminated}",
            f"loop_count = {self.loop_count}",
            f"budget_exceeded_count = {self.budget_exceeded_count}",
            f"min_tricks = {self.min_tricks}",
            f"max_tricks = {self.max_tricks}",
            f"mode = {self.mode}",
            f"mean = {self.mean!r}",
            f"std_dev = {self.std_dev!r}",
            f"variance_to_mean = {self.variance_to_mean!r}",
            f"wins_a_pct = {self.wins_a_pct!r}",
            f"wins_b_pct = {self.wins_b_pct!r}",
        ]
        return "\n".join(lines)


def summarize_counts(histogram: dict, wins_a: int, wins_b: int,
                     loop_count: int = 0, budget_exceeded_count: int = 0) -> DurationSummary:
    """Build a DurationSummary from aggregated counts.

    The moment computations run on exact integer sums, so the result is
    independent of the order matches were aggregated in.
    """
    terminated = sum(histogram.values())
    matches = terminated + loop_count + budget_exceeded_count
    if matches == 0:
        raise ValueError("no outcomes to summarize")
    if terminated == 0:
        nan = float("nan")
        return DurationSummary(matches, 0, 0, 0, nan, nan, nan, nan, nan,
                               dict(histogram), loop_count, budget_exceeded_count)
    sx = sum(n * c for n, c in histogram.items())
    sx2 = sum(n * n * c for n, c in histogram.items())
    mean = sx / terminated
    # exact integer numerator avoids cancellation: var = (t*sx2 - sx^2)/t^2
    var = (terminated * sx2 - sx * sx) / terminated / terminated
    std = math.sqrt(var)
    max_count = max(histogram.values())
    mode = min(n for n, c in histogram.items() if c == max_count)
    wins_total = wins_a + wins_b
    return DurationSummary(
        matches=matches,
        min_tricks=min(histogram),
        max_tricks=max(histogram),
        mode=mode,
        mean=mean,
        std_dev=std,
        variance_to_mean=var / mean,
        wins_a_pct=100.0 * wins_a / wins_total,
        wins_b_pct=100.0 * wins_b / wins_total,
        histogram=dict(sorted(histogram.items())),
        loop_count=loop_count,
        budget_exceeded_count=budget_exceeded_count,
    )


def summarize(outcomes: Sequence[MatchOutcome] | Iterable[MatchOutcome]) -> DurationSummary:
    """Summarize a sequence of MatchOutcome values."""
    histogram: dict[int, int] = {}
    wins_a = wins_b = loops = budget = 0
    for outcome in outcomes:
        if isinstance(outcome, Terminated):
            histogram[outcome.tricks] = histogram.get(outcome.tricks, 0) + 1
            if outcome.winner == PLAYER_A:
                wins_a += 1
            else:
                wins_b += 1
        elif isinstance(outcome, Looped):
            loops += 1
        elif isinstance(outcome, BudgetExceeded):
            budget += 1
        else:
            raise TypeError(f"not a MatchOutcome: {outcome!r}")
    return summarize_counts(histogram, wins_a, wins_b, loops, budget)


# ---------------------------------------------------------------------------
# Exponential tail
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ExponentialFit:
    """Log-linear fit of a duration histogram tail: frequency ~ exp(-lam*n)."""

    lam: float
    fit_lo: int
    fit_hi: int
    r_squared: float
    p_geometric: float  # 1 - exp(-lam)


def fit_exponential(histogram: dict, n_lo: int, n_hi: int,
                    min_count: int = 5) -> ExponentialFit:
    """Unweighted least squares on (n, ln frequency) over [n_lo, n_hi].

    Bins with fewer than `min_count` matches are dropped so the log does not
    amplify pure sampling noise.
    """
    if n_lo >= n_hi:
        raise ValueError("need n_lo < n_hi")
    pts = sorted((n, c) for n, c in histogram.items()
                 if n_lo <= n <= n_hi and c >= min_count)
    if len(pts) < 2:
        raise InsufficientDataError(
            f"need >= 2 bins with count >= {min_count} in [{n_lo}, {n_hi}]")
    x = np.array([n for n, _ in pts], dtype=float)
    y = np.log([c for _, c in pts])
    slope, intercept = np.polyfit(x, y, 1)
    if slope >= 0:
        raise ValueError("histogram does not decay over the requested range")
    resid = y - (slope * x + intercept)
    ss_tot = float(np.sum((y - y.mean()) ** 2))
    r2 = 1.0 - float(np.sum(resid ** 2)) / ss_tot if ss_tot > 0 else 1.0
    lam = float(-slope)
    return ExponentialFit(lam=lam, fit_lo=n_lo, fit_hi=n_hi, r_squared=r2,
                          p_geometric=1.0 - math.exp(-lam))


def geometric_tail(lam: float, n: int) -> float:
    """P(duration >= n) under the geometric approximation: exp(-lam*(n-1))."""
    if lam <= 0:
        raise ValueError("lam must be positive")
    if n < 1:
        raise ValueError("n must be >= 1")
    return math.exp(-lam * (n - 1))


# ---------------------------------------------------------------------------
# Goodness of fit
# ---------------------------------------------------------------------------


def chi_square_gof(observed: Sequence[int], expected: Sequence[float],
                   min_expected: float = 5.0) -> tuple[float, int, float]:
    """Chi-square goodness-of-fit with tail pooling.

    `observed` are counts per category, `expected` the matching expected
    counts (same total). Categories are pooled from both ends inward until
    every remaining bin has expected count >= min_expected. Returns
    (statistic, degrees of freedom, p-value).
    """
    from scipy.stats import chi2

    obs = [float(o) for o in observed]
    exp = [float(e) for e in expected]
    if len(obs) != len(exp):
        raise ValueError("observed and expected must have equal length")
    lo, hi = 0, len(exp)
    while hi - lo > 1 and exp[lo] < min_expected:
        exp[lo + 1] += exp[lo]
        obs[lo + 1] += obs[lo]
        lo += 1
    while hi - lo > 1 and exp[hi - 1] < min_expected:
        exp[hi - 2] += exp[hi - 1]
        obs[hi - 2] += obs[hi - 1]
        hi -= 1
    obs = obs[lo:hi]
    exp = exp[lo:hi]
    if len(obs) < 2:
        raise InsufficientDataError("fewer than 2 bins after pooling")
    stat = sum((o - e) ** 2 / e for o, e in zip(obs, exp))
    df = len(obs) - 1
    return stat, df, float(chi2.sf(stat, df))
