"""Command-line interface: play, simulate, loops, backward, factory.

Exit codes: 0 success, 1 usage or parse error, 2 verification failure
(e.g. verifying a loop on decks that terminate). All commands are
deterministic given their full flag set; emitted files are documented in
FORMATS.md.
"""

from __future__ import annotations

import argparse
import sys

from . import __version__, analyzer, backward, cycles, engine, factory, simulator, stats
from .engine import (
    PLAYER_A,
    PLAYER_B,
    BudgetExceeded,
    DeckParseError,
    GameState,
    Looped,
    Settings,
    Terminated,
    format_deck,
    parse_deck,
)

USAGE_ERROR = 1
VERIFY_ERROR = 2


class _Parser(argparse.ArgumentParser):
    # argparse exits with 2 on usage errors; this CLI reserves 2 for
    # verification failures, so remap.
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(USAGE_ERROR)


def _fail(message: str, code: int = USAGE_ERROR) -> int:
    print(f"error: {message}", file=sys.stderr)
    return code


def _parse_state(args, settings) -> GameState:
    deck_a = parse_deck(args.deck_a, settings)
    deck_b = parse_deck(args.deck_b, settings)
    leader = getattr(args, "leader", PLAYER_A)
    return GameState(deck_a, deck_b, leader)


def _outcome_line(outcome) -> str:
    if isinstance(outcome, Terminated):
        return f"Terminated winner={outcome.winner} tricks={outcome.tricks}"
    if isinstance(outcome, Looped):
        return f"Looped transient={outcome.transient} period={outcome.period}"
    return f"BudgetExceeded tricks={outcome.tricks_played}"


# ---------------------------------------------------------------------------
# play
# ---------------------------------------------------------------------------


def cmd_play(args) -> int:
    settings = Settings.parse(args.setting)
    state = _parse_state(args, settings)
    if not state.playable:
        return _fail("both decks must be nonempty")
    deficits = factory.missing(state.deck_a, state.deck_b, settings)
    if not args.allow_partial and any(d != 0 for d in deficits.values()):
        off = {r: d for r, d in deficits.items() if d != 0}
        return _fail(f"decks do not form a complete {settings} composition "
                     f"(deficits {off}); use --allow-partial to play anyway")
    if args.trace:
        records, outcome = analyzer.trace_match(state, args.max_tricks)
        analyzer.write_trace_csv(records, args.trace)
        if args.positions:
            analyzer.write_positions_csv(records, args.positions)
    else:
        outcome = engine.play_match(state, args.max_tricks, detect_loops=True)
    print(_outcome_line(outcome))
    return 0


# ---------------------------------------------------------------------------
# simulate
# ---------------------------------------------------------------------------


def _stats_text(config, summary, fit) -> str:
    lines = [
        "# bmn stats v1",
        f"version = {__version__}",
        f"setting = {config.settings}",
        f"matches = {config.matches}",
        f"seed = {config.seed}",
        f"max_tricks = {config.max_tricks}",
        f"detect_loops = {str(config.detect_loops).lower()}",
        f"workers = {config.workers}",
        "",
        "[summary]",
        summary.to_text(),
    ]
    if fit is not None:
        lines += [
            "",
            "[fit]",
            f"lambda = {fit.lam!r}",
            f"p_geometric = {fit.p_geometric!r}",
            f"range_lo = {fit.fit_lo}",
            f"range_hi = {fit.fit_hi}",
            f"r_squared = {fit.r_squared!r}",
        ]
    return "\n".join(lines) + "\n"


def write_histogram_csv(histogram: dict, path) -> None:
    with open(path, "w") as fh:
        fh.write("tricks,count\n")
        for tricks in sorted(histogram):
            fh.write(f"{tricks},{histogram[tricks]}\n")


def cmd_simulate(args) -> int:
    settings = Settings.parse(args.setting)
    config = simulator.SimConfig(settings=settings, matches=args.matches,
                                 seed=args.seed, max_tricks=args.max_tricks,
                                 detect_loops=args.detect_loops,
                                 workers=args.workers)
    summary = simulator.run_batch(config)
    fit = None
    if args.fit:
        try:
            lo_str, hi_str = args.fit.split(",")
            lo, hi = int(lo_str), int(hi_str)
        except ValueError:
            return _fail(f"--fit expects LO,HI, got {args.fit!r}")
        fit = stats.fit_exponential(summary.histogram, lo, hi)
    text = _stats_text(config, summary, fit)
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    if args.hist:
        write_histogram_csv(summary.histogram, args.hist)
    return 0


# ---------------------------------------------------------------------------
# loops
# ---------------------------------------------------------------------------


def cmd_loops(args) -> int:
    settings = Settings.parse(args.setting)
    state = _parse_state(args, settings)
    try:
        report = cycles.verify_loop(state, args.max_tricks)
    except cycles.NotALoopError as exc:
        print(f"match terminated after {exc.outcome.tricks} tricks "
              f"(winner {exc.outcome.winner})", file=sys.stderr)
        return VERIFY_ERROR
    except cycles.UndecidedError as exc:
        print(f"undecided: {exc}", file=sys.stderr)
        return VERIFY_ERROR
    if args.mode == "verify":
        print(report.to_text())
    else:  # scan
        for entry in cycles.scan_balanced_entries(report, settings):
            print(f"deck_a={format_deck(entry.deck_a)} "
                  f"deck_b={format_deck(entry.deck_b)}")
    return 0


# ---------------------------------------------------------------------------
# backward
# ---------------------------------------------------------------------------


def cmd_backward(args) -> int:
    settings = Settings.parse(args.setting)
    state = _parse_state(args, settings)
    if args.find_balanced:
        config = backward.BackwardSearchConfig(max_depth=args.depth,
                                               max_nodes=args.max_nodes)
        for found in backward.backward_search([state], config):
            print(f"leader={found.leader} deck_a={format_deck(found.deck_a)} "
                  f"deck_b={format_deck(found.deck_b)}")
        return 0
    # plain listing of the predecessor tree up to the requested depth
    seen = {engine.canonical_encoding(state)}
    frontier = [state]
    for _ in range(args.depth):
        nxt = []
        for s in frontier:
            for cand in backward.enumerate_predecessors(s):
                key = engine.canonical_encoding(cand.state)
                if key in seen or len(seen) >= args.max_nodes:
                    continue
                seen.add(key)
                nxt.append(cand.state)
                print(f"leader={cand.state.leader} "
                      f"deck_a={format_deck(cand.state.deck_a)} "
                      f"deck_b={format_deck(cand.state.deck_b)}")
        frontier = nxt
    return 0


# ---------------------------------------------------------------------------
# factory
# ---------------------------------------------------------------------------


def _findings_line(settings, state, report) -> str:
    return (f"setting={settings} deck_a={format_deck(state.deck_a)} "
            f"deck_b={format_deck(state.deck_b)} "
            f"transient={report.transient} period={report.period}")


def cmd_factory(args) -> int:
    settings = Settings.parse(args.setting)
    seeds = []
    if args.seed_decks:
        with open(args.seed_decks) as fh:
            for line in fh:
                line = line.strip()
                if not line or line.startswith("#"):
                    continue
                a_str, b_str = line.split()
                seeds.append(GameState(parse_deck(a_str, settings),
                                       parse_deck(b_str, settings), PLAYER_A))
    elif args.seed_deck_a or args.seed_deck_b:
        if not (args.seed_deck_a and args.seed_deck_b):
            return _fail("--seed-deck-a and --seed-deck-b go together")
        seeds.append(GameState(parse_deck(args.seed_deck_a, settings),
                               parse_deck(args.seed_deck_b, settings), PLAYER_A))
    else:
        seeds.append(factory.default_seed_state())

    best_result = None
    for seed_state in seeds:
        config = factory.FactoryConfig(settings=settings, seed_state=seed_state,
                                       budget=args.budget, rng_seed=args.rng_seed,
                                       nontermination_trick_cap=args.trick_cap)
        try:
            result = factory.run_factory(config)
        except factory.SeedNotLoopingError:
            print(f"seed {format_deck(seed_state.deck_a)} "
                  f"{format_deck(seed_state.deck_b)} terminates; skipped",
                  file=sys.stderr)
            continue
        if result.success:
            line = _findings_line(settings, result.complete, result.report)
            if args.out:
                with open(args.out, "a") as fh:
                    fh.write(line + "\n")
            print(f"complete {line} rounds={result.rounds_used}")
            return 0
        if best_result is None or result.best.score > best_result.best.score:
            best_result = result
    if best_result is None:
        return _fail("no usable seed configuration", VERIFY_ERROR)
    cp = best_result.best
    print(f"partial score={cp.score}/{settings.n_total} depth={cp.depth} "
          f"deck_a={format_deck(cp.deck_a)} deck_b={format_deck(cp.deck_b)} "
          f"rounds={best_result.rounds_used}")
    return 0


# ---------------------------------------------------------------------------
# parser
# ---------------------------------------------------------------------------


def _add_deck_args(p, leader_default=PLAYER_A):
    p.add_argument("--deck-a", required=True, help="player A's deck string")
    p.add_argument("--deck-b", required=True, help="player B's deck string")
    p.add_argument("--leader", choices=[PLAYER_A, PLAYER_B],
                   default=leader_default, help="who flips first")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="bmn",
                     description="Beggar-My-Neighbour engine, simulator, "
                                 "and loop-search toolkit")
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("play", help="play one match from explicit decks")
    p.add_argument("--setting", required=True, help="N,R e.g. 40,3")
    _add_deck_args(p)
    p.add_argument("--max-tricks", type=int, default=engine.DEFAULT_MATCH_TRICKS)
    p.add_argument("--allow-partial", action="store_true",
                   help="accept decks that do not form a full (N,R) composition")
    p.add_argument("--trace", help="write a per-trick CSV trace here")
    p.add_argument("--positions", help="companion CSV of special-card positions")
    p.set_defaults(func=cmd_play)

    p = sub.add_parser("simulate", help="Monte Carlo batch over uniform deals")
    p.add_argument("--setting", required=True)
    p.add_argument("--matches", type=int, required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--max-tricks", type=int, default=engine.DEFAULT_BATCH_TRICKS)
    p.add_argument("--detect-loops", action="store_true",
                   help="per-match loop detection (slow; off by default)")
    p.add_argument("--out", help="write the stats file here (default stdout)")
    p.add_argument("--hist", help="write the histogram CSV here")
    p.add_argument("--fit", metavar="LO,HI",
                   help="fit an exponential tail over this trick range")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("loops", help="verify a cycle / scan its balanced entries")
    p.add_argument("mode", choices=["verify", "scan"])
    p.add_argument("--setting", required=True)
    _add_deck_args(p)
    p.add_argument("--max-tricks", type=int, default=engine.DEFAULT_BATCH_TRICKS)
    p.set_defaults(func=cmd_loops)

    p = sub.add_parser("backward", help="enumerate predecessor states")
    p.add_argument("--setting", required=True)
    _add_deck_args(p)
    p.add_argument("--depth", type=int, default=1)
    p.add_argument("--max-nodes", type=int, default=1_000_000)
    p.add_argument("--find-balanced", action="store_true",
                   help="report standardized balanced states instead of the tree")
    p.set_defaults(func=cmd_backward)

    p = sub.add_parser("factory", help="grow a seed loop to full composition")
    p.add_argument("--setting", required=True)
    p.add_argument("--seed-deck-a", help="seed deck for player A")
    p.add_argument("--seed-deck-b", help="seed deck for player B")
    p.add_argument("--seed-decks", help="file of 'DECKA DECKB' seed lines")
    p.add_argument("--budget", type=int, default=100_000,
                   help="exploration rounds")
    p.add_argument("--rng-seed", type=int, default=0)
    p.add_argument("--trick-cap", type=int, default=engine.DEFAULT_BATCH_TRICKS)
    p.add_argument("--out", help="append complete findings to this file")
    p.set_defaults(func=cmd_factory)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else USAGE_ERROR
    try:
        return args.func(args)
    except DeckParseError as exc:
        return _fail(str(exc))
    except ValueError as exc:
        return _fail(str(exc))


if __name__ == "__main__":
    sys.exit(main())
