"""Command line interface.

Every flag can also come from ``--config FILE``: one ``key = value`` per line
(``#`` comments allowed, keys are flag names with or without leading dashes).
Flags given on the command line win over the file.

Exit codes: 0 success, 1 usage error, 2 data error.
"""

from __future__ import annotations

import argparse
import logging
import random
import sys
import time
from pathlib import Path

from .engine import GameConfig, PlayerColor, TokenPolicy, play_game
from .graph import GraphError, generate_ba, generate_er, generate_ws, load_edge_list, save_edge_list
from .harness import (STRATEGY_NAMES, Dataset, DatasetKind, ExperimentSpec, Formation, PlayerSpec,
                      emit_results, formation_spec, randomness_table, run_match, synthetic_graph)
from .heuristics import HeuristicWeights
from .seeds import derive_seed

EXIT_USAGE = 1
EXIT_DATA = 2

POLICIES = {"fire": TokenPolicy.FIRE_CAPACITY, "one": TokenPolicy.ONE_TOKEN,
            "choose": TokenPolicy.CHOSEN_AMOUNT}


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def read_config(path: str) -> dict[str, str]:
    out = {}
    try:
        lines = Path(path).read_text().splitlines()
    except OSError as exc:
        raise UsageError(f"cannot read config {path}: {exc}") from exc
    for lineno, line in enumerate(lines, 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" in line:
            key, value = line.split("=", 1)
        else:
            parts = line.split(None, 1)
            if len(parts) != 2:
                raise UsageError(f"{path}:{lineno}: expected 'key = value'")
            key, value = parts
        out[key.strip().lstrip("-").replace("-", "_")] = value.strip()
    return out


def _add_players(p: argparse.ArgumentParser) -> None:
    p.add_argument("--black", default="eps-mcts", choices=STRATEGY_NAMES)
    p.add_argument("--red", default="mcts", choices=STRATEGY_NAMES)
    p.add_argument("--black-policy", default="fire", choices=sorted(POLICIES))
    p.add_argument("--red-policy", default="fire", choices=sorted(POLICIES))
    _add_search(p)


def _add_search(p: argparse.ArgumentParser) -> None:
    p.add_argument("--iterations", type=int, default=1000, help="MCTS iterations per move")
    p.add_argument("--epsilon", type=float, default=0.7)
    p.add_argument("--uct-c", type=float, default=2 ** 0.5)
    p.add_argument("--rollout", choices=("random", "eps-greedy"), default=None,
                   help="override the rollout of both MCTS players")
    p.add_argument("--amount-mode", choices=("fire", "choose"), default=None,
                   help="donation mode for MCTS players (overrides --*-policy for them)")
    p.add_argument("--depth", type=int, default=4, help="minimax plies")
    p.add_argument("--weights", default="0.25,0.25,0.25,0.25",
                   help="parity,weak-neighbors,low-threshold,verge weights")
    p.add_argument("--nlt-bonus", type=float, default=2.0)


def _add_common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", help="key = value file providing defaults")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--budget", type=int, default=None, help="tokens per player (default: n)")
    p.add_argument("-v", "--verbose", action="store_true")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="loyalty-cim", description="Two-player loyalty token game on graphs.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("gen-graph", help="write a synthetic edge list")
    p.add_argument("--model", choices=("er", "ba", "ws"), required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--p", type=float, default=0.3)
    p.add_argument("--m", type=int, default=2)
    p.add_argument("--k", type=int, default=4)
    p.add_argument("--out", required=True)
    _add_common(p)

    p = sub.add_parser("play", help="play one game and report the outcome")
    p.add_argument("--graph", required=True,
                   help="edge-list file, or sw/sf/er for a sampled synthetic graph")
    p.add_argument("--starter", choices=("black", "red"), default="black")
    p.add_argument("--trace", help="write the move trace (.json for JSON, else text)")
    _add_players(p)
    _add_common(p)

    p = sub.add_parser("match", help="run a tournament between two strategies")
    p.add_argument("--dataset", default="sw", help="sw, sf, er or file:<path>")
    p.add_argument("--games", type=int, default=100)
    p.add_argument("--target-cluster", type=int, default=198)
    p.add_argument("--sample", type=int, default=100)
    p.add_argument("--out", help="results file (.csv or .json)")
    _add_players(p)
    _add_common(p)

    p = sub.add_parser("randomness", help="repeated games on a few fixed graphs")
    p.add_argument("--dataset", default="sw")
    p.add_argument("--graphs", type=int, default=5)
    p.add_argument("--runs", type=int, default=20)
    p.add_argument("--target-cluster", type=int, default=198)
    p.add_argument("--sample", type=int, default=100)
    p.add_argument("--starter", choices=("black", "red"), default="black")
    p.add_argument("--out", help="write the table as text")
    _add_players(p)
    _add_common(p)

    p = sub.add_parser("tokens-exp", help="donation-policy formations, MCTS on both sides")
    p.add_argument("--formation", choices=[f.value for f in Formation], required=True)
    p.add_argument("--dataset", default="sw")
    p.add_argument("--games", type=int, default=100)
    p.add_argument("--strategy", choices=("mcts", "eps-mcts"), default="mcts")
    p.add_argument("--target-cluster", type=int, default=198)
    p.add_argument("--sample", type=int, default=100)
    p.add_argument("--out")
    _add_search(p)
    _add_common(p)
    return parser


def parse_args(argv=None) -> argparse.Namespace:
    parser = build_parser()
    args = parser.parse_args(argv)
    if getattr(args, "config", None):
        values = read_config(args.config)
        sub = parser._subparsers._group_actions[0].choices[args.command]
        known = {a.dest for a in sub._actions}
        unknown = set(values) - known
        if unknown:
            raise UsageError(f"unknown config keys: {', '.join(sorted(unknown))}")
        sub.set_defaults(**values)
        args = parser.parse_args(argv)
    return args


def _weights(text: str) -> HeuristicWeights:
    try:
        vals = [float(x) for x in text.split(",")]
        return HeuristicWeights(*vals)
    except (TypeError, ValueError) as exc:
        raise UsageError(f"bad --weights {text!r}: {exc}") from exc


def _player(args, name: str, policy: str) -> PlayerSpec:
    pol = POLICIES[policy]
    if args.amount_mode and name in ("mcts", "eps-mcts"):
        pol = POLICIES[args.amount_mode]
    rollout = args.rollout
    if rollout and name in ("mcts", "eps-mcts"):
        name = "eps-mcts" if rollout == "eps-greedy" else "mcts"
    return PlayerSpec(name, pol, iterations=args.iterations, epsilon=args.epsilon,
                      uct_c=args.uct_c, depth=args.depth, weights=_weights(args.weights),
                      nlt_bonus=args.nlt_bonus)


def _dataset(args) -> Dataset:
    try:
        return Dataset.parse(args.dataset, args.target_cluster, args.sample)
    except ValueError as exc:
        raise UsageError(f"bad --dataset {args.dataset!r}") from exc


def _print_stats(stats, elapsed: float) -> None:
    print(f"games={stats.games} w={stats.w} l={stats.l} d={stats.d} "
          f"win_rate={stats.win_rate:.3f} loss_rate={stats.loss_rate:.3f} "
          f"draw_rate={stats.draw_rate:.3f} ({elapsed:.1f}s)")


def cmd_gen_graph(args) -> int:
    try:
        if args.model == "er":
            g = generate_er(args.n, args.p, args.seed)
        elif args.model == "ba":
            g = generate_ba(args.n, args.m, args.seed)
        else:
            g = generate_ws(args.n, args.k, args.p, args.seed)
    except GraphError as exc:
        raise UsageError(str(exc)) from exc
    save_edge_list(g, args.out)
    print(f"wrote {args.out}: n={g.n} edges={g.edge_count}")
    return 0


def cmd_play(args) -> int:
    if args.graph in ("sw", "sf", "er"):
        graph = synthetic_graph(DatasetKind(args.graph), random.Random(derive_seed(args.seed, "graph")))
    else:
        graph = load_edge_list(args.graph)
    black = _player(args, args.black, args.black_policy)
    red = _player(args, args.red, args.red_policy)
    cfg = GameConfig.for_graph(graph, args.budget, policy_red=red.policy, policy_black=black.policy,
                               starter=PlayerColor[args.starter.upper()])
    res = play_game(graph, cfg, red.build(), black.build(), args.seed)
    print(f"graph n={graph.n} edges={graph.edge_count} budget={cfg.budget_black}")
    print(f"{res.outcome.value}: black={res.black_nodes} red={res.red_nodes} turns={res.turns}")
    if args.trace:
        text = res.trace_json() if args.trace.endswith(".json") else res.trace_text()
        Path(args.trace).write_text(text)
    return 0


def cmd_match(args) -> int:
    black = _player(args, args.black, args.black_policy)
    red = _player(args, args.red, args.red_policy)
    spec = ExperimentSpec(_dataset(args), black, red, args.games, args.budget, args.seed)
    t0 = time.perf_counter()
    result = run_match(spec)
    _print_stats(result.stats, time.perf_counter() - t0)
    if args.out:
        emit_results(result.records, args.out, black=black.label(), red=red.label())
    return 0


def cmd_randomness(args) -> int:
    black = _player(args, args.black, args.black_policy)
    red = _player(args, args.red, args.red_policy)
    table = randomness_table(_dataset(args), black, red, args.graphs, args.runs, args.seed,
                             args.budget, PlayerColor[args.starter.upper()])
    text = table.to_text()
    print(text, end="")
    if args.out:
        Path(args.out).write_text(text)
    return 0


def cmd_tokens_exp(args) -> int:
    spec = formation_spec(args.formation, _dataset(args), args.games, args.seed,
                          args.iterations, args.strategy, args.budget)
    t0 = time.perf_counter()
    result = run_match(spec)
    _print_stats(result.stats, time.perf_counter() - t0)
    if args.out:
        emit_results(result.records, args.out, black=spec.black.label(), red=spec.red.label())
    return 0


COMMANDS = {"gen-graph": cmd_gen_graph, "play": cmd_play, "match": cmd_match,
            "randomness": cmd_randomness, "tokens-exp": cmd_tokens_exp}


def main(argv=None) -> int:
    try:
        args = parse_args(argv)
    except UsageError as exc:
        print(f"loyalty-cim: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return COMMANDS[args.command](args)
    except UsageError as exc:
        print(f"loyalty-cim: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (GraphError, OSError) as exc:
        print(f"loyalty-cim: data error: {exc}", file=sys.stderr)
        return EXIT_DATA
    except ValueError as exc:
        print(f"loyalty-cim: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
