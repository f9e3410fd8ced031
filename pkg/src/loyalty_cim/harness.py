"""Tournaments, win/loss/draw statistics, randomness tables and the
donation-policy experiments."""

from __future__ import annotations

import csv
import enum
import json
import logging
import random
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Callable, Optional, Sequence

from .engine import GameConfig, GameResult, Outcome, PlayerColor, TokenPolicy, play_game
from .graph import Graph, extract_cluster_sample, generate_ba, generate_er, generate_ws, load_edge_list
from .heuristics import DEFAULT_NLT_BONUS, DEFAULT_WEIGHTS, HeuristicWeights
from .mcts import AmountMode, MctsConfig, MctsStrategy, Rollout
from .seeds import derive_seed
from .strategies import (MinimaxConfig, MinimaxStrategy, max_threshold_strategy,
                         min_threshold_strategy, random_strategy)

log = logging.getLogger(__name__)

STRATEGY_NAMES = ("random", "min-threshold", "max-threshold", "minimax", "mcts", "eps-mcts")

CSV_COLUMNS = ("run_id", "starter", "winner", "black_nodes", "red_nodes", "turns",
               "graph_n", "graph_m", "seed")


class DatasetKind(str, enum.Enum):
    SMALL_WORLD = "sw"
    SCALE_FREE = "sf"
    RANDOM_GRAPH = "er"
    FILE = "file"


@dataclass(frozen=True)
class Dataset:
    kind: DatasetKind
    path: Optional[str] = None
    target_cluster: int = 198
    sample: int = 100

    @classmethod
    def parse(cls, text: str, target_cluster: int = 198, sample: int = 100) -> "Dataset":
        """``sw``, ``sf``, ``er`` or ``file:<path>``."""
        if text.startswith("file:"):
            return cls(DatasetKind.FILE, text[5:], target_cluster, sample)
        aliases = {"small-world": "sw", "scale-free": "sf", "random": "er", "random-graph": "er"}
        return cls(DatasetKind(aliases.get(text, text)))

    def __str__(self) -> str:
        return f"file:{self.path}" if self.kind is DatasetKind.FILE else self.kind.value


def synthetic_graph(kind: DatasetKind, rng: random.Random) -> Graph:
    """One graph with parameters drawn from the synthetic ranges:
    n in [30, 100]; small world k in [3, 7], p = 0.3; scale free m in
    [1, n // 3]; random graph p = 0.3. Bounds are inclusive."""
    n = rng.randint(30, 100)
    seed = rng.randrange(2**32)
    if kind is DatasetKind.SMALL_WORLD:
        return generate_ws(n, rng.randint(3, 7), 0.3, seed)
    if kind is DatasetKind.SCALE_FREE:
        return generate_ba(n, rng.randint(1, n // 3), seed)
    if kind is DatasetKind.RANDOM_GRAPH:
        return generate_er(n, 0.3, seed)
    raise ValueError(f"{kind} is not a synthetic dataset")


def load_dataset_graph(ds: Dataset, seed: int) -> Graph:
    g = load_edge_list(ds.path)
    if g.n <= ds.sample:
        return g
    return extract_cluster_sample(g, ds.target_cluster, ds.sample, seed)


# -- strategies ------------------------------------------------------------------

@dataclass(frozen=True)
class PlayerSpec:
    """Strategy name plus the knobs the searchers use."""
    name: str
    policy: TokenPolicy = TokenPolicy.FIRE_CAPACITY
    iterations: int = 1000
    epsilon: float = 0.7
    uct_c: float = 2 ** 0.5
    depth: int = 4
    weights: HeuristicWeights = DEFAULT_WEIGHTS
    nlt_bonus: float = DEFAULT_NLT_BONUS

    def __post_init__(self):
        if self.name not in STRATEGY_NAMES:
            raise ValueError(f"unknown strategy {self.name!r}; choose from {', '.join(STRATEGY_NAMES)}")
        object.__setattr__(self, "policy", TokenPolicy(self.policy))

    def label(self) -> str:
        extra = "" if self.policy is TokenPolicy.FIRE_CAPACITY else f"[{self.policy.name.lower()}]"
        return self.name + extra

    def build(self) -> Callable:
        if self.name == "random":
            return random_strategy
        if self.name == "min-threshold":
            return min_threshold_strategy
        if self.name == "max-threshold":
            return max_threshold_strategy
        if self.name == "minimax":
            return MinimaxStrategy(MinimaxConfig(self.depth, self.weights))
        rollout = Rollout.EPS_GREEDY if self.name == "eps-mcts" else Rollout.RANDOM
        amount = AmountMode.CHOOSE if self.policy is TokenPolicy.CHOSEN_AMOUNT else AmountMode.FIRE
        return MctsStrategy(MctsConfig(iterations=self.iterations, c=self.uct_c,
                                       epsilon=self.epsilon, rollout=rollout,
                                       amount_mode=amount, weights=self.weights,
                                       nlt_bonus=self.nlt_bonus))


# -- statistics ------------------------------------------------------------------

def rates(w: int, l: int, d: int) -> tuple[float, float, float]:
    total = w + l + d
    if total < 1:
        raise ValueError("rates need at least one game")
    return w / total, l / total, d / total


@dataclass
class TournamentStats:
    w: int = 0
    l: int = 0
    d: int = 0

    @property
    def games(self) -> int:
        return self.w + self.l + self.d

    @property
    def win_rate(self) -> float:
        return rates(self.w, self.l, self.d)[0]

    @property
    def loss_rate(self) -> float:
        return rates(self.w, self.l, self.d)[1]

    @property
    def draw_rate(self) -> float:
        return rates(self.w, self.l, self.d)[2]

    def add(self, winner: str) -> None:
        if winner == "black":
            self.w += 1
        elif winner == "red":
            self.l += 1
        else:
            self.d += 1

    def to_dict(self) -> dict:
        return {"w": self.w, "l": self.l, "d": self.d, "win_rate": self.win_rate,
                "loss_rate": self.loss_rate, "draw_rate": self.draw_rate}


@dataclass
class GameRecord:
    run_id: int
    starter: str
    winner: str
    black_nodes: int
    red_nodes: int
    turns: int
    graph_n: int
    graph_m: int
    seed: int
    budget: int = 0


# -- matches ---------------------------------------------------------------------

@dataclass
class ExperimentSpec:
    dataset: Dataset
    black: PlayerSpec
    red: PlayerSpec
    games: int = 100
    budget: Optional[int] = None   # None -> n per player
    master_seed: int = 0

    def __post_init__(self):
        if self.games < 1:
            raise ValueError("games must be >= 1")


def starter_for(game_index: int) -> PlayerColor:
    """Even indices start Black, odd start Red; an odd total favors Black."""
    return PlayerColor.BLACK if game_index % 2 == 0 else PlayerColor.RED


def play_one(graph: Graph, black: PlayerSpec, red: PlayerSpec, starter: PlayerColor,
             budget: Optional[int], seed: int) -> GameResult:
    cfg = GameConfig.for_graph(graph, budget, policy_red=red.policy, policy_black=black.policy,
                               starter=starter)
    return play_game(graph, cfg, red.build(), black.build(), seed)


def _record(run_id: int, graph: Graph, starter: PlayerColor, res: GameResult, seed: int,
            budget: Optional[int]) -> GameRecord:
    return GameRecord(run_id, str(starter), res.outcome.value, res.black_nodes, res.red_nodes,
                      res.turns, graph.n, graph.edge_count, seed,
                      graph.n if budget is None else budget)


def run_game(spec: ExperimentSpec, game_index: int, fixed_graph: Optional[Graph] = None) -> GameRecord:
    """Play game ``game_index`` of a match; depends only on the spec and the index."""
    if fixed_graph is not None:
        graph = fixed_graph
    else:
        graph = synthetic_graph(spec.dataset.kind,
                                random.Random(derive_seed(spec.master_seed, game_index, "graph")))
    seed = derive_seed(spec.master_seed, game_index, "game")
    starter = starter_for(game_index)
    res = play_one(graph, spec.black, spec.red, starter, spec.budget, seed)
    return _record(game_index, graph, starter, res, seed, spec.budget)


@dataclass
class MatchResult:
    stats: TournamentStats
    records: list[GameRecord]


def run_match(spec: ExperimentSpec, progress: Optional[Callable[[GameRecord], None]] = None) -> MatchResult:
    fixed = None
    if spec.dataset.kind is DatasetKind.FILE:
        fixed = load_dataset_graph(spec.dataset, derive_seed(spec.master_seed, "sample"))
    stats = TournamentStats()
    records = []
    for i in range(spec.games):
        rec = run_game(spec, i, fixed)
        stats.add(rec.winner)
        records.append(rec)
        if progress:
            progress(rec)
    records.sort(key=lambda r: r.run_id)
    return MatchResult(stats, records)


# -- randomness tables -------------------------------------------------------------

@dataclass
class RandomnessRow:
    graph_index: int
    graph_n: int
    graph_m: int
    red_wins: int
    black_wins: int
    draws: int

    @property
    def runs(self) -> int:
        return self.red_wins + self.black_wins + self.draws

    def percentages(self) -> tuple[float, float, float]:
        """(red wins %, black wins %, draw %)."""
        r = self.runs
        return 100 * self.red_wins / r, 100 * self.black_wins / r, 100 * self.draws / r


@dataclass
class RandomnessTable:
    dataset: str
    black: str
    red: str
    rows: list[RandomnessRow] = field(default_factory=list)

    def pooled(self) -> TournamentStats:
        return TournamentStats(sum(r.black_wins for r in self.rows),
                               sum(r.red_wins for r in self.rows),
                               sum(r.draws for r in self.rows))

    def to_text(self) -> str:
        head = "Randomness\t" + "\t".join(f"Graph {r.graph_index + 1}" for r in self.rows)
        cols = [r.percentages() for r in self.rows]
        lines = [head]
        for label, j in (("Red Wins (%)", 0), ("Black wins (%)", 1), ("Draw (%)", 2)):
            lines.append(label + "\t" + "\t".join(f"{c[j]:g}" for c in cols))
        return "\n".join(lines) + "\n"


def randomness_table(dataset: Dataset, black: PlayerSpec, red: PlayerSpec, graphs: int = 5,
                     runs_per_graph: int = 20, master_seed: int = 0,
                     budget: Optional[int] = None,
                     starter: PlayerColor = PlayerColor.BLACK) -> RandomnessTable:
    """Repeat games on a few fixed graphs with a fixed starter; only the
    per-run seed changes between runs on the same graph."""
    table = RandomnessTable(str(dataset), black.label(), red.label())
    for gi in range(graphs):
        if dataset.kind is DatasetKind.FILE:
            graph = load_dataset_graph(dataset, derive_seed(master_seed, gi, "sample"))
        else:
            graph = synthetic_graph(dataset.kind, random.Random(derive_seed(master_seed, gi, "graph")))
        row = RandomnessRow(gi, graph.n, graph.edge_count, 0, 0, 0)
        for run in range(runs_per_graph):
            seed = derive_seed(master_seed, gi, run, "run")
            res = play_one(graph, black, red, starter, budget, seed)
            if res.outcome is Outcome.RED_WIN:
                row.red_wins += 1
            elif res.outcome is Outcome.BLACK_WIN:
                row.black_wins += 1
            else:
                row.draws += 1
        table.rows.append(row)
    return table


# -- donation policies -------------------------------------------------------------

class Formation(str, enum.Enum):
    FIRE_VS_ONE = "fire-vs-one"
    CHOOSE_VS_ONE = "choose-vs-one"
    FIRE_VS_CHOOSE = "fire-vs-choose"


FORMATION_POLICIES = {
    Formation.FIRE_VS_ONE: (TokenPolicy.FIRE_CAPACITY, TokenPolicy.ONE_TOKEN),
    Formation.CHOOSE_VS_ONE: (TokenPolicy.CHOSEN_AMOUNT, TokenPolicy.ONE_TOKEN),
    Formation.FIRE_VS_CHOOSE: (TokenPolicy.FIRE_CAPACITY, TokenPolicy.CHOSEN_AMOUNT),
}


def formation_spec(formation: Formation | str, dataset: Dataset, games: int, master_seed: int,
                   iterations: int = 1000, strategy: str = "mcts",
                   budget: Optional[int] = None) -> ExperimentSpec:
    black_policy, red_policy = FORMATION_POLICIES[Formation(formation)]
    return ExperimentSpec(dataset,
                          black=PlayerSpec(strategy, black_policy, iterations=iterations),
                          red=PlayerSpec(strategy, red_policy, iterations=iterations),
                          games=games, budget=budget, master_seed=master_seed)


def token_policy_experiment(formation: Formation | str, dataset: Dataset, games: int,
                            master_seed: int, iterations: int = 1000, strategy: str = "mcts",
                            budget: Optional[int] = None) -> TournamentStats:
    """Both sides search with MCTS; only their donation policies differ
    (Black first in the formation name)."""
    spec = formation_spec(formation, dataset, games, master_seed, iterations, strategy, budget)
    return run_match(spec).stats


# -- output ------------------------------------------------------------------------

def emit_results(records: Sequence[GameRecord], path: str | Path, fmt: Optional[str] = None,
                 black: str = "", red: str = "") -> Path:
    """Write records as CSV or JSON plus a ``.plot.json`` win/loss/draw companion."""
    if not records:
        raise ValueError("no records to emit")
    path = Path(path)
    fmt = fmt or ("json" if path.suffix.lower() == ".json" else "csv")
    records = sorted(records, key=lambda r: r.run_id)
    try:
        if fmt == "csv":
            with path.open("w", newline="") as fh:
                writer = csv.writer(fh, lineterminator="\n")
                writer.writerow(CSV_COLUMNS)
                for r in records:
                    writer.writerow([getattr(r, c) for c in CSV_COLUMNS])
        elif fmt == "json":
            path.write_text(json.dumps([asdict(r) for r in records], indent=1) + "\n")
        else:
            raise ValueError(f"unknown format {fmt!r}")
        stats = TournamentStats()
        for r in records:
            stats.add(r.winner)
        by_starter = {}
        for who in ("black", "red"):
            s = TournamentStats()
            for r in records:
                if r.starter == who:
                    s.add(r.winner)
            if s.games:
                by_starter[who] = [s.w, s.l, s.d]
        plot = {"black": black, "red": red, "overall": [stats.w, stats.l, stats.d],
                "by_starter": by_starter, "rates": stats.to_dict(),
                "budgets": [[r.run_id, r.budget] for r in records]}
        plot_path(path).write_text(json.dumps(plot, indent=1) + "\n")
    except OSError as exc:
        raise OSError(f"cannot write results to {path}: {exc}") from exc
    return path


def plot_path(path: str | Path) -> Path:
    path = Path(path)
    return path.with_suffix(path.suffix + ".plot.json")


def read_results(path: str | Path) -> list[GameRecord]:
    """Parse emitted records. CSV has no budget column, so budgets come from
    the plot companion when it sits next to the file."""
    path = Path(path)
    if path.suffix.lower() == ".json":
        return [GameRecord(**d) for d in json.loads(path.read_text())]
    budgets = {}
    if plot_path(path).exists():
        budgets = dict(map(tuple, json.loads(plot_path(path).read_text()).get("budgets", [])))
    with path.open(newline="") as fh:
        out = []
        for row in csv.DictReader(fh):
            run_id = int(row["run_id"])
            out.append(GameRecord(run_id, row["starter"], row["winner"],
                                  int(row["black_nodes"]), int(row["red_nodes"]), int(row["turns"]),
                                  int(row["graph_n"]), int(row["graph_m"]), int(row["seed"]),
                                  budgets.get(run_id, 0)))
        return out
