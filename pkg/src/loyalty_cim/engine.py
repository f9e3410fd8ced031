"""Game state, loyalty diffusion with cascades, and the turn loop."""

from __future__ import annotations

import enum
import json
import random
from dataclasses import dataclass, field
from typing import Callable, Iterable, NamedTuple, Optional, Union

import numpy as np

from . import _kernels as K
from .graph import Graph, NodeAttrs, NodeState
from .seeds import derive_seed


class IllegalMove(ValueError):
    """A donation that violates the move preconditions. State is unchanged."""


class PlayerColor(enum.IntEnum):
    RED = 1
    BLACK = 2

    @property
    def opponent(self) -> "PlayerColor":
        return PlayerColor(3 - self)

    def __str__(self) -> str:
        return self.name.lower()


class TokenPolicy(enum.IntEnum):
    FIRE_CAPACITY = K.FIRE
    ONE_TOKEN = K.ONE_TOKEN
    CHOSEN_AMOUNT = K.CHOOSE


class Outcome(enum.Enum):
    RED_WIN = "red"
    BLACK_WIN = "black"
    DRAW = "draw"


_OUTCOME_CODES = {K.DRAW: Outcome.DRAW, K.RED_WIN: Outcome.RED_WIN, K.BLACK_WIN: Outcome.BLACK_WIN}


class Move(NamedTuple):
    """``node is None`` means pass."""
    node: Optional[int] = None
    amount: int = 0

    @property
    def is_pass(self) -> bool:
        return self.node is None

    def __str__(self) -> str:
        return "pass" if self.node is None else f"{self.node}:{self.amount}"


PASS = Move()


@dataclass
class GameConfig:
    budget_red: int
    budget_black: int
    policy_red: TokenPolicy = TokenPolicy.FIRE_CAPACITY
    policy_black: TokenPolicy = TokenPolicy.FIRE_CAPACITY
    starter: PlayerColor = PlayerColor.BLACK
    safety_turn_cap: Optional[int] = None   # None -> 10 * n
    theta_growth: int = 1

    def __post_init__(self):
        if self.budget_red < 0 or self.budget_black < 0:
            raise ValueError("budgets must be non-negative")
        if self.safety_turn_cap is not None and self.safety_turn_cap < 1:
            raise ValueError("safety_turn_cap must be >= 1")
        if self.theta_growth < 0:
            raise ValueError("theta_growth must be >= 0")
        self.policy_red = TokenPolicy(self.policy_red)
        self.policy_black = TokenPolicy(self.policy_black)
        self.starter = PlayerColor(self.starter)

    @classmethod
    def for_graph(cls, g: Graph, budget: Optional[int] = None, **kw) -> "GameConfig":
        b = g.n if budget is None else budget
        return cls(budget_red=b, budget_black=b, **kw)

    def swapped(self) -> "GameConfig":
        """Same game with the colors exchanged."""
        return GameConfig(self.budget_black, self.budget_red, self.policy_black,
                          self.policy_red, self.starter.opponent, self.safety_turn_cap,
                          self.theta_growth)


class GameState:
    """Mutable per-game position on top of an immutable Graph."""

    def __init__(self, graph: Graph, cfg: GameConfig):
        self.graph = graph
        self.theta = graph.degree.copy()
        self.tok = np.zeros((2, graph.n), dtype=np.int64)
        self.color = np.zeros(graph.n, dtype=np.int8)
        self.budgets = np.array([cfg.budget_red, cfg.budget_black], dtype=np.int64)
        self.policies = np.array([cfg.policy_red, cfg.policy_black], dtype=np.int64)
        self.to_move = cfg.starter
        self.consecutive_passes = 0
        self.turn_index = 0
        self.turn_cap = cfg.safety_turn_cap if cfg.safety_turn_cap is not None else 10 * graph.n
        self.growth = cfg.theta_growth
        self.initial_total = cfg.budget_red + cfg.budget_black

    def copy(self) -> "GameState":
        s = object.__new__(GameState)
        s.__dict__.update(self.__dict__)
        s.theta = self.theta.copy()
        s.tok = self.tok.copy()
        s.color = self.color.copy()
        s.budgets = self.budgets.copy()
        return s

    @property
    def red_tokens(self) -> np.ndarray:
        return self.tok[0]

    @property
    def black_tokens(self) -> np.ndarray:
        return self.tok[1]

    def budget(self, player: PlayerColor) -> int:
        return int(self.budgets[player - 1])

    def policy(self, player: PlayerColor) -> TokenPolicy:
        return TokenPolicy(int(self.policies[player - 1]))

    def attrs(self, v: int) -> NodeAttrs:
        self.graph._check(v)
        return NodeAttrs(int(self.theta[v]), int(self.tok[0, v]), int(self.tok[1, v]),
                         NodeState(int(self.color[v])))

    def counts(self) -> tuple[int, int]:
        """(red_nodes, black_nodes)."""
        return int(np.count_nonzero(self.color == K.RED)), int(np.count_nonzero(self.color == K.BLACK))

    def is_over(self) -> bool:
        return (self.consecutive_passes >= 2
                or (self.budgets[0] == 0 and self.budgets[1] == 0)
                or self.turn_index >= self.turn_cap)

    def tokens_in_play(self) -> int:
        return int(self.tok.sum() + self.budgets.sum())


# -- diffusion ------------------------------------------------------------------

Activation = tuple[int, PlayerColor]


def _events(nodes, colors) -> list[Activation]:
    return [(int(v), PlayerColor(int(c))) for v, c in zip(nodes, colors)]


def capacity(state: GameState, v: int) -> int:
    """Tokens still needed to fire v: theta - (red + black), floored at 0."""
    state.graph._check(v)
    return max(0, int(state.theta[v] - state.tok[0, v] - state.tok[1, v]))


def eligible_nodes(state: GameState, player: PlayerColor) -> set[int]:
    """Non-isolated nodes that are inactive or held by the opponent."""
    ok = (state.graph.degree > 0) & (state.color != player)
    return set(np.flatnonzero(ok).tolist())


def activate(state: GameState, v: int, color: PlayerColor) -> list[Activation]:
    """Fire a single node and return the (node, color) entries it leaves pending.

    Does not process the pending entries; see process_cascade.
    """
    g = state.graph
    g._check(v)
    if g.degree[v] == 0 or state.tok[0, v] + state.tok[1, v] < state.theta[v]:
        raise RuntimeError(f"activate called on node {v} below its threshold")
    pending = np.empty(int(g.degree.max()) + 1, dtype=np.int64)
    k = K.activate(g.indptr, g.indices, g.degree, state.theta, state.tok, state.color,
                   int(v), int(color), state.growth, pending)
    return [(int(u), PlayerColor(color)) for u in pending[:k]]


def process_cascade(state: GameState, queue: Iterable[Activation]) -> list[Activation]:
    """Run pending activations FIFO until quiescent; returns activations in order."""
    queue = list(queue)
    if not queue:
        return []
    g = state.graph
    nodes = np.array([v for v, _ in queue], dtype=np.int64)
    colors = np.array([int(c) for _, c in queue], dtype=np.int64)
    ev_n, ev_c = K.cascade(g.indptr, g.indices, g.degree, state.theta, state.tok,
                           state.color, state.growth, nodes, colors)
    return _events(ev_n, ev_c)


def apply_donation(state: GameState, player: PlayerColor, v: int, t: int) -> list[Activation]:
    """Give t of the player's tokens to v and resolve any cascade."""
    g = state.graph
    if v not in g:
        raise IllegalMove(f"unknown node {v!r}")
    if g.degree[v] == 0 or state.color[v] == player:
        raise IllegalMove(f"node {v} is not eligible for {player}")
    cap = capacity(state, v)
    if not 1 <= t <= cap:
        raise IllegalMove(f"amount {t} outside [1, {cap}] for node {v}")
    if t > state.budgets[player - 1]:
        raise IllegalMove(f"{player} has {state.budget(player)} tokens, needs {t}")
    ev_n, ev_c = K.donate(g.indptr, g.indices, g.degree, state.theta, state.tok, state.color,
                          state.budgets, state.growth, int(player), int(v), int(t))
    return _events(ev_n, ev_c)


def donation_amount(state: GameState, player: PlayerColor, v: int,
                    requested: Optional[int] = None) -> int:
    """Amount the player's token policy donates to v (may exceed the budget)."""
    policy = state.policy(player)
    cap = capacity(state, v)
    if policy is TokenPolicy.ONE_TOKEN:
        return 1
    if policy is TokenPolicy.CHOSEN_AMOUNT:
        t = cap if requested is None else requested
        return max(1, min(int(t), cap, state.budget(player)))
    return cap


def legal_pairs(state: GameState, player: PlayerColor,
                excluded: Iterable[int] = ()) -> list[tuple[int, int]]:
    """Affordable (node, amount) pairs under the player's policy, ordered.

    Chosen-amount players get one pair per amount in [1, min(capacity, budget)].
    """
    g = state.graph
    out = np.empty(g.n, dtype=np.int64)
    budget = state.budget(player)
    policy = state.policy(player)
    k = K.affordable_nodes(g.degree, state.theta, state.tok, state.color, int(player),
                           budget, int(policy), out)
    nodes = out[:k]
    caps = (state.theta[nodes] - state.tok[0, nodes] - state.tok[1, nodes]).tolist()
    pairs = list(zip(nodes.tolist(), caps))
    if excluded:
        skip = set(excluded)
        pairs = [p for p in pairs if p[0] not in skip]
    if policy is TokenPolicy.FIRE_CAPACITY:
        return pairs
    if policy is TokenPolicy.ONE_TOKEN:
        return [(v, 1) for v, _ in pairs]
    return [(v, t) for v, c in pairs for t in range(1, min(c, budget) + 1)]


def legal_moves(state: GameState, player: PlayerColor,
                excluded: Iterable[int] = ()) -> list[Move]:
    return [Move(v, t) for v, t in legal_pairs(state, player, excluded)]


def play_move(state: GameState, move: Move) -> list[Activation]:
    """Apply a move for the side to move and advance the turn bookkeeping."""
    player = state.to_move
    events: list[Activation] = []
    if move.is_pass:
        state.consecutive_passes += 1
    else:
        events = apply_donation(state, player, move.node, move.amount)
        state.consecutive_passes = 0
    state.turn_index += 1
    state.to_move = player.opponent
    return events


# -- turns and games -------------------------------------------------------------

StrategyReply = Union[int, tuple[int, int], None]
Strategy = Callable[[GameState, PlayerColor, frozenset, random.Random], StrategyReply]


def _choose(state: GameState, player: PlayerColor, strategy: Strategy,
            rng: random.Random) -> Move:
    """Query the strategy until it names an affordable node or runs out."""
    budget = state.budget(player)
    if budget <= 0:
        return PASS
    eligible = eligible_nodes(state, player)
    tried: set[int] = set()
    for _ in range(len(eligible) + 1):
        reply = strategy(state, player, frozenset(tried), rng)
        if reply is None:
            break
        if isinstance(reply, Move):
            if reply.is_pass:
                break
            reply = (reply.node, reply.amount)
        node, requested = (reply if isinstance(reply, tuple) else (reply, None))
        if node in tried:
            break
        tried.add(node)
        if node not in eligible:
            continue
        amount = donation_amount(state, player, node, requested)
        if amount <= budget:
            return Move(int(node), amount)
    return PASS


def take_turn(state: GameState, player: PlayerColor, strategy: Strategy,
              rng: random.Random) -> Move:
    if player != state.to_move:
        raise IllegalMove(f"it is {state.to_move}'s turn, not {player}'s")
    move = _choose(state, player, strategy, rng)
    play_move(state, move)
    return move


@dataclass
class TurnRecord:
    turn_index: int
    player: PlayerColor
    move: Move
    activations: list[Activation]

    def to_dict(self) -> dict:
        return {
            "turn_index": self.turn_index,
            "player": str(self.player),
            "move": None if self.move.is_pass else {"node": self.move.node, "amount": self.move.amount},
            "activations": [[v, str(c)] for v, c in self.activations],
        }

    def to_line(self) -> str:
        acts = " ".join(f"{v}:{c}" for v, c in self.activations) or "-"
        return f"{self.turn_index}\t{self.player}\t{self.move}\t{acts}"


@dataclass
class GameResult:
    outcome: Outcome
    red_nodes: int
    black_nodes: int
    turns: int
    trace: list[Move] = field(default_factory=list)
    records: list[TurnRecord] = field(default_factory=list)

    def trace_text(self) -> str:
        return "\n".join(r.to_line() for r in self.records) + "\n"

    def trace_json(self) -> str:
        return json.dumps({
            "outcome": self.outcome.value,
            "red_nodes": self.red_nodes,
            "black_nodes": self.black_nodes,
            "turns": self.turns,
            "records": [r.to_dict() for r in self.records],
        }, indent=1)


def winner(state: GameState) -> Outcome:
    """Strict node-count majority; equal counts are a draw."""
    return _OUTCOME_CODES[K.outcome(state.color)]


def player_rngs(seed) -> tuple[random.Random, random.Random]:
    """(red, black) random streams; ``seed`` is an int or a (red, black) pair."""
    if isinstance(seed, tuple):
        red_seed, black_seed = seed
    else:
        red_seed, black_seed = derive_seed(seed, "red"), derive_seed(seed, "black")
    return random.Random(red_seed), random.Random(black_seed)


def play_game(graph: Graph, cfg: GameConfig, strat_red: Strategy, strat_black: Strategy,
              seed) -> GameResult:
    state = GameState(graph, cfg)
    rngs = dict(zip((PlayerColor.RED, PlayerColor.BLACK), player_rngs(seed)))
    strategies = {PlayerColor.RED: strat_red, PlayerColor.BLACK: strat_black}
    records = []
    while not state.is_over():
        player = state.to_move
        turn = state.turn_index
        move = _choose(state, player, strategies[player], rngs[player])
        events = play_move(state, move)
        records.append(TurnRecord(turn, player, move, events))
    red, black = state.counts()
    return GameResult(winner(state), red, black, state.turn_index,
                      [r.move for r in records], records)
