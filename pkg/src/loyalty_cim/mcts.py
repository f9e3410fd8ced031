"""Monte Carlo tree search with random or epsilon-greedy heuristic rollouts.

With ``rollout="random"`` this is plain UCT MCTS. With ``"eps-greedy"`` the
playouts pick the best heuristic node with probability epsilon and one of
the others uniformly otherwise.

Each tree node stores its score from the point of view of the player who
moved into it, so UCT at a parent always maximizes for the side to move.
"""

from __future__ import annotations

import enum
import math
import random
import time
from dataclasses import dataclass, field
from typing import Optional


from . import _kernels as K
from .engine import GameState, Move, PASS, PlayerColor, legal_pairs, play_move
from .heuristics import DEFAULT_NLT_BONUS, DEFAULT_WEIGHTS, HeuristicWeights


class Rollout(str, enum.Enum):
    RANDOM = "random"
    EPS_GREEDY = "eps-greedy"


class AmountMode(str, enum.Enum):
    FIRE = "fire"
    CHOOSE = "choose"


@dataclass(frozen=True)
class MctsConfig:
    iterations: int = 1000
    time_cap: Optional[float] = None   # seconds
    c: float = math.sqrt(2)
    epsilon: float = 0.7
    rollout: Rollout = Rollout.EPS_GREEDY
    amount_mode: AmountMode = AmountMode.FIRE
    weights: HeuristicWeights = field(default=DEFAULT_WEIGHTS)
    nlt_bonus: float = DEFAULT_NLT_BONUS

    def __post_init__(self):
        object.__setattr__(self, "rollout", Rollout(self.rollout))
        object.__setattr__(self, "amount_mode", AmountMode(self.amount_mode))
        if self.iterations < 1 and self.time_cap is None:
            raise ValueError("need iterations >= 1 or a time cap")
        if not 0.0 <= self.epsilon <= 1.0:
            raise ValueError(f"epsilon must be in [0, 1], got {self.epsilon}")


class SearchNode:
    __slots__ = ("move", "parent", "state", "mover", "player_to_move", "visits",
                 "score_sum", "children", "untried_moves", "terminal")

    def __init__(self, state: GameState, move: Optional[Move] = None,
                 parent: Optional["SearchNode"] = None, moves: Optional[list] = None):
        self.state = state
        self.move = move
        self.parent = parent
        self.mover = parent.player_to_move if parent is not None else None
        self.player_to_move = state.to_move
        self.visits = 0
        self.score_sum = 0.0
        self.children: list[SearchNode] = []
        self.terminal = state.is_over()
        if self.terminal:
            self.untried_moves = []
        elif moves is not None:
            self.untried_moves = list(moves)
        else:
            self.untried_moves = legal_pairs(state, state.to_move) or [PASS]

    @property
    def fully_expanded(self) -> bool:
        return not self.untried_moves and bool(self.children)

    @property
    def mean(self) -> float:
        return self.score_sum / self.visits if self.visits else 0.0

    def __repr__(self) -> str:
        return f"SearchNode(move={self.move}, visits={self.visits}, score={self.score_sum:.1f})"


def uct(child: SearchNode, parent_visits: int, c: float) -> float:
    if child.visits == 0:
        return math.inf
    return child.score_sum / child.visits + c * math.sqrt(math.log(parent_visits) / child.visits)


def best_uct(node: SearchNode, c: float) -> SearchNode:
    best, best_val = node.children[0], -math.inf
    for ch in node.children:
        val = uct(ch, node.visits, c)
        if val > best_val:
            best, best_val = ch, val
    return best


def expand(node: SearchNode, rng: random.Random) -> SearchNode:
    move = Move(*node.untried_moves.pop(rng.randrange(len(node.untried_moves))))
    state = node.state.copy()
    play_move(state, move)
    child = SearchNode(state, move, node)
    node.children.append(child)
    return child


def traverse(root: SearchNode, c: float = math.sqrt(2),
             rng: Optional[random.Random] = None) -> SearchNode:
    """Descend by UCT through fully expanded nodes, then add one child."""
    rng = rng or random.Random(0)
    node = root
    while node.fully_expanded:
        node = best_uct(node, c)
    if node.terminal:
        return node
    return expand(node, rng)


def _result(code: int, player: PlayerColor) -> float:
    if code == K.DRAW:
        return 0.5
    return 1.0 if code == int(player) else 0.0


def rollout(state: GameState, player: PlayerColor, cfg: MctsConfig,
            rng: random.Random) -> float:
    """Play a copy of ``state`` to the end: 1 win, 0.5 draw, 0 loss for ``player``."""
    g = state.graph
    if state.is_over():
        return _result(K.outcome(state.color), player)
    mode = K.ROLLOUT_EPS if cfg.rollout is Rollout.EPS_GREEDY else K.ROLLOUT_RANDOM
    code = K.rollout(rng.randrange(2**32), g.indptr, g.indices, g.degree,
                     g.inverse_degree_sums, state.theta.copy(), state.tok.copy(),
                     state.color.copy(), state.budgets.copy(), int(state.to_move),
                     state.consecutive_passes, state.turn_index, state.turn_cap,
                     state.policies, state.growth, mode, cfg.epsilon,
                     cfg.weights.as_array(), cfg.nlt_bonus)
    return _result(code, player)


def rollout_policy(state: GameState, player: PlayerColor, cfg: MctsConfig,
                   rng: random.Random) -> Move:
    """One playout move under the configured rollout policy; PASS if none."""
    g = state.graph
    mode = K.ROLLOUT_EPS if cfg.rollout is Rollout.EPS_GREEDY else K.ROLLOUT_RANDOM
    v, t = K.seeded_pick(rng.randrange(2**32), g.degree, state.theta, state.tok, state.color,
                         int(player), state.budget(player), int(state.policies[player - 1]),
                         mode, cfg.epsilon, g.inverse_degree_sums, cfg.weights.as_array(),
                         cfg.nlt_bonus)
    return PASS if v < 0 else Move(int(v), int(t))


def backpropagate(leaf: SearchNode, result: float, root_player: PlayerColor) -> None:
    """Add one visit along leaf -> root. ``result`` is for the root player."""
    node = leaf
    while node is not None:
        node.visits += 1
        if node.mover is None or node.mover == root_player:
            node.score_sum += result
        else:
            node.score_sum += 1.0 - result
        node = node.parent


def _move_key(node: SearchNode):
    mv = node.move
    return (-node.visits, -1 if mv.node is None else mv.node, mv.amount)


def best_child(root: SearchNode) -> SearchNode:
    return min(root.children, key=_move_key)


def build_tree(state: GameState, player: PlayerColor, cfg: MctsConfig, rng: random.Random,
               excluded=()) -> SearchNode:
    """Run the search and return the root (for inspection)."""
    root_state = state.copy()
    root_state.to_move = player
    moves = legal_pairs(root_state, player, excluded)
    root = SearchNode(root_state, moves=moves or [PASS])
    deadline = None if cfg.time_cap is None else time.perf_counter() + cfg.time_cap
    done = 0
    while True:
        if cfg.iterations >= 1 and done >= cfg.iterations:
            break
        if deadline is not None and time.perf_counter() >= deadline:
            break
        leaf = traverse(root, cfg.c, rng)
        backpropagate(leaf, rollout(leaf.state, player, cfg, rng), player)
        done += 1
    return root


def search(state: GameState, player: PlayerColor, cfg: MctsConfig = MctsConfig(),
           rng: Optional[random.Random] = None, excluded=()) -> Move:
    rng = rng or random.Random(0)
    root_state = state.copy()
    root_state.to_move = player
    moves = legal_pairs(root_state, player, excluded)
    if not moves:
        return PASS
    if len(moves) == 1:
        return Move(*moves[0])
    root = build_tree(state, player, cfg, rng, excluded)
    return best_child(root).move


class MctsStrategy:
    """Strategy adapter: returns ``(node, amount)`` or None."""

    def __init__(self, cfg: MctsConfig = MctsConfig()):
        self.cfg = cfg

    def __call__(self, state, player, excluded=frozenset(), rng=None):
        move = search(state, player, self.cfg, rng, excluded)
        return None if move.is_pass else (move.node, move.amount)
