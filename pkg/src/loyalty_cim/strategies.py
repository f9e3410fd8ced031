"""Baseline opponents: random, min/max threshold and depth-limited minimax.

A strategy is any callable ``(state, player, excluded, rng)`` returning a
node id, a ``(node, amount)`` pair, or None when it has nothing to offer.
Ties are always broken toward the lower node id.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass, field
from typing import Optional


from .engine import GameState, Move, PASS, PlayerColor, eligible_nodes, legal_moves, play_move
from .heuristics import DEFAULT_WEIGHTS, HeuristicWeights


def _candidates(state: GameState, player: PlayerColor, excluded) -> list[int]:
    return sorted(eligible_nodes(state, player) - set(excluded))


def random_strategy(state: GameState, player: PlayerColor, excluded=frozenset(),
                    rng: Optional[random.Random] = None) -> Optional[int]:
    cands = _candidates(state, player, excluded)
    if not cands:
        return None
    return (rng or random).choice(cands)


def min_threshold_strategy(state: GameState, player: PlayerColor, excluded=frozenset(),
                           rng=None) -> Optional[int]:
    cands = _candidates(state, player, excluded)
    if not cands:
        return None
    return min(cands, key=lambda v: (state.theta[v], v))


def max_threshold_strategy(state: GameState, player: PlayerColor, excluded=frozenset(),
                           rng=None) -> Optional[int]:
    cands = _candidates(state, player, excluded)
    if not cands:
        return None
    return min(cands, key=lambda v: (-state.theta[v], v))


# -- minimax ----------------------------------------------------------------------

@dataclass(frozen=True)
class MinimaxConfig:
    depth: int = 4
    weights: HeuristicWeights = field(default=DEFAULT_WEIGHTS)
    parity_coef: float = 0.01

    def __post_init__(self):
        if self.depth < 1:
            raise ValueError("minimax depth must be >= 1")


def fire_moves(state: GameState, player: PlayerColor, excluded=()) -> list[Move]:
    """Affordable fire-at-capacity moves, ascending node id."""
    saved = state.policies.copy()
    state.policies[player - 1] = 0
    try:
        return legal_moves(state, player, excluded)
    finally:
        state.policies[:] = saved


def evaluate(state: GameState, player: PlayerColor, cfg: MinimaxConfig = MinimaxConfig()) -> float:
    """Node-count lead plus a small token-parity term that only breaks ties.

    The parity term is the mean over non-isolated nodes of
    (own - opponent tokens) / theta, so it lies in [-1, 1] and is scaled by
    ``parity_coef``.
    """
    red, black = state.counts()
    lead = (red - black) if player == PlayerColor.RED else (black - red)
    live = state.graph.degree > 0
    if not live.any():
        return float(lead)
    own, opp = state.tok[player - 1], state.tok[2 - player]
    parity = ((own - opp)[live] / state.theta[live]).mean()
    return lead + cfg.parity_coef * float(parity)


def _value(state: GameState, root: PlayerColor, depth: int, alpha: float, beta: float,
           cfg: MinimaxConfig, prune: bool) -> float:
    if depth == 0 or state.is_over():
        return evaluate(state, root, cfg)
    mover = state.to_move
    moves = fire_moves(state, mover) or [PASS]
    maximizing = mover == root
    best = -math.inf if maximizing else math.inf
    for mv in moves:
        child = state.copy()
        play_move(child, mv)
        val = _value(child, root, depth - 1, alpha, beta, cfg, prune)
        if maximizing:
            best = max(best, val)
            alpha = max(alpha, best)
        else:
            best = min(best, val)
            beta = min(beta, best)
        if prune and alpha >= beta:
            break
    return best


def minimax_search(state: GameState, player: PlayerColor, cfg: MinimaxConfig = MinimaxConfig(),
                   excluded=(), prune: bool = True) -> tuple[Optional[Move], float]:
    """Best root move for ``player`` and its value. The move is None when
    nothing is affordable."""
    if state.to_move != player:
        state = state.copy()
        state.to_move = player
    moves = fire_moves(state, player, excluded)
    if not moves:
        return None, _value(state, player, cfg.depth, -math.inf, math.inf, cfg, prune)
    alpha, beta = -math.inf, math.inf
    best_move, best = None, -math.inf
    for mv in moves:
        child = state.copy()
        play_move(child, mv)
        val = _value(child, player, cfg.depth - 1, alpha, beta, cfg, prune)
        if val > best:
            best, best_move = val, mv
        alpha = max(alpha, best)
    return best_move, best


def minimax_ab(state: GameState, player: PlayerColor,
               cfg: MinimaxConfig = MinimaxConfig(), excluded=()) -> Optional[int]:
    move, _ = minimax_search(state, player, cfg, excluded)
    return None if move is None else move.node


class MinimaxStrategy:
    def __init__(self, cfg: MinimaxConfig = MinimaxConfig()):
        self.cfg = cfg

    def __call__(self, state, player, excluded=frozenset(), rng=None):
        return minimax_ab(state, player, self.cfg, excluded)
