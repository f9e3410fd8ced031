"""Node-scoring heuristics and their weighted combination.

Four raw scores per candidate node, from the mover's point of view:

* parity   -- own tokens minus opponent tokens on the node
* weak     -- sum of 1/degree over the node's neighbors (hubs with weak neighbors)
* low      -- 1/theta, doubled (``nlt_bonus``) when the opponent holds the node
* verge    -- degree / (capacity + 1) (hubs close to firing)

Each column is min-max normalized over the candidate set (a constant column
becomes 0.5) before the weighted sum.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable

import numpy as np

from . import _kernels as K
from .engine import GameState, PlayerColor, capacity


@dataclass(frozen=True)
class HeuristicWeights:
    alpha: float = 0.25   # parity
    beta: float = 0.25    # weak neighbors
    gamma: float = 0.25   # low threshold
    lam: float = 0.25     # verge of activation

    def __post_init__(self):
        vals = self.as_array()
        if (vals < 0).any():
            raise ValueError(f"weights must be non-negative: {self}")
        if abs(vals.sum() - 1.0) > 1e-9:
            raise ValueError(f"weights must sum to 1, got {vals.sum()!r}")

    def as_array(self) -> np.ndarray:
        return np.array([self.alpha, self.beta, self.gamma, self.lam], dtype=np.float64)


DEFAULT_WEIGHTS = HeuristicWeights()
DEFAULT_NLT_BONUS = 2.0


@dataclass(frozen=True)
class ScoredNode:
    node: int
    ph: float
    hwn: float
    nlt: float
    hva: float
    final: float


def ph(state: GameState, v: int, player: PlayerColor) -> float:
    own, opp = player - 1, 2 - player
    return float(state.tok[own, v] - state.tok[opp, v])


def hwn(g, v: int) -> float:
    return float(g.inverse_degree_sums[v])


def nlt(state: GameState, v: int, player: PlayerColor, bonus: float = DEFAULT_NLT_BONUS) -> float:
    theta = state.theta[v]
    if theta < 1:
        return 0.0
    b = bonus if state.color[v] == player.opponent else 1.0
    return b / float(theta)


def hva(state: GameState, v: int) -> float:
    return float(state.graph.degree[v]) / (capacity(state, v) + 1)


def final_metric(state: GameState, candidates: Iterable[int], player: PlayerColor,
                 w: HeuristicWeights = DEFAULT_WEIGHTS,
                 nlt_bonus: float = DEFAULT_NLT_BONUS) -> list[ScoredNode]:
    """Score candidates and return them best first (ties to the lower id)."""
    cands = np.array(sorted(set(int(v) for v in candidates)), dtype=np.int64)
    if cands.size == 0:
        raise ValueError("final_metric needs at least one candidate")
    k = cands.size
    g = state.graph
    raw = np.empty((k, 4), dtype=np.float64)
    final = np.empty(k, dtype=np.float64)
    K.score_candidates(cands, k, g.degree, state.theta, state.tok, state.color, int(player),
                       g.inverse_degree_sums, w.as_array(), float(nlt_bonus), raw, final)
    scored = [ScoredNode(int(cands[i]), *map(float, raw[i]), float(final[i])) for i in range(k)]
    scored.sort(key=lambda s: (-s.final, s.node))
    return scored
