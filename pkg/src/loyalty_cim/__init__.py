"""Two-player loyalty-based competitive influence game on graphs, with
threshold, minimax and MCTS strategies and a tournament harness."""

from .engine import (GameConfig, GameResult, GameState, Move, Outcome, PASS, PlayerColor,
                     TokenPolicy, play_game)
from .graph import Graph, new_gameboard

__all__ = ["GameConfig", "GameResult", "GameState", "Graph", "Move", "Outcome", "PASS",
           "PlayerColor", "TokenPolicy", "new_gameboard", "play_game"]
__version__ = "0.1.0"
