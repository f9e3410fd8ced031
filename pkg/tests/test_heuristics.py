import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from loyalty_cim import _kernels as K
from loyalty_cim.engine import GameConfig, GameState, PlayerColor
from loyalty_cim.graph import generate_er, new_gameboard
from loyalty_cim.heuristics import HeuristicWeights, final_metric, hva, hwn, nlt, ph

RED, BLACK = PlayerColor.RED, PlayerColor.BLACK
STAR = [(0, 1), (0, 2), (0, 3), (0, 4)]


def board(edges, n=None):
    g = new_gameboard(edges, n)
    return GameState(g, GameConfig.for_graph(g))


class TestWeights:
    def test_default(self):
        assert HeuristicWeights().as_array().tolist() == [0.25] * 4

    @pytest.mark.parametrize("vals", [(0.5, 0.5, 0.5, 0.0), (1.2, -0.2, 0.0, 0.0)])
    def test_invalid(self, vals):
        with pytest.raises(ValueError):
            HeuristicWeights(*vals)


class TestRawScores:
    def test_ph(self):
        s = board(STAR)
        s.tok[1, 0], s.tok[0, 0] = 3, 1
        assert ph(s, 0, BLACK) == 2
        assert ph(s, 0, RED) == -2
        assert ph(s, 1, BLACK) == 0

    def test_hwn(self):
        g = new_gameboard(STAR + [(5, 6), (6, 7), (6, 8), (6, 9)])
        assert hwn(g, 0) == pytest.approx(4.0)
        assert hwn(g, 1) == pytest.approx(0.25)
        assert hwn(g, 5) == pytest.approx(0.25)
        assert hwn(new_gameboard([(0, 1)], n=3), 2) == 0.0

    def test_nlt(self):
        s = board(STAR)
        assert nlt(s, 0, BLACK) == pytest.approx(0.25)
        s.color[0] = RED
        assert nlt(s, 0, BLACK) == pytest.approx(0.5)
        assert nlt(s, 1, BLACK) == pytest.approx(1.0)

    def test_hva(self):
        g = new_gameboard([(0, v) for v in range(1, 6)], n=7)
        s = GameState(g, GameConfig.for_graph(g))
        assert hva(s, 0) == pytest.approx(5 / 6)
        s.tok[0, 0] = 5
        assert hva(s, 0) == pytest.approx(5.0)
        s.tok[0, 0] = 1
        assert hva(s, 0) == pytest.approx(1.0)
        assert hva(s, 6) == 0.0


def spreadsheet(raw, weights=(0.25, 0.25, 0.25, 0.25)):
    """Column-wise min-max then weighted sum, written out by hand."""
    cols = list(zip(*raw))
    normed = []
    for col in cols:
        lo, hi = min(col), max(col)
        normed.append([0.5 if hi == lo else (x - lo) / (hi - lo) for x in col])
    return [sum(w * normed[j][i] for j, w in enumerate(weights)) for i in range(len(raw))]


class TestFinalMetric:
    def test_single_candidate(self):
        (only,) = final_metric(board(STAR), [3], BLACK)
        assert only.node == 3 and only.final == 0.5

    def test_empty(self):
        with pytest.raises(ValueError):
            final_metric(board(STAR), [], BLACK)

    def test_dominant_first(self):
        edges = STAR + [(5, v) for v in range(6, 11)] + [(6, 7), (8, 9), (10, 6)]
        s = board(edges)
        s.tok[1, 0] = 3
        ranked = final_metric(s, [5, 0], BLACK)
        a, b = ranked
        assert a.node == 0
        assert a.ph > b.ph and a.hwn > b.hwn and a.nlt > b.nlt and a.hva > b.hva
        assert (a.final, b.final) == (1.0, 0.0)

    def test_star_hand_computed(self):
        s = board(STAR)
        s.tok[1, 0], s.tok[0, 0] = 1, 2      # center: theta 4, black 1, red 2
        s.theta[1], s.color[1] = 2, RED      # leaf 1 held by red
        ranked = final_metric(s, [0, 1, 2], BLACK)
        raw = [
            (1 - 2, 4 * 1.0, 1 / 4, 4 / (1 + 1)),
            (0, 1 / 4, 2 / 2, 1 / (2 + 1)),
            (0, 1 / 4, 1 / 1, 1 / (1 + 1)),
        ]
        expected = spreadsheet(raw)
        assert expected == pytest.approx([0.5, 0.5, 0.525])
        assert [r.node for r in ranked] == [2, 0, 1]
        by_node = {r.node: r for r in ranked}
        for v, row, fin in zip([0, 1, 2], raw, expected):
            got = by_node[v]
            assert (got.ph, got.hwn, got.nlt, got.hva) == pytest.approx(row)
            assert got.final == pytest.approx(fin, abs=1e-12)

    def test_custom_weights_and_bonus(self):
        s = board(STAR)
        s.color[1] = RED
        ranked = final_metric(s, [1, 2], BLACK, HeuristicWeights(0, 0, 1, 0), nlt_bonus=3.0)
        assert ranked[0].node == 1 and ranked[0].nlt == pytest.approx(3.0)


@st.composite
def positions(draw):
    seed = draw(st.integers(0, 10**6))
    g = generate_er(draw(st.integers(4, 14)), 0.4, seed)
    s = GameState(g, GameConfig.for_graph(g))
    rng = np.random.default_rng(seed)
    s.tok[:] = rng.integers(0, 2, size=s.tok.shape) * (g.degree > 1)
    s.color[:] = rng.integers(0, 3, size=g.n) * (g.degree > 0)
    s.theta[:] = g.degree + rng.integers(0, 3, size=g.n) * (g.degree > 0)
    return s


class TestProperties:
    @settings(max_examples=150, deadline=None)
    @given(positions(), st.sampled_from([RED, BLACK]))
    def test_range_and_pareto(self, s, player):
        cands = [v for v in range(s.graph.n) if s.graph.degree[v] > 0]
        if not cands:
            return
        ranked = final_metric(s, cands, player)
        assert all(0.0 <= r.final <= 1.0 for r in ranked)
        assert [r.final for r in ranked] == sorted((r.final for r in ranked), reverse=True)
        for a in ranked:
            for b in ranked:
                ra = (a.ph, a.hwn, a.nlt, a.hva)
                rb = (b.ph, b.hwn, b.nlt, b.hva)
                if all(x >= y for x, y in zip(ra, rb)) and ra != rb:
                    assert a.final >= b.final - 1e-12

    @settings(max_examples=150, deadline=None)
    @given(positions())
    def test_ph_antisymmetry(self, s):
        for v in range(s.graph.n):
            assert ph(s, v, RED) == -ph(s, v, BLACK)

    @settings(max_examples=150, deadline=None)
    @given(st.lists(st.floats(-50, 50), min_size=1, max_size=12), st.floats(0.01, 100))
    def test_scaling_keeps_order(self, col, factor):
        a = np.array(col)
        b = a * factor
        K._normalize(a, a.size)
        K._normalize(b, b.size)
        assert np.all((a <= 1) & (a >= 0))
        np.testing.assert_allclose(a, b, atol=1e-9)
