"""Compiled hot paths for the token game.

All state lives in flat numpy arrays so the same code serves the public
engine API and the MCTS rollouts:

    theta   int64[n]     current thresholds
    tok     int64[2, n]  row 0 red tokens, row 1 black tokens
    color   int8[n]      0 inactive, 1 red, 2 black
    budgets int64[2]     remaining tokens, indexed by color - 1

Graphs are CSR (indptr, indices) with neighbor lists sorted ascending.
Functions that mutate arrays do so in place.
"""

import numpy as np
from numba import njit

INACTIVE = 0
RED = 1
BLACK = 2

FIRE = 0
ONE_TOKEN = 1
CHOOSE = 2

ROLLOUT_RANDOM = 0
ROLLOUT_EPS = 1

DRAW = 0
RED_WIN = 1
BLACK_WIN = 2


@njit(cache=True)
def spread_order(indptr, indices, theta, v):
    """Neighbors of v by theta descending, ties by lower id."""
    nb = indices[indptr[v]:indptr[v + 1]].copy()
    for i in range(1, nb.size):
        x = nb[i]
        j = i - 1
        while j >= 0 and (theta[nb[j]] < theta[x]
                          or (theta[nb[j]] == theta[x] and nb[j] > x)):
            nb[j + 1] = nb[j]
            j -= 1
        nb[j + 1] = x
    return nb


@njit(cache=True)
def activate(indptr, indices, deg, theta, tok, color, v, c, growth, pending):
    """Fire node v for color c.

    Writes nodes that are at or above threshold afterwards into `pending`
    (neighbors in spread order, then v itself) and returns their count.
    """
    own = c - 1
    opp = 2 - c
    color[v] = c
    tok[own, v] += tok[opp, v]
    tok[opp, v] = 0
    d = deg[v]
    if theta[v] == d:
        order = indices[indptr[v]:indptr[v + 1]].copy()
        for n in order:
            tok[own, n] += 1
            tok[own, v] -= 1
    else:
        order = spread_order(indptr, indices, theta, v)
        while tok[own, v] > 0:
            for n in order:
                tok[own, n] += 1
                tok[own, v] -= 1
                if tok[own, v] == 0:
                    break
    theta[v] += growth * d
    k = 0
    for n in order:
        if tok[0, n] + tok[1, n] >= theta[n]:
            pending[k] = n
            k += 1
    if d > 0 and tok[0, v] + tok[1, v] >= theta[v]:
        pending[k] = v
        k += 1
    return k


@njit(cache=True)
def cascade(indptr, indices, deg, theta, tok, color, growth, init_nodes, init_colors):
    """FIFO activation cascade; entries are re-checked when dequeued.

    Returns (event_nodes, event_colors) in processed order.
    """
    cap = max(16, 2 * init_nodes.size)
    qn = np.empty(cap, np.int64)
    qc = np.empty(cap, np.int64)
    tail = 0
    for i in range(init_nodes.size):
        qn[tail] = init_nodes[i]
        qc[tail] = init_colors[i]
        tail += 1
    head = 0
    ev_n = np.empty(16, np.int64)
    ev_c = np.empty(16, np.int64)
    nev = 0
    maxdeg = 0
    for i in range(deg.size):
        if deg[i] > maxdeg:
            maxdeg = deg[i]
    pending = np.empty(maxdeg + 1, np.int64)
    while head < tail:
        v = qn[head]
        c = qc[head]
        head += 1
        if tok[0, v] + tok[1, v] < theta[v] or deg[v] == 0:
            continue
        if nev == ev_n.size:
            ev_n2 = np.empty(2 * nev, np.int64)
            ev_c2 = np.empty(2 * nev, np.int64)
            ev_n2[:nev] = ev_n
            ev_c2[:nev] = ev_c
            ev_n = ev_n2
            ev_c = ev_c2
        ev_n[nev] = v
        ev_c[nev] = c
        nev += 1
        k = activate(indptr, indices, deg, theta, tok, color, v, c, growth, pending)
        if tail + k > qn.size:
            live = tail - head
            new_cap = max(qn.size, 2 * (live + k))
            qn2 = np.empty(new_cap, np.int64)
            qc2 = np.empty(new_cap, np.int64)
            qn2[:live] = qn[head:tail]
            qc2[:live] = qc[head:tail]
            qn = qn2
            qc = qc2
            head = 0
            tail = live
        for i in range(k):
            qn[tail] = pending[i]
            qc[tail] = c
            tail += 1
    return ev_n[:nev], ev_c[:nev]


@njit(cache=True)
def donate(indptr, indices, deg, theta, tok, color, budgets, growth, player, v, t):
    budgets[player - 1] -= t
    tok[player - 1, v] += t
    init_n = np.empty(1, np.int64)
    init_c = np.empty(1, np.int64)
    init_n[0] = v
    init_c[0] = player
    if tok[0, v] + tok[1, v] >= theta[v]:
        return cascade(indptr, indices, deg, theta, tok, color, growth, init_n, init_c)
    return init_n[:0], init_c[:0]


@njit(cache=True)
def affordable_nodes(deg, theta, tok, color, player, budget, policy, out):
    """Fill `out` with nodes the player can legally fund; return the count."""
    k = 0
    if budget <= 0:
        return 0
    for v in range(deg.size):
        if deg[v] == 0 or color[v] == player:
            continue
        cap = theta[v] - tok[0, v] - tok[1, v]
        if cap < 1:
            continue
        if policy == FIRE and cap > budget:
            continue
        out[k] = v
        k += 1
    return k


@njit(cache=True)
def _normalize(col, k):
    lo = col[0]
    hi = col[0]
    for i in range(1, k):
        if col[i] < lo:
            lo = col[i]
        if col[i] > hi:
            hi = col[i]
    span = hi - lo
    for i in range(k):
        if span <= 0.0:
            col[i] = 0.5
        else:
            col[i] = (col[i] - lo) / span


@njit(cache=True)
def score_candidates(cands, k, deg, theta, tok, color, player, hwn, weights,
                     nlt_bonus, raw, final):
    """Raw heuristic columns into raw[:k, 0..3], weighted normalized sum into final[:k]."""
    own = player - 1
    opp = 2 - player
    for i in range(k):
        v = cands[i]
        raw[i, 0] = tok[own, v] - tok[opp, v]
        raw[i, 1] = hwn[v]
        if theta[v] >= 1:
            b = nlt_bonus if color[v] == 3 - player else 1.0
            raw[i, 2] = b / theta[v]
        else:
            raw[i, 2] = 0.0
        cap = theta[v] - tok[0, v] - tok[1, v]
        if cap < 0:
            cap = 0
        raw[i, 3] = deg[v] / (cap + 1.0)
    norm = raw[:k].copy()
    for j in range(4):
        col = norm[:, j].copy()
        _normalize(col, k)
        norm[:, j] = col
    for i in range(k):
        s = 0.0
        for j in range(4):
            s += weights[j] * norm[i, j]
        final[i] = s
    return norm


@njit(cache=True)
def eps_greedy_index(k, top, eps):
    if k == 1 or np.random.random() < eps:
        return top
    r = np.random.randint(0, k - 1)
    return r if r < top else r + 1


@njit(cache=True)
def top_index(final, k):
    best = 0
    for i in range(1, k):
        if final[i] > final[best]:
            best = i
    return best


@njit(cache=True)
def pick_move(deg, theta, tok, color, player, budget, policy, mode, eps, hwn,
              weights, nlt_bonus, cands, raw, final):
    """One rollout-policy move for `player`. Returns (node, amount); node -1 is a pass."""
    k = affordable_nodes(deg, theta, tok, color, player, budget, policy, cands)
    if k == 0:
        return -1, 0
    if mode == ROLLOUT_EPS:
        score_candidates(cands, k, deg, theta, tok, color, player, hwn, weights,
                         nlt_bonus, raw, final)
        idx = eps_greedy_index(k, top_index(final, k), eps)
    else:
        idx = np.random.randint(0, k)
    v = cands[idx]
    cap = theta[v] - tok[0, v] - tok[1, v]
    if policy == FIRE:
        t = cap
    elif policy == ONE_TOKEN:
        t = 1
    else:
        t = np.random.randint(1, min(cap, budget) + 1)
    return v, t


@njit(cache=True)
def seeded_pick(seed, deg, theta, tok, color, player, budget, policy, mode, eps,
                hwn, weights, nlt_bonus):
    np.random.seed(seed)
    n = deg.size
    cands = np.empty(n, np.int64)
    raw = np.empty((n, 4), np.float64)
    final = np.empty(n, np.float64)
    return pick_move(deg, theta, tok, color, player, budget, policy, mode, eps, hwn,
                     weights, nlt_bonus, cands, raw, final)


@njit(cache=True)
def outcome(color):
    r = 0
    b = 0
    for v in range(color.size):
        if color[v] == RED:
            r += 1
        elif color[v] == BLACK:
            b += 1
    if r > b:
        return RED_WIN
    if b > r:
        return BLACK_WIN
    return DRAW


@njit(cache=True)
def rollout(seed, indptr, indices, deg, hwn, theta, tok, color, budgets, to_move,
            passes, turn, turn_cap, policies, growth, mode, eps, weights, nlt_bonus):
    """Play to the end in place and return the outcome code."""
    np.random.seed(seed)
    n = deg.size
    cands = np.empty(n, np.int64)
    raw = np.empty((n, 4), np.float64)
    final = np.empty(n, np.float64)
    while passes < 2 and (budgets[0] > 0 or budgets[1] > 0) and turn < turn_cap:
        p = to_move
        v, t = pick_move(deg, theta, tok, color, p, budgets[p - 1], policies[p - 1],
                         mode, eps, hwn, weights, nlt_bonus, cands, raw, final)
        if v < 0:
            passes += 1
        else:
            donate(indptr, indices, deg, theta, tok, color, budgets, growth, p, v, t)
            passes = 0
        turn += 1
        to_move = 3 - p
    return outcome(color)
