"""Gameboard graphs: construction, synthetic generators, SNAP loading and
community sampling."""

from __future__ import annotations

import enum
import logging
import random
import warnings
from collections import Counter, deque
from dataclasses import dataclass
from functools import cached_property
from pathlib import Path
from typing import Iterable, Sequence, Union

import networkx as nx
import numpy as np

log = logging.getLogger(__name__)


class GraphError(ValueError):
    """Invalid graph input or generator parameters."""


class NodeState(enum.IntEnum):
    INACTIVE = 0
    RED = 1
    BLACK = 2


@dataclass(frozen=True)
class NodeAttrs:
    theta: int
    red_tokens: int
    black_tokens: int
    state: NodeState


class Graph:
    """Immutable undirected simple graph in CSR form.

    Node ids are dense in ``[0, n)``. ``original_ids`` maps them back to the
    ids of a loaded file when the graph came from one.
    """

    def __init__(self, n: int, edges: Sequence[tuple[int, int]],
                 original_ids: Sequence[int] | None = None, dropped_edges: int = 0):
        self.n = n
        self.edges = tuple(edges)
        self.original_ids = tuple(original_ids) if original_ids is not None else tuple(range(n))
        self.dropped_edges = dropped_edges
        adj: list[list[int]] = [[] for _ in range(n)]
        for u, v in self.edges:
            adj[u].append(v)
            adj[v].append(u)
        for nbrs in adj:
            nbrs.sort()
        self.adjacency = tuple(tuple(a) for a in adj)
        self.degree = np.array([len(a) for a in adj], dtype=np.int64)
        self.indptr = np.zeros(n + 1, dtype=np.int64)
        np.cumsum(self.degree, out=self.indptr[1:])
        self.indices = np.array([x for a in adj for x in a], dtype=np.int64)
        for arr in (self.degree, self.indptr, self.indices):
            arr.setflags(write=False)

    @property
    def edge_count(self) -> int:
        return len(self.edges)

    def __len__(self) -> int:
        return self.n

    def __contains__(self, v) -> bool:
        return isinstance(v, (int, np.integer)) and 0 <= v < self.n

    def __repr__(self) -> str:
        return f"Graph(n={self.n}, edges={self.edge_count})"

    def neighbors(self, v: int) -> tuple[int, ...]:
        self._check(v)
        return self.adjacency[v]

    def eligible(self, v: int) -> bool:
        """Degree-0 nodes can never be selected or counted."""
        return self.degree[v] > 0

    def attrs(self, v: int) -> NodeAttrs:
        """Attributes at the start of a game."""
        self._check(v)
        return NodeAttrs(int(self.degree[v]), 0, 0, NodeState.INACTIVE)

    @cached_property
    def inverse_degree_sums(self) -> np.ndarray:
        """Per node, the sum of 1/degree over its neighbors."""
        out = np.zeros(self.n, dtype=np.float64)
        inv = np.zeros(self.n, dtype=np.float64)
        nz = self.degree > 0
        inv[nz] = 1.0 / self.degree[nz]
        for v in range(self.n):
            out[v] = inv[self.indices[self.indptr[v]:self.indptr[v + 1]]].sum()
        out.setflags(write=False)
        return out

    def to_networkx(self) -> nx.Graph:
        g = nx.Graph()
        g.add_nodes_from(range(self.n))
        g.add_edges_from(self.edges)
        return g

    def _check(self, v) -> None:
        if v not in self:
            raise GraphError(f"unknown node {v!r} (graph has {self.n} nodes)")


def new_gameboard(edges: Iterable[tuple[int, int]], n: int | None = None) -> Graph:
    """Build a board from an edge list: all nodes inactive, theta = degree.

    Raises GraphError on self-loops, duplicate edges or ids outside ``[0, n)``.
    """
    seen: set[tuple[int, int]] = set()
    clean = []
    top = -1
    for i, (u, v) in enumerate(edges):
        u, v = int(u), int(v)
        if u < 0 or v < 0:
            raise GraphError(f"edge {i}: negative node id in ({u}, {v})")
        if u == v:
            raise GraphError(f"edge {i}: self-loop on node {u}")
        key = (u, v) if u < v else (v, u)
        if key in seen:
            raise GraphError(f"edge {i}: duplicate edge {key}")
        seen.add(key)
        clean.append(key)
        top = max(top, key[1])
    if n is None:
        n = top + 1
    elif top >= n:
        raise GraphError(f"edge references node {top} but n={n}")
    return Graph(n, clean)


def degree(g: Graph, v: int) -> int:
    g._check(v)
    return int(g.degree[v])


# -- synthetic generators ---------------------------------------------------

@dataclass(frozen=True)
class ERParams:
    n: int
    p: float

    def __post_init__(self):
        if self.n < 1:
            raise GraphError(f"ER needs n >= 1, got {self.n}")
        if not 0.0 <= self.p <= 1.0:
            raise GraphError(f"ER edge probability must be in [0, 1], got {self.p}")


@dataclass(frozen=True)
class BAParams:
    n: int
    m: int

    def __post_init__(self):
        if not 1 <= self.m < self.n:
            raise GraphError(f"BA needs 1 <= m < n, got n={self.n}, m={self.m}")


@dataclass(frozen=True)
class WSParams:
    n: int
    k: int
    p: float

    def __post_init__(self):
        if not 1 <= self.k < self.n:
            raise GraphError(f"WS needs 1 <= k < n, got n={self.n}, k={self.k}")
        if not 0.0 <= self.p <= 1.0:
            raise GraphError(f"WS rewire probability must be in [0, 1], got {self.p}")


GenParams = Union[ERParams, BAParams, WSParams]


def _from_nx(g: nx.Graph) -> Graph:
    return new_gameboard(((int(u), int(v)) for u, v in g.edges()), n=g.number_of_nodes())


def generate_er(n: int, p: float, seed: int) -> Graph:
    ERParams(n, p)
    return _from_nx(nx.gnp_random_graph(n, p, seed=seed))


def generate_ba(n: int, m: int, seed: int) -> Graph:
    # networkx starts from a star on m + 1 nodes, giving exactly m * (n - m) edges
    BAParams(n, m)
    return _from_nx(nx.barabasi_albert_graph(n, m, seed=seed))


def generate_ws(n: int, k: int, p: float, seed: int) -> Graph:
    # odd k behaves as k - 1: floor(k / 2) ring neighbors per side
    WSParams(n, k, p)
    return _from_nx(nx.watts_strogatz_graph(n, k, p, seed=seed))


def generate(params: GenParams, seed: int) -> Graph:
    if isinstance(params, ERParams):
        return generate_er(params.n, params.p, seed)
    if isinstance(params, BAParams):
        return generate_ba(params.n, params.m, seed)
    if isinstance(params, WSParams):
        return generate_ws(params.n, params.k, params.p, seed)
    raise GraphError(f"unknown generator parameters {params!r}")


# -- real data ----------------------------------------------------------------

def load_edge_list(path: str | Path) -> Graph:
    """Read a SNAP-style edge list.

    Ids are remapped to dense ``[0, n)`` in order of first appearance; the
    originals are kept in ``Graph.original_ids``. Self-loops and duplicate
    edges are dropped and counted in ``Graph.dropped_edges``.
    """
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise GraphError(f"cannot read {path}: {exc}") from exc
    ids: dict[str, int] = {}
    originals: list = []
    seen: set[tuple[int, int]] = set()
    edges = []
    dropped = 0

    def intern(tok: str, lineno: int) -> int:
        if tok not in ids:
            try:
                originals.append(int(tok))
            except ValueError:
                raise GraphError(f"{path}:{lineno}: node id {tok!r} is not an integer") from None
            ids[tok] = len(ids)
        return ids[tok]

    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split()
        if len(parts) < 2:
            raise GraphError(f"{path}:{lineno}: expected 'u v', got {line!r}")
        u = intern(parts[0], lineno)
        v = intern(parts[1], lineno)
        key = (min(u, v), max(u, v))
        if u == v or key in seen:
            dropped += 1
            continue
        seen.add(key)
        edges.append(key)
    if dropped:
        log.info("%s: dropped %d self-loop/duplicate edges", path, dropped)
    return Graph(len(ids), edges, original_ids=originals, dropped_edges=dropped)


def save_edge_list(g: Graph, path: str | Path) -> None:
    lines = [f"# n={g.n} edges={g.edge_count}"]
    lines += [f"{g.original_ids[u]} {g.original_ids[v]}" for u, v in g.edges]
    Path(path).write_text("\n".join(lines) + "\n")


# -- communities --------------------------------------------------------------

@dataclass
class Communities:
    labels: list[int]
    converged: bool
    rounds: int

    def groups(self) -> dict[int, list[int]]:
        out: dict[int, list[int]] = {}
        for v, lab in enumerate(self.labels):
            out.setdefault(lab, []).append(v)
        return out


def label_propagation(g: Graph, seed: int, max_rounds: int = 100) -> Communities:
    """Asynchronous label propagation.

    Every node starts with its own id as label. Each round visits nodes in a
    fresh seeded order; a node takes the most frequent neighbor label, keeping
    its current label when that is among the tied best and otherwise picking
    uniformly among the ties.
    """
    if g.n == 0:
        raise GraphError("label propagation needs a non-empty graph")
    rng = random.Random(seed)
    labels = list(range(g.n))
    order = list(range(g.n))
    for rnd in range(1, max_rounds + 1):
        rng.shuffle(order)
        changed = False
        for v in order:
            nbrs = g.adjacency[v]
            if not nbrs:
                continue
            counts = Counter(labels[u] for u in nbrs)
            top = max(counts.values())
            best = sorted(lab for lab, c in counts.items() if c == top)
            if labels[v] in best:
                continue
            labels[v] = rng.choice(best)
            changed = True
        if not changed:
            return Communities(labels, True, rnd)
    warnings.warn(f"label propagation did not converge in {max_rounds} rounds")
    return Communities(labels, False, max_rounds)


def induced_subgraph(g: Graph, nodes: Iterable[int]) -> Graph:
    keep = sorted(set(nodes))
    remap = {v: i for i, v in enumerate(keep)}
    edges = [(remap[u], remap[v]) for u, v in g.edges if u in remap and v in remap]
    board = new_gameboard(edges, n=len(keep))
    return Graph(board.n, board.edges, original_ids=[g.original_ids[v] for v in keep])


def extract_cluster_sample(g: Graph, target_cluster: int, sample: int, seed: int,
                           communities: Communities | None = None) -> Graph:
    """Pick the community closest in size to ``target_cluster`` (ties go to
    the larger) and BFS-sample ``sample`` nodes from it."""
    rng = random.Random(seed)
    if communities is None:
        communities = label_propagation(g, seed=rng.randrange(2**32))
    groups = [sorted(m) for m in communities.groups().values() if len(m) >= sample]
    if not groups:
        raise GraphError(f"no community with at least {sample} nodes")
    groups.sort(key=lambda m: (abs(len(m) - target_cluster), -len(m), m[0]))
    members = groups[0]
    inside = set(members)
    chosen: list[int] = []
    taken: set[int] = set()
    while len(chosen) < sample:
        start = rng.choice([v for v in members if v not in taken])
        taken.add(start)
        queue = deque([start])
        while queue and len(chosen) < sample:
            v = queue.popleft()
            chosen.append(v)
            nbrs = [u for u in g.adjacency[v] if u in inside and u not in taken]
            rng.shuffle(nbrs)
            for u in nbrs:
                taken.add(u)
                queue.append(u)
    return induced_subgraph(g, chosen)
