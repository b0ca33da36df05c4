"""Undirected simple graphs with 1-based node labels.

Distances are stored densely (n x n), which is fine at the scales the game
engine targets (a few thousand nodes at most).
"""

from __future__ import annotations

import heapq
import json
import math
from collections import deque
from dataclasses import dataclass
from functools import cached_property
from pathlib import Path
from typing import Iterable, Optional

import numpy as np

__all__ = [
    "GraphError",
    "SelfLoop",
    "Disconnected",
    "LabelOutOfRange",
    "GenerationFailed",
    "Graph",
    "GraphStats",
    "load_graph",
    "all_pairs_distances",
    "ball",
    "graph_power",
    "spectral_radius",
    "generate",
    "graph_stats",
    "read_graph",
    "write_graph",
    "GENERATOR_KINDS",
]


class GraphError(ValueError):
    pass


class SelfLoop(GraphError):
    def __init__(self, node: int):
        super().__init__(f"self-loop at node {node}")
        self.node = node


class Disconnected(GraphError):
    def __init__(self, node: int):
        super().__init__(f"graph is disconnected: node {node} is unreachable from node 1")
        self.node = node


class LabelOutOfRange(GraphError):
    def __init__(self, edge: tuple, n: int):
        super().__init__(f"edge {edge} has a label outside 1..{n}")
        self.edge = edge


class GenerationFailed(GraphError):
    pass


@dataclass(frozen=True)
class Graph:
    """Validated connected simple graph.

    Build instances through :func:`load_graph` or :func:`generate`; the
    constructor itself does not validate.
    """

    n: int
    edges: tuple[tuple[int, int], ...]

    @cached_property
    def adjacency(self) -> tuple[tuple[int, ...], ...]:
        """Sorted neighbour tuples; ``adjacency[v - 1]`` lists neighbours of ``v``."""
        nbrs: list[list[int]] = [[] for _ in range(self.n)]
        for u, v in self.edges:
            nbrs[u - 1].append(v)
            nbrs[v - 1].append(u)
        return tuple(tuple(sorted(x)) for x in nbrs)

    def neighbors(self, v: int) -> tuple[int, ...]:
        return self.adjacency[v - 1]

    @cached_property
    def adjacency_matrix(self) -> np.ndarray:
        a = np.zeros((self.n, self.n), dtype=np.int64)
        for u, v in self.edges:
            a[u - 1, v - 1] = a[v - 1, u - 1] = 1
        return a

    @cached_property
    def dist(self) -> np.ndarray:
        """Hop distances, 0-indexed: ``dist[u - 1, v - 1]``."""
        d = all_pairs_distances(self)
        d.setflags(write=False)
        return d

    @cached_property
    def dist_others(self) -> np.ndarray:
        """Float distances with ``inf`` on the diagonal (a node never counts as its own holder)."""
        d = self.dist.astype(float)
        np.fill_diagonal(d, math.inf)
        d.setflags(write=False)
        return d

    def distance(self, u: int, v: int) -> int:
        return int(self.dist[u - 1, v - 1])

    @cached_property
    def diameter(self) -> int:
        return int(self.dist.max()) if self.n > 1 else 0

    @cached_property
    def degrees(self) -> np.ndarray:
        return np.array([len(x) for x in self.adjacency], dtype=np.int64)

    @property
    def min_degree(self) -> int:
        return int(self.degrees.min())

    @property
    def max_degree(self) -> int:
        return int(self.degrees.max())

    @property
    def edge_count(self) -> int:
        return len(self.edges)

    def is_tree(self) -> bool:
        return self.edge_count == self.n - 1

    def to_dict(self) -> dict:
        return {"n": self.n, "edges": [list(e) for e in self.edges]}


@dataclass(frozen=True)
class GraphStats:
    diameter: int
    degrees: tuple[int, ...]
    d_min: int
    lambda_max: float

    def to_dict(self) -> dict:
        return {
            "diameter": self.diameter,
            "degrees": list(self.degrees),
            "d_min": self.d_min,
            "lambda_max": self.lambda_max,
        }


def load_graph(edge_list: Iterable[tuple[int, int]], n: int) -> Graph:
    """Validate an edge list over nodes ``1..n``; duplicate edges are collapsed."""
    if n < 1:
        raise GraphError(f"node count must be positive, got {n}")
    edges = set()
    for e in edge_list:
        u, v = (int(x) for x in e)
        if not (1 <= u <= n and 1 <= v <= n):
            raise LabelOutOfRange((u, v), n)
        if u == v:
            raise SelfLoop(u)
        edges.add((min(u, v), max(u, v)))
    g = Graph(n, tuple(sorted(edges)))
    _check_connected(g)
    return g


def _check_connected(g: Graph) -> None:
    seen = [False] * g.n
    seen[0] = True
    queue = deque([1])
    while queue:
        u = queue.popleft()
        for v in g.neighbors(u):
            if not seen[v - 1]:
                seen[v - 1] = True
                queue.append(v)
    for idx, ok in enumerate(seen):
        if not ok:
            raise Disconnected(idx + 1)


def _bfs(g: Graph, source: int) -> np.ndarray:
    dist = np.full(g.n, -1, dtype=np.int64)
    dist[source - 1] = 0
    queue = deque([source])
    adj = g.adjacency
    while queue:
        u = queue.popleft()
        du = dist[u - 1] + 1
        for v in adj[u - 1]:
            if dist[v - 1] < 0:
                dist[v - 1] = du
                queue.append(v)
    return dist


def all_pairs_distances(g: Graph) -> np.ndarray:
    """BFS from every node; O(n * |E|)."""
    return np.stack([_bfs(g, s) for s in range(1, g.n + 1)])


def ball(g: Graph, center: int, r: int) -> frozenset[int]:
    if not 1 <= center <= g.n:
        raise LabelOutOfRange((center,), g.n)
    row = g.dist[center - 1]
    return frozenset(int(x) + 1 for x in np.flatnonzero(row <= r))


def graph_power(g: Graph, r: int) -> Graph:
    """Same nodes; ``u ~ v`` iff ``1 <= dist(u, v) <= r``."""
    if r < 1:
        raise ValueError(f"power must be >= 1, got {r}")
    if r == 1:
        return g
    iu, iv = np.nonzero(np.triu(g.dist <= r, k=1))
    edges = tuple((int(a) + 1, int(b) + 1) for a, b in zip(iu, iv))
    return Graph(g.n, edges)


def spectral_radius(g: Graph, tol: float = 1e-6, max_iter: int = 100_000) -> float:
    """Largest adjacency eigenvalue by power iteration from the all-ones vector.

    Iterates on ``A + I`` so bipartite graphs (spectrum symmetric about 0)
    still converge; the shift is removed from the returned estimate.
    """
    if g.n == 1:
        return 0.0
    a = g.adjacency_matrix.astype(float)
    x = np.ones(g.n) / math.sqrt(g.n)
    lam = math.inf
    for _ in range(max_iter):
        y = a @ x + x
        new_lam = float(x @ y)
        x = y / np.linalg.norm(y)
        if abs(new_lam - lam) < tol * 1e-3:
            lam = new_lam
            break
        lam = new_lam
    return lam - 1.0


def graph_stats(g: Graph, tol: float = 1e-6) -> GraphStats:
    return GraphStats(
        diameter=g.diameter,
        degrees=tuple(int(x) for x in g.degrees),
        d_min=g.min_degree,
        lambda_max=spectral_radius(g, tol),
    )


GENERATOR_KINDS = ("path", "cycle", "star", "complete", "grid", "random_tree", "erdos_renyi")


def generate(kind: str, n: int, p: Optional[float] = None, seed: int = 0, max_retries: int = 1000) -> Graph:
    """Deterministic graph generators (for a fixed ``seed``)."""
    if n < 1:
        raise GraphError(f"n must be >= 1, got {n}")
    rng = np.random.default_rng(seed)
    if kind == "path":
        edges = [(i, i + 1) for i in range(1, n)]
    elif kind == "cycle":
        if n < 3:
            raise GraphError("cycle needs n >= 3")
        edges = [(i, i + 1) for i in range(1, n)] + [(1, n)]
    elif kind == "star":
        edges = [(1, i) for i in range(2, n + 1)]
    elif kind == "complete":
        edges = [(i, j) for i in range(1, n + 1) for j in range(i + 1, n + 1)]
    elif kind == "grid":
        edges = _grid_edges(n)
    elif kind == "random_tree":
        edges = _prufer_tree(n, rng)
    elif kind == "erdos_renyi":
        if p is None or not 0.0 <= p <= 1.0:
            raise GraphError(f"erdos_renyi needs p in [0, 1], got {p}")
        return _erdos_renyi(n, p, rng, max_retries)
    else:
        raise GraphError(f"unknown generator kind {kind!r}")
    return load_graph(edges, n)


def _grid_edges(n: int) -> list[tuple[int, int]]:
    # row-major, ceil(sqrt(n)) columns; a short last row stays connected
    cols = max(1, math.ceil(math.sqrt(n)))
    edges = []
    for v in range(1, n + 1):
        r, c = divmod(v - 1, cols)
        if c + 1 < cols and v + 1 <= n:
            edges.append((v, v + 1))
        if v + cols <= n:
            edges.append((v, v + cols))
    return edges


def _prufer_tree(n: int, rng: np.random.Generator) -> list[tuple[int, int]]:
    if n == 1:
        return []
    if n == 2:
        return [(1, 2)]
    seq = [int(x) + 1 for x in rng.integers(0, n, size=n - 2)]
    degree = [1] * (n + 1)
    for x in seq:
        degree[x] += 1
    leaves = [v for v in range(1, n + 1) if degree[v] == 1]
    heapq.heapify(leaves)
    edges = []
    for x in seq:
        leaf = heapq.heappop(leaves)
        edges.append((leaf, x))
        degree[x] -= 1
        if degree[x] == 1:
            heapq.heappush(leaves, x)
    u, v = heapq.heappop(leaves), heapq.heappop(leaves)
    edges.append((u, v))
    return edges


def _erdos_renyi(n: int, p: float, rng: np.random.Generator, max_retries: int) -> Graph:
    iu, iv = np.triu_indices(n, k=1)
    for _ in range(max_retries):
        keep = rng.random(iu.size) < p
        edges = [(int(a) + 1, int(b) + 1) for a, b in zip(iu[keep], iv[keep])]
        try:
            return load_graph(edges, n)
        except Disconnected:
            continue
    raise GenerationFailed(f"no connected G({n}, {p}) within {max_retries} retries")


def read_graph(path: str | Path) -> Graph:
    """Read JSON ``{"n": .., "edges": [[u, v], ..]}`` or text ``n m`` + ``u v`` lines."""
    text = Path(path).read_text()
    stripped = text.lstrip()
    if stripped.startswith("{"):
        obj = json.loads(text)
        return load_graph([tuple(e) for e in obj["edges"]], int(obj["n"]))
    lines = [ln.split() for ln in text.splitlines() if ln.strip() and not ln.lstrip().startswith("#")]
    if not lines:
        raise GraphError(f"{path}: empty graph file")
    n = int(lines[0][0])
    edges = [(int(a), int(b)) for a, b in lines[1:]]
    if len(lines[0]) > 1 and int(lines[0][1]) != len(edges):
        raise GraphError(f"{path}: header says {lines[0][1]} edges, found {len(edges)}")
    return load_graph(edges, n)


def write_graph(g: Graph, path: str | Path) -> None:
    Path(path).write_text(json.dumps(g.to_dict()) + "\n")
