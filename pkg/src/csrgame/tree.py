"""Equilibrium construction on trees in exactly n allocation steps.

Nodes are visited level by level starting at the root, ties by node index,
so every node allocated before ``v`` is at most as deep as ``v``.  Visiting
the deepest level first instead fails already on a star.  Each node best-responds to the nodes allocated before it; nodes not
yet allocated are invisible.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .game import is_equilibrium
from .graph import Graph, GraphError

__all__ = ["NotATree", "TreeOrder", "tree_order", "solve_tree", "verify_theorem1"]


class NotATree(GraphError):
    pass


@dataclass(frozen=True)
class TreeOrder:
    root: int
    levels: tuple[int, ...]
    visit_order: tuple[int, ...]

    def to_dict(self) -> dict:
        return {"root": self.root, "levels": list(self.levels), "visit_order": list(self.visit_order)}


def tree_order(g: Graph, root: int) -> TreeOrder:
    if not g.is_tree():
        raise NotATree(f"graph has {g.edge_count} edges, a tree on {g.n} nodes has {g.n - 1}")
    if not 1 <= root <= g.n:
        raise GraphError(f"root {root} outside 1..{g.n}")
    levels = tuple(int(x) for x in g.dist[root - 1])
    order = sorted(range(1, g.n + 1), key=lambda v: (levels[v - 1], v))
    return TreeOrder(root, levels, tuple(order))


def _construct(g: Graph, root: int, k: int, check_each_step: bool):
    order = tree_order(g, root)
    dm = g.dist_others
    rho = np.full((g.n, k), math.inf)
    arr = np.full(g.n, -1, dtype=np.int64)
    allocated = np.zeros(g.n, dtype=bool)
    ok = True
    for v in order.visit_order:
        v0 = v - 1
        # argmax takes the first maximiser, which is the minimum resource index
        o = int(np.argmax(rho[v0]))
        arr[v0] = o
        allocated[v0] = True
        np.minimum(rho[:, o], dm[:, v0], out=rho[:, o])
        if check_each_step and ok:
            idx = np.flatnonzero(allocated)
            sub = rho[idx]
            if np.any(sub[np.arange(idx.size), arr[idx]] < sub.max(axis=1)):
                ok = False
    return tuple(int(x) + 1 for x in arr), order, ok


def solve_tree(g: Graph, root: int, k: int) -> tuple[tuple[int, ...], TreeOrder]:
    if k < 1:
        raise ValueError(f"k must be >= 1, got {k}")
    profile, order, _ = _construct(g, root, k, check_each_step=False)
    return profile, order


def verify_theorem1(g: Graph, root: int, k: int) -> bool:
    """Rebuild the tree equilibrium, checking after every allocation that no
    already-allocated node could improve among allocated nodes, then check
    the final profile is a Nash equilibrium."""
    profile, order, ok = _construct(g, root, k, check_each_step=True)
    return ok and len(order.visit_order) == g.n and is_equilibrium(g, profile, k)
