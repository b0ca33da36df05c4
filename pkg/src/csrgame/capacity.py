"""Variable-capacity games: clone expansion and capacity augmentation.

A node with capacity ``C_i`` is replaced by ``C_i`` unit-cache clones, so the
multi-cache game can be played with the unit-cache dynamics.  Extra capacity
is placed by the covering LP ``min 1.y  s.t.  A y >= k 1 - d, y >= 0`` and
rounded up entrywise.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .dynamics import Trace, run_dynamics
from .game import MultiProfile, is_equilibrium, is_multi_equilibrium
from .graph import Graph, load_graph, spectral_radius
from .lp import NumericalFailure, solve_covering_lp

__all__ = [
    "ExpandedGame",
    "Collapse",
    "LPSolution",
    "CapacityPlan",
    "validate_capacities",
    "expand_game",
    "collapse_profile",
    "check_equivalence",
    "solve_lp",
    "plan_capacity",
    "brute_force_ip",
    "check_eq_TD",
    "augmented_run",
]

FEAS_TOL = 1e-9


def validate_capacities(C: Sequence[int], n: int, k: int) -> tuple[int, ...]:
    caps = tuple(int(c) for c in C)
    if len(caps) != n:
        raise ValueError(f"capacity vector has length {len(caps)}, expected {n}")
    for i, c in enumerate(caps, start=1):
        if not 1 <= c <= k:
            raise ValueError(f"capacity of node {i} is {c}, outside 1..{k}")
    return caps


@dataclass(frozen=True)
class ExpandedGame:
    graph: Graph
    capacities: tuple[int, ...]
    clone_of: tuple[int, ...]  # expanded node - 1 -> original node
    clones: tuple[tuple[int, ...], ...]  # original node - 1 -> expanded nodes

    @property
    def C(self) -> int:
        return sum(self.capacities)

    @property
    def C_min(self) -> int:
        return min(self.capacities)


def expand_game(g: Graph, C: Sequence[int]) -> ExpandedGame:
    """Clones of ``i`` are consecutive labels, adjacent to each other and to
    every clone of every neighbour of ``i``."""
    caps = tuple(int(c) for c in C)
    if len(caps) != g.n or min(caps) < 1:
        raise ValueError(f"need {g.n} positive capacities, got {caps}")
    clones, clone_of = [], []
    nxt = 1
    for i, c in enumerate(caps, start=1):
        clones.append(tuple(range(nxt, nxt + c)))
        clone_of.extend([i] * c)
        nxt += c
    edges = []
    for cl in clones:
        edges.extend(itertools.combinations(cl, 2))
    for u, v in g.edges:
        edges.extend(itertools.product(clones[u - 1], clones[v - 1]))
    return ExpandedGame(load_graph(edges, nxt - 1), caps, tuple(clone_of), tuple(clones))


@dataclass(frozen=True)
class Collapse:
    multisets: tuple[tuple[int, ...], ...]
    duplicated: tuple[int, ...]  # originals whose clones repeat a resource

    @property
    def profile(self) -> MultiProfile:
        if self.duplicated:
            raise ValueError(f"clones of nodes {list(self.duplicated)} duplicate a resource")
        return MultiProfile.of(self.multisets)


def collapse_profile(eg: ExpandedGame, expanded_profile: Sequence[int]) -> Collapse:
    sets = tuple(tuple(sorted(expanded_profile[c - 1] for c in cl)) for cl in eg.clones)
    dup = tuple(i for i, s in enumerate(sets, start=1) if len(set(s)) != len(s))
    return Collapse(sets, dup)


def check_equivalence(g: Graph, C: Sequence[int], eg: ExpandedGame, expanded_profile: Sequence[int], k: int) -> bool:
    """A duplication-free unit-cache equilibrium on the expansion collapses to
    a multi-cache profile where no original node wants to swap a resource."""
    if tuple(C) != eg.capacities:
        raise ValueError("capacities do not match the expansion")
    if not is_equilibrium(eg.graph, expanded_profile, k):
        raise ValueError("expanded profile is not an equilibrium")
    col = collapse_profile(eg, expanded_profile)
    if col.duplicated:
        raise ValueError(f"clones of nodes {list(col.duplicated)} duplicate a resource")
    return is_multi_equilibrium(g, col.profile, k)


@dataclass
class LPSolution:
    status: str
    y_star: Optional[np.ndarray]
    objective: Optional[float]
    dual: Optional[np.ndarray]
    dual_objective: Optional[float]
    base_capacity: int  # the constant n in n + min sum(y)


def solve_lp(A, d, k: int) -> LPSolution:
    A = np.asarray(A, dtype=float)
    d = np.asarray(d, dtype=float)
    n = A.shape[0]
    res = solve_covering_lp(np.ones(n), A, k - d, tol=FEAS_TOL)
    if res.status == "optimal":
        slack = A @ res.x - (k - d)
        if slack.min() < -1e-7 or res.x.min() < -1e-7:
            raise NumericalFailure(f"returned point violates constraints by {-min(slack.min(), res.x.min()):.3e}")
    return LPSolution(res.status, res.x, res.objective, res.dual, res.dual_objective, n)


@dataclass
class CapacityPlan:
    k: int
    y_star: np.ndarray
    y_ceil: np.ndarray
    total_extra: int
    normalized: float
    lambda_max: float
    lp_objective: float
    dual_objective: float

    @property
    def capacities(self) -> tuple[int, ...]:
        return tuple(int(x) + 1 for x in self.y_ceil)

    def to_dict(self) -> dict:
        return {
            "y_star": [round(float(x), 12) for x in self.y_star],
            "y_ceil": [int(x) for x in self.y_ceil],
            "total_extra": self.total_extra,
            "normalized": round(self.normalized, 12),
            "lambda_max": round(self.lambda_max, 9),
        }


def plan_capacity(g: Graph, k: int) -> CapacityPlan:
    if g.n < 2:
        raise ValueError("capacity planning needs at least 2 nodes")
    A = g.adjacency_matrix
    d = g.degrees
    sol = solve_lp(A, d, k)
    if sol.status != "optimal":
        raise NumericalFailure(f"capacity LP reported {sol.status}; it is always feasible")
    # snap float noise before ceiling so 2.0000000001 does not become 3
    y = np.where(np.abs(sol.y_star - np.round(sol.y_star)) < 1e-7, np.round(sol.y_star), sol.y_star)
    y_ceil = np.ceil(y).astype(np.int64)
    if np.any(A @ y_ceil < k - d):
        raise NumericalFailure("rounded-up plan is infeasible")
    return CapacityPlan(
        k=k,
        y_star=sol.y_star,
        y_ceil=y_ceil,
        total_extra=int(y_ceil.sum()),
        normalized=float(sol.y_star.sum()) / g.n,
        lambda_max=spectral_radius(g),
        lp_objective=float(sol.objective),
        dual_objective=float(sol.dual_objective),
    )


def brute_force_ip(g: Graph, k: int, cap: Optional[int] = None) -> tuple[int, ...]:
    """Minimum-total integer ``y`` in ``{0..cap}^n`` with ``A y >= k 1 - d``.

    Depth-first enumeration with two prunes: the running total plus the
    largest remaining constraint deficit must beat the incumbent, and every
    deficit must still be coverable by the unassigned neighbours.
    """
    if g.n > 12:
        raise ValueError(f"exhaustive search limited to n <= 12, got {g.n}")
    n = g.n
    cap = max(k - 1, 0) if cap is None else cap
    need = [k - int(x) for x in g.degrees]
    nbrs = [[v - 1 for v in g.neighbors(i)] for i in range(1, n + 1)]
    best_total = math.inf
    best: Optional[list[int]] = None
    y = [0] * n
    cover = [0] * n  # current sum of y over assigned neighbours

    def remaining_ok(pos: int) -> Optional[int]:
        worst = 0
        for j in range(n):
            deficit = need[j] - cover[j]
            if deficit <= 0:
                continue
            free = sum(1 for v in nbrs[j] if v >= pos)
            if deficit > cap * free:
                return None
            worst = max(worst, deficit)
        return worst

    def dfs(pos: int, total: int) -> None:
        nonlocal best_total, best
        lb = remaining_ok(pos)
        if lb is None or total + lb >= best_total:
            return
        if pos == n:
            best_total = total
            best = list(y)
            return
        for val in range(cap + 1):
            if total + val >= best_total:
                break
            y[pos] = val
            for j in nbrs[pos]:
                cover[j] += val
            dfs(pos + 1, total + val)
            for j in nbrs[pos]:
                cover[j] -= val
        y[pos] = 0

    dfs(0, 0)
    if best is None:
        raise ValueError(f"no feasible integer plan within cap {cap}")
    return tuple(best)


def check_eq_TD(trace: Trace, C: Sequence[int], k: int, original: Graph) -> bool:
    """Step bounds for least-best-response on an expanded graph.

    ``T <= 3 C^3 min(D, k-1)`` when ``k <= C_min d_min`` and
    ``T <= C min(D, k-1)`` when ``k < 5``; vacuous (termination only)
    when neither regime applies.
    """
    if trace.scheduler != "lbr":
        raise ValueError("step bounds only cover least-best-response traces")
    total = sum(C)
    m = min(trace.graph.diameter, k - 1)
    ok = trace.terminated
    if k <= min(C) * original.min_degree:
        ok = ok and trace.T <= 3 * total**3 * m
    if k < 5:
        ok = ok and trace.T <= total * m
    return ok


def augmented_run(g: Graph, k: int, plan: Optional[CapacityPlan] = None) -> tuple[ExpandedGame, Trace]:
    """Expand with capacities ``1 + ceil(y*)`` and run least best response from all-ones."""
    plan = plan or plan_capacity(g, k)
    eg = expand_game(g, plan.capacities)
    return eg, run_dynamics(eg.graph, [1] * eg.graph.n, k, "lbr")
