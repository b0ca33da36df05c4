"""Equilibria versus proper colorings of graph powers.

An equilibrium whose smallest radius is ``r* + 1`` is a proper coloring of
``G^(r*)``; conversely, least best response started from a proper coloring of
the largest colorable power ends at an equilibrium with ``r* = h``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .dynamics import run_dynamics
from .game import is_equilibrium, radii
from .graph import Graph, graph_power

__all__ = [
    "SizeLimit",
    "MAX_COLORING_NODES",
    "ColoringReport",
    "is_proper",
    "k_colorable",
    "equilibrium_r_star",
    "largest_colorable_power",
    "check_proposition1",
    "check_coloring_extension",
]

MAX_COLORING_NODES = 40


class SizeLimit(ValueError):
    pass


def is_proper(g: Graph, coloring: Sequence[int]) -> bool:
    return all(coloring[u - 1] != coloring[v - 1] for u, v in g.edges)


def k_colorable(g: Graph, k: int) -> Optional[tuple[int, ...]]:
    """A proper ``k``-coloring (colors ``1..k``) or ``None``.

    Backtracking over vertices in descending-degree order with forward
    checking.  A vertex may only open the next unused color, which prunes
    color permutations without changing which coloring is found first.
    """
    n = g.n
    if n > MAX_COLORING_NODES:
        raise SizeLimit(f"exact coloring limited to {MAX_COLORING_NODES} nodes, got {n}")
    if k < 1:
        return None
    order = sorted(range(n), key=lambda v: (-len(g.adjacency[v]), v))
    nbrs = [[u - 1 for u in g.adjacency[v]] for v in range(n)]
    full = (1 << k) - 1
    domains = [full] * n
    color = [0] * n

    def assign(pos: int, used: int) -> bool:
        if pos == n:
            return True
        v = order[pos]
        dom = domains[v]
        for c in range(min(used + 1, k)):
            bit = 1 << c
            if not dom & bit:
                continue
            touched = []
            ok = True
            for u in nbrs[v]:
                if color[u] == 0 and domains[u] & bit:
                    domains[u] &= ~bit
                    touched.append(u)
                    if domains[u] == 0:
                        ok = False
                        break
            if ok:
                color[v] = c + 1
                if assign(pos + 1, max(used, c + 1)):
                    return True
                color[v] = 0
            for u in touched:
                domains[u] |= bit
        return False

    if assign(0, 0):
        return tuple(color)
    return None


def equilibrium_r_star(g: Graph, profile: Sequence[int], k: int) -> int:
    """``min_i (radius_i - 1)``; a unique holder counts as ``D``."""
    if not is_equilibrium(g, profile, k):
        raise ValueError("profile is not an equilibrium")
    return min(g.diameter if math.isinf(r) else int(r) - 1 for r in radii(g, profile, k))


def largest_colorable_power(g: Graph, k: int) -> tuple[Optional[int], Optional[tuple[int, ...]]]:
    """Largest ``h`` in ``1..D`` with ``G^(h)`` ``k``-colorable, plus a witness.

    Colorability only gets harder as ``h`` grows (edge sets are nested), so a
    binary search is valid; it is used once ``D > 8``.
    """
    D = max(g.diameter, 1)
    cache: dict[int, Optional[tuple[int, ...]]] = {}

    def colorable(h: int):
        if h not in cache:
            cache[h] = k_colorable(graph_power(g, h), k)
        return cache[h]

    if colorable(1) is None:
        return None, None
    if D <= 8:
        h = 1
        while h < D and colorable(h + 1) is not None:
            h += 1
    else:
        lo, hi = 1, D  # colorable(lo) holds
        while lo < hi:
            mid = (lo + hi + 1) // 2
            if colorable(mid) is not None:
                lo = mid
            else:
                hi = mid - 1
        h = lo
    return h, colorable(h)


@dataclass(frozen=True)
class ColoringReport:
    h: Optional[int]
    witness: Optional[tuple[int, ...]]
    r_star: Optional[int]
    matched: Optional[bool]
    final_profile: Optional[tuple[int, ...]] = None
    final_proper: Optional[bool] = None
    # r* came from the D stand-in for unique holders rather than a real radius
    unbounded_determines: Optional[bool] = None
    min_radius_monotone: Optional[bool] = None

    def to_dict(self) -> dict:
        return {
            "h": self.h,
            "r_star": self.r_star,
            "matched": self.matched,
            "witness": list(self.witness) if self.witness else None,
            "final_profile": list(self.final_profile) if self.final_profile else None,
            "final_proper": self.final_proper,
            "unbounded_determines": self.unbounded_determines,
            "min_radius_monotone": self.min_radius_monotone,
        }


def _min_radius(rv) -> float:
    for r, c in enumerate(rv.counts, start=1):
        if c:
            return r
    return math.inf


def check_proposition1(g: Graph, k: int) -> ColoringReport:
    h, witness = largest_colorable_power(g, k)
    if h is None:
        return ColoringReport(None, None, None, None)
    trace = run_dynamics(g, witness, k, "lbr")
    if not trace.terminated:
        raise RuntimeError("least best response did not terminate from the coloring seed")
    final = trace.final_profile
    r_star = equilibrium_r_star(g, final, k)
    finite = [int(r) for r in radii(g, final, k) if not math.isinf(r)]
    mins = [_min_radius(ev.radius_vector_before) for ev in trace.events]
    mins += [_min_radius(trace.events[-1].radius_vector_after)] if trace.events else []
    return ColoringReport(
        h=h,
        witness=witness,
        r_star=r_star,
        matched=r_star == h,
        final_profile=final,
        final_proper=is_proper(graph_power(g, h), final),
        unbounded_determines=not finite,
        min_radius_monotone=all(a <= b for a, b in zip(mins, mins[1:])),
    )


def check_coloring_extension(g: Graph, k: int, seed: int = 0) -> bool:
    """From a (randomly relabelled) proper coloring, least best response ends
    at an equilibrium that is still a proper coloring.  Vacuously true when
    ``g`` is not ``k``-colorable."""
    col = k_colorable(g, k)
    if col is None:
        return True
    perm = np.random.default_rng(seed).permutation(k) + 1
    start = [int(perm[c - 1]) for c in col]
    trace = run_dynamics(g, start, k, "lbr")
    final = trace.final_profile
    return trace.terminated and is_proper(g, final) and is_equilibrium(g, final, k)
