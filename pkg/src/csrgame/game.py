"""Unit-cache and multi-cache CSR game state and payoffs.

Profiles are sequences of 1-based resource indices, one per node.  A radius
is an ``int`` when some other node holds the same resource, and
``UNBOUNDED`` (``math.inf``) when the node is the unique holder; ``inf``
already orders above every finite radius, which is all the game needs.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence, Union

import numpy as np

from .graph import Graph

__all__ = [
    "UNBOUNDED",
    "Radius",
    "ProfileError",
    "MissingResource",
    "RadiusVector",
    "MultiProfile",
    "validate_profile",
    "holder_distances",
    "nearest_other_holder",
    "radius_of",
    "radii",
    "best_responses",
    "is_unsatisfied",
    "is_equilibrium",
    "radius_vector",
    "lex_compare",
    "weighted_utility",
    "multi_holder_distances",
    "multi_best_response",
    "is_multi_unsatisfied",
    "is_multi_equilibrium",
]

UNBOUNDED = math.inf
Radius = Union[int, float]


class ProfileError(ValueError):
    pass


class MissingResource(ValueError):
    pass


def _radius(x: float) -> Radius:
    return UNBOUNDED if math.isinf(x) else int(x)


def validate_profile(g: Graph, profile: Sequence[int], k: int) -> np.ndarray:
    """Check a profile against ``g`` and ``k``; return it as a 0-based int array."""
    if k < 1:
        raise ProfileError(f"k must be >= 1, got {k}")
    arr = np.asarray(profile, dtype=np.int64)
    if arr.shape != (g.n,):
        raise ProfileError(f"profile has length {arr.size}, graph has {g.n} nodes")
    bad = np.flatnonzero((arr < 1) | (arr > k))
    if bad.size:
        i = int(bad[0])
        raise ProfileError(f"node {i + 1} holds resource {int(arr[i])}, outside 1..{k}")
    return arr - 1


def _rho(dist_others: np.ndarray, arr: np.ndarray, k: int) -> np.ndarray:
    n = arr.size
    rho = np.full((n, k), math.inf)
    for o in range(k):
        mask = arr == o
        if mask.any():
            rho[:, o] = dist_others[:, mask].min(axis=1)
    return rho


def holder_distances(g: Graph, profile: Sequence[int], k: int) -> np.ndarray:
    """``rho[i-1, o-1]``: distance from ``i`` to the nearest *other* holder of ``o``.

    This is the radius node ``i`` would have if it cached ``o``; ``inf``
    when nobody else holds ``o``.
    """
    return _rho(g.dist_others, validate_profile(g, profile, k), k)


def nearest_other_holder(g: Graph, profile: Sequence[int], i: int, o: int) -> Radius:
    arr = np.asarray(profile) - 1
    mask = arr == o - 1
    mask[i - 1] = False
    if not mask.any():
        return UNBOUNDED
    return int(g.dist[i - 1, mask].min())


def radius_of(g: Graph, profile: Sequence[int], i: int) -> Radius:
    return nearest_other_holder(g, profile, i, profile[i - 1])


def radii(g: Graph, profile: Sequence[int], k: int) -> list[Radius]:
    arr = validate_profile(g, profile, k)
    rho = _rho(g.dist_others, arr, k)
    return [_radius(x) for x in rho[np.arange(g.n), arr]]


def best_responses(g: Graph, profile: Sequence[int], i: int, k: int) -> tuple[frozenset[int], Radius]:
    """All radius-maximising resources for node ``i`` and the radius they achieve.

    The canonical choice used everywhere else is ``min`` of the set.
    """
    row = holder_distances(g, profile, k)[i - 1]
    best = row.max()
    return frozenset(int(o) + 1 for o in np.flatnonzero(row == best)), _radius(best)


def is_unsatisfied(g: Graph, profile: Sequence[int], i: int, k: int) -> bool:
    row = holder_distances(g, profile, k)[i - 1]
    return bool(row[profile[i - 1] - 1] < row.max())


def _unsatisfied_mask(rho: np.ndarray, arr: np.ndarray) -> np.ndarray:
    return rho[np.arange(arr.size), arr] < rho.max(axis=1)


def is_equilibrium(g: Graph, profile: Sequence[int], k: int) -> bool:
    arr = validate_profile(g, profile, k)
    return not _unsatisfied_mask(_rho(g.dist_others, arr, k), arr).any()


@dataclass(frozen=True, order=False)
class RadiusVector:
    """Histogram of finite radii: ``counts[r - 1]`` agents have radius ``r``."""

    counts: tuple[int, ...]
    unbounded_count: int

    @classmethod
    def from_radii(cls, values: Sequence[Radius], diameter: int) -> "RadiusVector":
        counts = [0] * diameter
        unbounded = 0
        for r in values:
            if math.isinf(r):
                unbounded += 1
            else:
                counts[int(r) - 1] += 1
        return cls(tuple(counts), unbounded)

    @property
    def total(self) -> int:
        return sum(self.counts) + self.unbounded_count

    def n(self, r: int) -> int:
        return self.counts[r - 1]

    def to_dict(self) -> dict:
        return {"counts": list(self.counts), "unbounded": self.unbounded_count}


def radius_vector(g: Graph, profile: Sequence[int], k: int) -> RadiusVector:
    return RadiusVector.from_radii(radii(g, profile, k), g.diameter)


def lex_compare(a: RadiusVector, b: RadiusVector) -> int:
    """-1, 0 or 1 as ``a`` is lexicographically less, equal or greater than ``b``.

    Finite counts decide first; the unbounded count only breaks ties.
    """
    ka = (a.counts, a.unbounded_count)
    kb = (b.counts, b.unbounded_count)
    return (ka > kb) - (ka < kb)


def weighted_utility(g: Graph, profile: Sequence[int], i: int, weights) -> float:
    """General-form utility ``-sum_o w_i(o) * d(i, nearest holder of o)``.

    Here the nearest holder may be ``i`` itself (cost 0).
    """
    w = np.asarray(weights, dtype=float)
    if (w < 0).any():
        raise ValueError("weights must be nonnegative")
    row = w[i - 1]
    arr = np.asarray(profile) - 1
    total = 0.0
    for o in np.flatnonzero(row > 0):
        holders = arr == o
        if not holders.any():
            raise MissingResource(f"resource {o + 1} has weight {row[o]} for node {i} but no holder")
        total += row[o] * g.dist[i - 1, holders].min()
    return -float(total)


@dataclass(frozen=True)
class MultiProfile:
    """Per-node resource sets with capacities ``C_i = |assignment_i|``."""

    assignment: tuple[frozenset[int], ...]

    @classmethod
    def of(cls, sets: Sequence[Sequence[int]]) -> "MultiProfile":
        out = []
        for idx, s in enumerate(sets):
            fs = frozenset(int(x) for x in s)
            if len(fs) != len(s):
                raise ProfileError(f"node {idx + 1} caches a resource twice: {sorted(s)}")
            out.append(fs)
        return cls(tuple(out))

    @property
    def capacities(self) -> tuple[int, ...]:
        return tuple(len(s) for s in self.assignment)

    def to_list(self) -> list[list[int]]:
        return [sorted(s) for s in self.assignment]


def _validate_multi(g: Graph, mp: MultiProfile, k: int) -> None:
    if len(mp.assignment) != g.n:
        raise ProfileError(f"multi profile has {len(mp.assignment)} entries, graph has {g.n} nodes")
    for idx, s in enumerate(mp.assignment):
        if not 1 <= len(s) <= k:
            raise ProfileError(f"node {idx + 1} has capacity {len(s)}, outside 1..{k}")
        if any(not 1 <= o <= k for o in s):
            raise ProfileError(f"node {idx + 1} caches a resource outside 1..{k}")


def multi_holder_distances(g: Graph, mp: MultiProfile, k: int) -> np.ndarray:
    _validate_multi(g, mp, k)
    held = np.zeros((g.n, k), dtype=bool)
    for idx, s in enumerate(mp.assignment):
        for o in s:
            held[idx, o - 1] = True
    rho = np.full((g.n, k), math.inf)
    for o in range(k):
        if held[:, o].any():
            rho[:, o] = g.dist_others[:, held[:, o]].min(axis=1)
    return rho


def multi_best_response(g: Graph, mp: MultiProfile, i: int, k: int) -> tuple[frozenset[int], float]:
    """Best cache content for ``i``: the ``C_i`` resources farthest from other holders.

    Utility is separable over resources, so greedy selection is exact.
    Ties go to the lower resource index.
    """
    row = multi_holder_distances(g, mp, k)[i - 1]
    cap = len(mp.assignment[i - 1])
    order = sorted(range(k), key=lambda o: (-row[o], o))[:cap]
    return frozenset(o + 1 for o in order), float(sum(row[o] for o in order))


def _multi_unsatisfied_row(row: np.ndarray, held: frozenset[int]) -> bool:
    held_idx = [o - 1 for o in held]
    unheld = [o for o in range(row.size) if o + 1 not in held]
    if not unheld:
        return False
    return bool(row[held_idx].min() < row[unheld].max())


def is_multi_unsatisfied(g: Graph, mp: MultiProfile, i: int, k: int) -> bool:
    """Some cached resource can be swapped for an uncached one that sits farther away."""
    row = multi_holder_distances(g, mp, k)[i - 1]
    return _multi_unsatisfied_row(row, mp.assignment[i - 1])


def is_multi_equilibrium(g: Graph, mp: MultiProfile, k: int) -> bool:
    rho = multi_holder_distances(g, mp, k)
    return not any(_multi_unsatisfied_row(rho[idx], s) for idx, s in enumerate(mp.assignment))
