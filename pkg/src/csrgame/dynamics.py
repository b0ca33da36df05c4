"""Best-response dynamics with full per-update instrumentation.

Every :class:`UpdateEvent` carries enough state (radius vectors, the agents
whose radius dropped and by how much, the bad-case flag) for the
convergence lemmas and theorems to be re-checked after the fact by the
``check_*`` functions below.
"""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass
from math import comb
from typing import Optional, Sequence

import numpy as np

from .game import (
    Radius,
    RadiusVector,
    _radius,
    _rho,
    _unsatisfied_mask,
    lex_compare,
    validate_profile,
)
from .graph import Graph

__all__ = [
    "SCHEDULERS",
    "UpdateEvent",
    "Trace",
    "BoundReport",
    "DynamicsState",
    "unsatisfied_set",
    "step",
    "detect_bad_case",
    "run_dynamics",
    "default_max_steps",
    "replay",
    "check_lemma1",
    "check_lemma2",
    "check_lemma3",
    "check_theorem3",
    "check_threshold",
    "check_potential",
    "bound_report",
    "trace_to_jsonl",
    "trace_to_csv",
    "radius_json",
]

SCHEDULERS = ("lbr", "min_index", "random")


def radius_json(r: Radius):
    return None if math.isinf(r) else int(r)


@dataclass(frozen=True)
class UpdateEvent:
    t: int
    agent: int
    from_resource: int
    to_resource: int
    old_radius: int
    new_radius: Radius
    # (agent, old radius), sorted by old radius: agents whose radius fell to exactly new_radius
    decreased_exactly_to_rprime: tuple[tuple[int, Radius], ...]
    # (agent, old radius, new radius) for every other decrease
    other_decreases: tuple[tuple[int, Radius, Radius], ...]
    bad_case: bool
    radius_vector_before: RadiusVector
    radius_vector_after: RadiusVector

    @property
    def s(self) -> int:
        return len(self.decreased_exactly_to_rprime)

    def to_dict(self) -> dict:
        return {
            "t": self.t,
            "agent": self.agent,
            "from_resource": self.from_resource,
            "to_resource": self.to_resource,
            "old_radius": self.old_radius,
            "new_radius": radius_json(self.new_radius),
            "decreased_exactly_to_rprime": [[a, radius_json(r)] for a, r in self.decreased_exactly_to_rprime],
            "other_decreases": [[a, radius_json(r0), radius_json(r1)] for a, r0, r1 in self.other_decreases],
            "bad_case": self.bad_case,
            "radius_vector_before": self.radius_vector_before.to_dict(),
            "radius_vector_after": self.radius_vector_after.to_dict(),
        }


@dataclass
class Trace:
    graph: Graph
    k: int
    scheduler: str
    initial_profile: tuple[int, ...]
    events: list[UpdateEvent]
    final_profile: tuple[int, ...]
    terminated: bool
    seed: Optional[int] = None

    @property
    def T(self) -> int:
        return len(self.events)

    @property
    def n(self) -> int:
        return self.graph.n


@dataclass(frozen=True)
class BoundReport:
    T: int
    n: int
    k: int
    D: int
    scheduler: str
    terminated: bool
    bound_thm4: int
    bound_thm5: int
    bound_cor: int
    bound_naive: int
    potential_sum: float
    max_update_radius: Optional[int]
    bad_case_count: int
    thm4_applies: bool
    thm5_applies: bool
    thm4_ok: Optional[bool]
    thm5_ok: Optional[bool]
    cor_ok: Optional[bool]
    naive_ok: bool

    def to_dict(self) -> dict:
        d = dict(self.__dict__)
        # arbitrary-precision ints stay exact in JSON only as strings past 2**53
        for key in ("bound_cor", "bound_naive", "bound_thm5"):
            if d[key] > 2**53:
                d[key] = str(d[key])
        return d


class DynamicsState:
    """Mutable profile plus its holder-distance matrix, updated incrementally."""

    def __init__(self, g: Graph, profile: Sequence[int], k: int):
        self.g = g
        self.k = k
        self.arr = validate_profile(g, profile, k).copy()
        self.rho = _rho(g.dist_others, self.arr, k)
        self._idx = np.arange(g.n)

    def radii(self) -> np.ndarray:
        return self.rho[self._idx, self.arr]

    def unsatisfied(self) -> np.ndarray:
        return _unsatisfied_mask(self.rho, self.arr)

    def profile(self) -> tuple[int, ...]:
        return tuple(int(x) + 1 for x in self.arr)

    def best_response(self, i0: int) -> int:
        """Canonical (lowest-index) best response of 0-based agent ``i0``, 0-based."""
        return int(np.argmax(self.rho[i0]))

    def move(self, i0: int, b0: int) -> None:
        a0 = int(self.arr[i0])
        self.arr[i0] = b0
        dm = self.g.dist_others
        np.minimum(self.rho[:, b0], dm[:, i0], out=self.rho[:, b0])
        holders = self.arr == a0
        if holders.any():
            self.rho[:, a0] = dm[:, holders].min(axis=1)
        else:
            self.rho[:, a0] = math.inf


def _pick(state: DynamicsState, scheduler: str, rng: Optional[np.random.Generator]) -> Optional[int]:
    unsat = np.flatnonzero(state.unsatisfied())
    if unsat.size == 0:
        return None
    if scheduler == "lbr":
        r = state.radii()[unsat]
        # np.argmin returns the first minimiser, i.e. the lowest agent index
        return int(unsat[np.argmin(r)])
    if scheduler == "min_index":
        return int(unsat[0])
    if scheduler == "random":
        if rng is None:
            raise ValueError("random scheduler needs a seeded generator")
        return int(unsat[rng.integers(unsat.size)])
    raise ValueError(f"unknown scheduler {scheduler!r}; expected one of {SCHEDULERS}")


def _advance(state: DynamicsState, i0: int, t: int) -> UpdateEvent:
    g = state.g
    arr_before = state.arr.copy()
    radii_before = state.radii()
    unsat_before = state.unsatisfied()
    a0 = int(arr_before[i0])
    b0 = state.best_response(i0)
    state.move(i0, b0)
    radii_after = state.radii()
    unsat_after = state.unsatisfied()

    r = radii_before[i0]
    r_new = radii_after[i0]
    dropped = np.flatnonzero(radii_after < radii_before)
    exact, other = [], []
    for j in dropped:
        if j == i0:
            continue
        if radii_after[j] == r_new:
            exact.append((int(j) + 1, _radius(radii_before[j])))
        else:
            other.append((int(j) + 1, _radius(radii_before[j]), _radius(radii_after[j])))
    exact.sort(key=lambda x: (x[1], x[0]))
    bad = bool(np.any((radii_before < r) & ~unsat_before & unsat_after))
    return UpdateEvent(
        t=t,
        agent=i0 + 1,
        from_resource=a0 + 1,
        to_resource=b0 + 1,
        old_radius=_radius(r),
        new_radius=_radius(r_new),
        decreased_exactly_to_rprime=tuple(exact),
        other_decreases=tuple(other),
        bad_case=bad,
        radius_vector_before=RadiusVector.from_radii(radii_before, g.diameter),
        radius_vector_after=RadiusVector.from_radii(radii_after, g.diameter),
    )


def unsatisfied_set(g: Graph, profile: Sequence[int], k: int) -> list[tuple[int, Radius]]:
    """Agents with a strict improvement available, sorted by (radius, agent)."""
    state = DynamicsState(g, profile, k)
    r = state.radii()
    out = [(int(i) + 1, _radius(r[i])) for i in np.flatnonzero(state.unsatisfied())]
    return sorted(out, key=lambda x: (x[1], x[0]))


def step(
    g: Graph,
    profile: Sequence[int],
    k: int,
    scheduler: str = "lbr",
    rng: Optional[np.random.Generator] = None,
    t: int = 1,
) -> Optional[tuple[UpdateEvent, tuple[int, ...]]]:
    """One scheduled best-response update, or ``None`` at an equilibrium."""
    state = DynamicsState(g, profile, k)
    i0 = _pick(state, scheduler, rng)
    if i0 is None:
        return None
    event = _advance(state, i0, t)
    return event, state.profile()


def detect_bad_case(
    g: Graph, before: Sequence[int], after: Sequence[int], k: int, updater: int
) -> bool:
    """Did the update turn some satisfied agent of smaller radius unsatisfied?

    ``updater`` is the 1-based agent whose move turned ``before`` into ``after``.
    """
    s0 = DynamicsState(g, before, k)
    s1 = DynamicsState(g, after, k)
    r0 = s0.radii()
    return bool(np.any((r0 < r0[updater - 1]) & ~s0.unsatisfied() & s1.unsatisfied()))


def default_max_steps(n: int, k: int, diameter: int) -> int:
    return 3 * n**3 * min(k - 1, diameter) + n


def run_dynamics(
    g: Graph,
    initial: Sequence[int],
    k: int,
    scheduler: str = "lbr",
    max_steps: Optional[int] = None,
    seed: Optional[int] = None,
) -> Trace:
    """Iterate scheduled best responses until equilibrium or ``max_steps`` updates.

    A run that hits the budget comes back with ``terminated=False``.
    """
    if max_steps is None:
        max_steps = default_max_steps(g.n, k, g.diameter)
    if max_steps < 0:
        raise ValueError(f"max_steps must be >= 0, got {max_steps}")
    rng = np.random.default_rng(seed) if scheduler == "random" else None
    state = DynamicsState(g, initial, k)
    start = state.profile()
    events: list[UpdateEvent] = []
    terminated = False
    while True:
        i0 = _pick(state, scheduler, rng)
        if i0 is None:
            terminated = True
            break
        if len(events) >= max_steps:
            break
        events.append(_advance(state, i0, len(events) + 1))
    return Trace(g, k, scheduler, start, events, state.profile(), terminated, seed)


def replay(trace: Trace) -> tuple[int, ...]:
    p = list(trace.initial_profile)
    for ev in trace.events:
        if p[ev.agent - 1] != ev.from_resource:
            raise ValueError(f"event {ev.t}: agent {ev.agent} does not hold {ev.from_resource}")
        p[ev.agent - 1] = ev.to_resource
    return tuple(p)


def check_lemma1(event: UpdateEvent) -> bool:
    """Counts below the updater's old radius are untouched and ``n_r`` drops by >= 1."""
    r = event.old_radius
    before, after = event.radius_vector_before.counts, event.radius_vector_after.counts
    return before[: r - 1] == after[: r - 1] and after[r - 1] <= before[r - 1] - 1


def check_lemma2(event: UpdateEvent, n: int) -> bool:
    """``r' + r_1 + ... + r_s <= 2n`` and ``(s + 1)(r + 2) <= 2n``.

    ``r_j`` run over agents whose radius fell to exactly ``r'``. A previously
    unique holder has no finite old radius; it is counted in ``s`` but left
    out of the sum.
    """
    if math.isinf(event.new_radius):
        return True
    total = event.new_radius + sum(r for _, r in event.decreased_exactly_to_rprime if not math.isinf(r))
    return total <= 2 * n and (event.s + 1) * (event.old_radius + 2) <= 2 * n


def check_lemma3(trace: Trace) -> bool:
    if trace.scheduler != "lbr":
        raise ValueError("the update-radius bound only covers least-best-response traces")
    return all(ev.old_radius <= trace.k - 1 for ev in trace.events)


def check_theorem3(trace: Trace) -> tuple[float, bool]:
    total = math.fsum(float(trace.n) ** -ev.old_radius for ev in trace.events)
    return total, total < 3


def check_threshold(event: UpdateEvent) -> bool:
    """No other agent's radius falls below the updater's new radius."""
    return all(new > event.new_radius for _, _, new in event.other_decreases)


def check_potential(event: UpdateEvent) -> bool:
    return lex_compare(event.radius_vector_before, event.radius_vector_after) == 1


def bound_report(trace: Trace) -> BoundReport:
    n, k, D = trace.n, trace.k, trace.graph.diameter
    T = trace.T
    m = min(k - 1, D)
    lbr = trace.scheduler == "lbr"
    thm4 = n * m
    thm5 = 3 * n**3 * m
    cor = 3 * n ** (k - 1)
    naive = comb(n + D - 1, D - 1) if D >= 1 else 1
    potential, _ = check_theorem3(trace)
    thm4_applies = lbr and k < 5
    thm5_applies = lbr and trace.graph.min_degree >= k
    return BoundReport(
        T=T,
        n=n,
        k=k,
        D=D,
        scheduler=trace.scheduler,
        terminated=trace.terminated,
        bound_thm4=thm4,
        bound_thm5=thm5,
        bound_cor=cor,
        bound_naive=naive,
        potential_sum=potential,
        max_update_radius=max((ev.old_radius for ev in trace.events), default=None),
        bad_case_count=sum(ev.bad_case for ev in trace.events),
        thm4_applies=thm4_applies,
        thm5_applies=thm5_applies,
        thm4_ok=(trace.terminated and T <= thm4) if thm4_applies else None,
        thm5_ok=(trace.terminated and T <= thm5) if thm5_applies else None,
        cor_ok=(T <= cor) if lbr else None,
        naive_ok=T <= naive,
    )


def trace_to_jsonl(trace: Trace, report: Optional[BoundReport] = None) -> str:
    lines = [
        json.dumps(
            {
                "type": "header",
                "n": trace.n,
                "k": trace.k,
                "scheduler": trace.scheduler,
                "seed": trace.seed,
                "initial_profile": list(trace.initial_profile),
            }
        )
    ]
    lines.extend(json.dumps({"type": "event", **ev.to_dict()}) for ev in trace.events)
    report = report or bound_report(trace)
    lines.append(
        json.dumps(
            {
                "type": "summary",
                "terminated": trace.terminated,
                "final_profile": list(trace.final_profile),
                "bound_report": report.to_dict(),
            }
        )
    )
    return "\n".join(lines) + "\n"


def trace_to_csv(trace: Trace) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["t", "agent", "r", "r_prime", "bad_case"])
    for ev in trace.events:
        w.writerow([ev.t, ev.agent, ev.old_radius, "inf" if math.isinf(ev.new_radius) else ev.new_radius, int(ev.bad_case)])
    return buf.getvalue()
