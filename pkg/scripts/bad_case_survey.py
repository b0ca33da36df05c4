"""How often bad cases occur, by number of resources and scheduler.

A bad case is an update that turns a satisfied agent with a smaller radius
than the updater into an unsatisfied one.  Prints the fraction of runs with
at least one, the largest count in a single run (an empirical constant B),
and the smallest instance seen for each (k, scheduler) cell.

    python3 scripts/bad_case_survey.py --runs 400
"""

import argparse

import numpy as np

from csrgame.dynamics import run_dynamics
from csrgame.graph import generate

FAMILIES = ("grid", "cycle", "random_tree", "erdos_renyi")


def random_instance(rng):
    kind = FAMILIES[int(rng.integers(len(FAMILIES)))]
    n = int(rng.integers(5, 41))
    if kind == "erdos_renyi":
        lo = min(2.0 * np.log(n) / n, 0.6)
        return kind, generate(kind, n, p=float(rng.uniform(lo, 0.9)), seed=int(rng.integers(2**31)))
    return kind, generate(kind, n, seed=int(rng.integers(2**31)))


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--runs", type=int, default=400, help="runs per (k, scheduler) cell")
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()
    print(f"{'k':>2} {'scheduler':>10} {'runs w/ bad':>12} {'max per run':>12}  smallest instance")
    for k in (3, 4, 5, 6, 7):
        for sched in ("lbr", "min_index", "random"):
            rng = np.random.default_rng([args.seed, k, len(sched)])
            hit, worst, smallest = 0, 0, None
            for r in range(args.runs):
                kind, g = random_instance(rng)
                start = [int(x) for x in rng.integers(1, k + 1, size=g.n)]
                tr = run_dynamics(g, start, k, sched, seed=r)
                bad = sum(ev.bad_case for ev in tr.events)
                if bad:
                    hit += 1
                    worst = max(worst, bad)
                    if smallest is None or g.n < smallest[1]:
                        smallest = (kind, g.n)
            where = f"{smallest[0]} n={smallest[1]}" if smallest else "-"
            print(f"{k:>2} {sched:>10} {hit:>7}/{args.runs:<4} {worst:>12}  {where}")


if __name__ == "__main__":
    main()
