"""Search for updates that break  r' + r_1 + ... + r_s <= 2n.

Here r_1..r_s are the old radii of agents whose radius fell to exactly r'.
Scans every profile on short paths with the least-best-response step, then
samples random trees.  Prints each violation found.

    python3 scripts/sum_inequality_search.py --max-path 8 --trees 3000
"""

import argparse
import itertools

import numpy as np

from csrgame.dynamics import check_lemma2, run_dynamics, step
from csrgame.graph import generate


def describe(ev, n):
    olds = [r for _, r in ev.decreased_exactly_to_rprime]
    return f"agent {ev.agent}: r={ev.old_radius} -> r'={ev.new_radius}, old radii {olds}, sum {ev.new_radius + sum(olds)} > {2 * n}"


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--max-path", type=int, default=8)
    ap.add_argument("--trees", type=int, default=3000)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()

    for n in range(3, args.max_path + 1):
        g = generate("path", n)
        for k in (2, 3):
            for P in itertools.product(range(1, k + 1), repeat=n):
                out = step(g, P, k, "lbr")
                if out and not check_lemma2(out[0], n):
                    print(f"path n={n} k={k} P={P}: {describe(out[0], n)}")
                    break

    rng = np.random.default_rng(args.seed)
    found = 0
    for i in range(args.trees):
        n = int(rng.integers(4, 31))
        k = int(rng.integers(2, 7))
        g = generate("random_tree", n, seed=int(rng.integers(2**31)))
        start = [int(x) for x in rng.integers(1, k + 1, size=n)]
        sched = ("lbr", "min_index", "random")[i % 3]
        tr = run_dynamics(g, start, k, sched, seed=i)
        for ev in tr.events:
            if not check_lemma2(ev, n):
                found += 1
                print(f"tree n={n} k={k} {sched} edges={list(g.edges)} start={start} t={ev.t}: {describe(ev, n)}")
    print(f"{found} violations in {args.trees} random-tree runs")


if __name__ == "__main__":
    main()
