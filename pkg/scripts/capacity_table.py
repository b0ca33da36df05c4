"""Per-node capacity plans and summary rows for a handful of generated networks.

For each graph: the LP optimum y*, its ceiling, the spectral radius, and the
normalised extra capacity sum(y*)/n, followed by the integer optimum where
n is small enough for exhaustive search.

    python3 scripts/capacity_table.py --k 4
"""

import argparse

from csrgame.capacity import augmented_run, brute_force_ip, plan_capacity
from csrgame.graph import generate

NETWORKS = (
    ("grid 12", lambda: generate("grid", 12)),
    ("cycle 10", lambda: generate("cycle", 10)),
    ("tree 12", lambda: generate("random_tree", 12, seed=3)),
    ("ER(12, 0.3)", lambda: generate("erdos_renyi", 12, p=0.3, seed=1)),
    ("ER(40, 0.1)", lambda: generate("erdos_renyi", 40, p=0.1, seed=2)),
)


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--k", type=int, default=4)
    args = ap.parse_args()
    k = args.k
    for name, make in NETWORKS:
        g = make()
        plan = plan_capacity(g, k)
        print(f"\n{name}  (n={g.n}, D={g.diameter}, d_min={g.min_degree}, k={k})")
        print("  node  deg   y*      ceil")
        for i in range(g.n):
            print(f"  {i + 1:4d}  {int(g.degrees[i]):3d}  {plan.y_star[i]:6.3f}  {int(plan.y_ceil[i]):4d}")
        ip = sum(brute_force_ip(g, k)) if g.n <= 12 else None
        _, tr = augmented_run(g, k, plan)
        print(f"  lambda_max       {plan.lambda_max:.4f}")
        print(f"  sum(y*)/n        {plan.normalized:.4f}")
        print(f"  LP / IP / ceil   {plan.lp_objective:.3f} / {ip if ip is not None else '-'} / {plan.total_extra}")
        print(f"  augmented lbr    T={tr.T}, terminated={tr.terminated}")


if __name__ == "__main__":
    main()
