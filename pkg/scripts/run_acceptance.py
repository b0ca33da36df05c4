"""Run every acceptance criterion and write one JSON report per criterion.

    python3 scripts/run_acceptance.py --out reports/
"""

import argparse
import sys
import time
from pathlib import Path

from csrgame.acceptance import CRITERIA, report_bytes, run_criterion, update_corpus


def main() -> int:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--out", default="reports", help="directory for criterion_XX.json files")
    ap.add_argument("--only", type=int, nargs="*", help="criterion ids to run (default: all)")
    args = ap.parse_args()
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    ids = args.only or sorted(CRITERIA)
    corpus = update_corpus() if {2, 3, 5} & set(ids) else None
    failed = 0
    for cid in ids:
        t0 = time.perf_counter()
        rep = run_criterion(cid, corpus if cid in (2, 3, 5) else None)
        (out / f"criterion_{cid:02d}.json").write_bytes(report_bytes(rep))
        failed += not rep["passed"]
        print(f"criterion {cid:2d}: {'PASS' if rep['passed'] else 'FAIL'}  ({time.perf_counter() - t0:.1f}s)")
    return 1 if failed else 0


if __name__ == "__main__":
    sys.exit(main())
