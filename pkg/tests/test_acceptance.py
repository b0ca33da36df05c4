"""Acceptance gate: one test per criterion, each printing a single PASS/FAIL line.

Tolerances are pinned here and in :mod:`csrgame.acceptance`:
zero violations everywhere, LP values to 1e-6, tree construction under 10 s.
"""

import json
import time

import pytest

from csrgame.acceptance import report_bytes, run_criterion, update_corpus
from csrgame.cli import main

from conftest import ACCEPTANCE_RESULTS

pytestmark = pytest.mark.acceptance

TREE_SECONDS = 10.0
_reports: dict[int, dict] = {}


@pytest.fixture(scope="module")
def corpus():
    return update_corpus()


def _record(cid: int, report: dict, ok: bool, detail: str) -> None:
    _reports[cid] = report
    ACCEPTANCE_RESULTS[cid] = (ok, detail)
    print(f"criterion {cid}: {'PASS' if ok else 'FAIL'}  {detail}")
    assert ok, json.dumps(report, indent=2)


def test_criterion_01_tree_construction():
    t0 = time.perf_counter()
    rep = run_criterion(1)
    elapsed = time.perf_counter() - t0
    ok = rep["passed"] and elapsed < TREE_SECONDS
    _record(1, rep, ok, f"{rep['instances']} trees, {rep['failures']} failures, {elapsed:.1f}s (limit {TREE_SECONDS:.0f}s)")


def test_criterion_02_lexicographic_decrease(corpus):
    rep = run_criterion(2, corpus)
    _record(
        2, rep, rep["passed"],
        f"{rep['updates']} updates, {rep['lemma1_violations']} count violations, {rep['potential_violations']} order violations",
    )


def test_criterion_03_two_n_inequality(corpus):
    rep = run_criterion(3, corpus)
    _record(
        3, rep, rep["passed"],
        f"{rep['updates']} updates, {rep['sum_violations']} sum violations, {rep['count_violations']} count violations",
    )


def test_criterion_04_update_radius_and_power_bound():
    rep = run_criterion(4)
    _record(4, rep, rep["passed"], f"{rep['runs']} lbr runs, {rep['failures']} failures")


def test_criterion_05_weighted_update_sum(corpus):
    rep = run_criterion(5, corpus)
    _record(5, rep, rep["passed"], f"{rep['traces']} traces, {rep['violations']} violations, max sum {rep['max_sum']:.4f}")


def test_criterion_06_linear_bound_small_k():
    rep = run_criterion(6)
    per = rep["per_k"]
    detail = ", ".join(f"k={k}: {v['failures']}/{v['runs']} failed" for k, v in per.items())
    _record(6, rep, rep["passed"], f"{detail}; max T/n^3 at k=2 = {per['2']['max_T_over_n_cubed']:.4f}")


def test_criterion_07_cubic_bound_dense():
    rep = run_criterion(7)
    detail = ", ".join(f"k={k}: {v['failures']}/{v['runs']} failed, {v['bad_cases']} bad cases" for k, v in rep["per_k"].items())
    _record(7, rep, rep["passed"], detail)


def test_criterion_08_expanded_game():
    rep = run_criterion(8)
    _record(8, rep, rep["passed"], f"{rep['runs']} runs, {rep['duplication_free']} duplication-free, {rep['failures']} failures")


def test_criterion_09_lp_and_rounding():
    rep = run_criterion(9)
    named = ", ".join(f"{x['name']}={x['objective']:g}" for x in rep["named"])
    _record(9, rep, rep["passed"], f"named [{named}], {rep['random_instances']} random, {rep['failures']} failures")


def test_criterion_10_coloring_correspondence():
    rep = run_criterion(10)
    _record(
        10, rep, rep["passed"],
        f"{rep['instances']} instances, {rep['matched_checked']} matched checks, {rep['failures']} failures",
    )


def test_criterion_11_determinism(tmp_path):
    fresh_corpus = update_corpus()
    mismatched = []
    for cid in range(1, 11):
        first = _reports.get(cid) or run_criterion(cid, fresh_corpus if cid in (2, 3, 5) else None)
        again = run_criterion(cid, fresh_corpus if cid in (2, 3, 5) else None)
        if report_bytes(first) != report_bytes(again):
            mismatched.append(cid)
    argv = ["sweep", "--gen", "erdos_renyi 30 0.3", "--n-min", "10", "--k", "4", "--trials", "20",
            "--init", "random", "--no-timestamp"]
    outs = []
    for i in range(2):
        path = tmp_path / f"sweep{i}.json"
        main(argv + ["--out", str(path)])
        outs.append(path.read_bytes())
    cli_ok = outs[0] == outs[1]
    ok = not mismatched and cli_ok
    _record(11, {"mismatched": mismatched, "cli_identical": cli_ok}, ok,
            f"10 criterion reports rerun, mismatches {mismatched or 'none'}, CLI sweep identical: {cli_ok}")
