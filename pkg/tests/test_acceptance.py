"""Acceptance suite: one test per criterion, each printing a PASS/FAIL line.

Criteria 1-11 run the suite checks in-process with their default
configuration and wall-clock budget. Criterion 12 runs ``gpbg verify all``
twice through the CLI and compares the written reports byte for byte.
"""
import json
import math
import time

import pytest

from conftest import ACCEPTANCE_LINES
from gpbg import cli, suite


def _report(criterion: int, ok: bool, elapsed: float, detail: str) -> None:
    line = f"criterion {criterion}: {'PASS' if ok else 'FAIL'} ({detail}; {elapsed:.1f}s)"
    ACCEPTANCE_LINES.append(line)
    print(line)


def _run(criterion: int):
    start = time.perf_counter()
    result = suite.CRITERIA[criterion]()
    return result, time.perf_counter() - start


def _rows_ok(result, fn):
    return all(fn(r) for r in result["details"])


def test_criterion_01_enumeration_counts():
    res, dt = _run(1)
    exact = _rows_ok(res, lambda r: r["count"] == r["expected"] == math.prod(range(r["k"], r["k"] + r["n"])))
    ok = exact and len(res["details"]) == 18 and dt < 10
    _report(1, ok, dt, f"{len(res['details'])} (k, n) pairs, counts exact={exact}")
    assert ok


def test_criterion_02_echelon_bound():
    res, dt = _run(2)
    within = _rows_ok(res, lambda r: r["classes"] <= 2 ** (r["k"] + 2 * r["n"] - 2))
    worst = max(r["classes"] / 2 ** (r["k"] + 2 * r["n"] - 2) for r in res["details"])
    ok = within and len(res["details"]) == 15 and dt < 60
    _report(2, ok, dt, f"max classes/bound {worst:.3f}")
    assert ok


def test_criterion_03_partition_exactness():
    res, dt = _run(3)
    flags = ("exact", "distinct_permutations", "distinct_representatives")
    exact = _rows_ok(res, lambda r: all(r[f] for f in flags))
    ok = exact and len(res["details"]) == 10
    _report(3, ok, dt, f"{sum(r['classes'] for r in res['details'])} classes over k<=2, n<=5, all exact={exact}")
    assert ok


def test_criterion_04_worked_example():
    res, dt = _run(4)
    forest = res["forest"]
    trees = {t["root"]: t for t in forest["trees"]}
    shape = (
        trees[1]["internal"] == [1, 3, 4] and trees[1]["leaves"] == [1, 3, 5, 6]
        and trees[2]["internal"] == [2] and trees[2]["leaves"] == [2, 4]
    )
    counts = res["term_counts"] == [[8, 4, 2], [2]]
    rendered = "2^4 (C T^ε)^3 ‖φ‖^12" in res["rendered"]
    ok = shape and counts and rendered and res["pass"] and dt < 1
    _report(4, ok, dt, f"shape={shape} counts={res['term_counts']} bound={res['rendered']!r}")
    assert ok


def test_criterion_05_power_counting():
    res, dt = _run(5)
    checked = sum(r["checked"] for r in res["details"])
    passing = sum(r["passing"] for r in res["details"])
    ok = passing == checked and len(res["details"]) == 15 and dt < 120
    _report(5, ok, dt, f"{passing}/{checked} class-mode pairs give (n-1, 2(k+n))")
    assert ok


def test_criterion_06_oracle_equivalence():
    res, dt = _run(6)
    p = res["params"]
    config = (p["k"], p["max_n"], p["N"], p["tuples"], p["datasets"]) == (1, 2, 8, 10, 5)
    ok = config and res["error"] <= 1e-10 and dt < 30
    _report(6, ok, dt, f"max rel. error {res['error']:.2e}")
    assert ok


def test_criterion_07_move_invariance():
    res, dt = _run(7)
    p = res["params"]
    config = p["N"] == 16 and p["order"] == 6 and p["k"] == [1, 2] and p["n"] == [2, 3]
    q = res["quadrature_error"]
    ok = (
        config and res["difference"] <= 1e-6 and res["rerun_difference"] <= 1e-6
        and q["order+2"] <= q["order"] and res["moves"] > 0 and dt < 600
    )
    _report(
        7, ok, dt,
        f"{res['moves']} moves, max diff {res['difference']:.2e} (order 8: {res['rerun_difference']:.2e}), "
        f"quadrature error {q['order']:.1e} -> {q['order+2']:.1e}",
    )
    assert ok


def test_criterion_08_domain_union():
    res, dt = _run(8)
    p = res["params"]
    ok = (p["k"], p["n"], p["N"]) == (1, 3, 16) and res["difference"] <= 1e-5 and dt < 600
    _report(8, ok, dt, f"{len(res['details'])} classes, max diff {res['difference']:.2e}")
    assert ok


def test_criterion_09_hierarchy_residual():
    res, dt = _run(9)
    p = res["params"]
    config = (p["k"], p["N"], p["dt"]) == (1, 32, 1e-3)
    ok = config and 3.2 <= res["ratio"] <= 4.8 and res["sentinel_ratio"] >= 100 and dt < 120
    _report(9, ok, dt, f"residual ratio {res['ratio']:.4f}, sentinel x{res['sentinel_ratio']:.2e}")
    assert ok


def test_criterion_10_dispersive_ratio():
    res, dt = _run(10)
    times = res["sweep"]["times"]
    decade = times[-1] / times[0] == pytest.approx(10.0)
    ok = decade and res["spread"] <= 0.05 and res["unitarity"] <= 1e-12 and dt < 30
    _report(10, ok, dt, f"spread {res['spread']:.2%}, unitarity {res['unitarity']:.1e}")
    assert ok


@pytest.mark.slow
def test_criterion_11_trilinear_ratios():
    res, dt = _run(11)
    base = suite.TRILINEAR_BASELINE
    bounded = all(res[key][n] <= base[n] for key in ("ratio", "ratio_doubled") for n in ("l1", "l2"))
    stable = res["refinement_drift"] <= 0.30
    ok = res["params"]["corpus"] == 100 and bounded and stable and dt < 300
    _report(
        11, ok, dt,
        f"max L1 {res['ratio']['l1']:.5f}, max L2 {res['ratio']['l2']:.5f}, "
        f"N-doubling drift {res['refinement_drift']:.1e}",
    )
    assert ok


@pytest.mark.slow
def test_criterion_12_determinism(tmp_path):
    start = time.perf_counter()
    paths = [tmp_path / f"run{i}.json" for i in (1, 2)]
    codes = [cli.run(["verify", "all", "--jobs", "4", "-o", str(p)]) for p in paths]
    a, b = (p.read_bytes() for p in paths)
    dt = time.perf_counter() - start
    report = json.loads(a)
    ok = a == b and codes == [0, 0] and report["pass"] and len(report["results"]) == 11
    _report(12, ok, dt, f"{len(a)} bytes, identical={a == b}, exit codes {codes}")
    assert ok
