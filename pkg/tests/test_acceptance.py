"""Acceptance gate. Each criterion prints one PASS/FAIL line and asserts at its stated tolerance.

Run alone with ``pytest -v -m acceptance`` (or ``python3 tests/test_acceptance.py``).
"""

import time

import numpy as np
import pytest

from conftest import ACCEPTANCE_LINES
from systolic3d.cli import run, verify_cases
from systolic3d.costmodel import TechParams, perf_per_area
from systolic3d.model import ArrayShape, Workload, latency_2d, latency_3d, reduction_optimal_tiers
from systolic3d.optimizer import Budget, DesignPoint, optimal_tier_study, optimize_shape, sweep_budget, sweep_tiers

pytestmark = pytest.mark.acceptance

RN0 = Workload("RN0", 64, 12100, 147)
GRID_N = (64, 512, 2048)
GRID_K = (1024, 8192, 16384)
GRID_BUDGETS = [2**e for e in range(8, 20)]


def report(capsys, number, ok, detail, elapsed, limit):
    within = elapsed < limit
    line = (f"[{'PASS' if ok and within else 'FAIL'}] criterion {number:>2}: {detail} "
            f"({elapsed:.2f} s, limit {limit:g} s)")
    ACCEPTANCE_LINES.append(line)
    with capsys.disabled():
        print("\n" + line)
    assert ok, line
    assert within, line


def test_criterion_01_formula_fidelity(capsys):
    t0 = time.perf_counter()
    c2d = latency_2d(ArrayShape(64, 147, 1), RN0).total_cycles
    c3d = latency_3d(ArrayShape(64, 147, 12), RN0).total_cycles
    rng = np.random.default_rng(2024)
    mismatches = 0
    for _ in range(1000):
        r, c = (int(x) for x in rng.integers(1, 257, size=2))
        m, n = (int(x) for x in rng.integers(1, 4097, size=2))
        k = int(rng.integers(1, 50001))
        shape, w = ArrayShape(r, c, 1), Workload("w", m, k, n)
        mismatches += latency_3d(shape, w) != latency_2d(shape, w)
    ok = c2d == 12373 and c3d == 1293 and mismatches == 0
    report(capsys, 1, ok, f"2D={c2d} (12373), 3D l=12={c3d} (1293), l=1 mismatches {mismatches}/1000",
           time.perf_counter() - t0, 1)


@pytest.fixture(scope="module")
def sim_cases():
    t0 = time.perf_counter()
    rows = verify_cases(500, max_macs=4096, max_dim=64, seed=20240)
    return rows, time.perf_counter() - t0


def test_criterion_02_simulator_functional(capsys, sim_cases):
    rows, elapsed = sim_cases
    good = sum(r["output_match"] for r in rows)
    flows = {r["dataflow"] for r in rows}
    assert all(r["rows"] * r["cols"] * r["tiers"] <= 4096 for r in rows)
    assert all(max(r["M"], r["K"], r["N"]) <= 64 for r in rows)
    report(capsys, 2, good == 500 and flows == {"OS", "dOS"},
           f"outputs equal reference GEMM in {good}/500 cases ({', '.join(sorted(flows))})", elapsed, 120)


def test_criterion_03_cycle_agreement(capsys, sim_cases):
    rows, elapsed = sim_cases
    good = sum(r["cycles_match"] for r in rows)
    report(capsys, 3, good == 500, f"simulated cycles equal model in {good}/500 cases", elapsed, 120)


def test_criterion_04_headline_speedup(capsys):
    t0 = time.perf_counter()
    points = [p for p in sweep_tiers(Budget(2**18), RN0, range(2, 13)) if isinstance(p, DesignPoint)]
    best = max(points, key=lambda p: p.speedup_vs_2d)
    ok = best.tiers == 12 and 8.0 <= best.speedup_vs_2d <= 10.0
    report(capsys, 4, ok, f"max speedup {best.speedup_vs_2d:.3f} at l={best.tiers} (want [8.0, 10.0] at l=12)",
           time.perf_counter() - t0, 1)


def test_criterion_05_slowdown_regime(capsys):
    t0 = time.perf_counter()
    w = Workload("k255", 64, 255, 147)
    points = sweep_tiers(Budget(2**12), w, range(2, 17))
    speedups = {p.tiers: p.speedup_vs_2d for p in points if isinstance(p, DesignPoint)}
    all_slower = len(speedups) == 15 and all(s < 1 for s in speedups.values())
    s2 = speedups[2]
    ok = all_slower and 0.4 <= s2 <= 0.7
    report(capsys, 5, ok, f"all l in 2..16 slower: {all_slower} (max {max(speedups.values()):.3f}); "
           f"l=2 speedup {s2:.3f} (want [0.4, 0.7])", time.perf_counter() - t0, 1)


def test_criterion_06_threshold_law(capsys):
    t0 = time.perf_counter()
    checked = violations = 0
    for n in GRID_N:
        for k in GRID_K:
            w = Workload(f"N{n}K{k}", 64, k, n)
            for tiers in range(2, 17):
                for p in sweep_budget(tiers, w, GRID_BUDGETS).points:
                    if isinstance(p, DesignPoint):
                        checked += 1
                        violations += p.speedup_vs_2d > 1 and p.budget <= w.m * w.n
    anchor = sweep_budget(4, Workload("anchor", 64, 8192, 512), GRID_BUDGETS)
    anchor_ok = anchor.analytic_threshold == 2**15 and all(
        p.speedup_vs_2d <= 1 for p in anchor.points if isinstance(p, DesignPoint) and p.budget <= 2**15)
    ok = checked >= 200 and violations == 0 and anchor_ok
    report(capsys, 6, ok, f"{violations} violations over {checked} grid points; M=64,N=512 threshold "
           f"{anchor.analytic_threshold} (2^15), first speedup at {anchor.first_speedup_budget}",
           time.perf_counter() - t0, 5)


def test_criterion_07_fig4_magnitude(capsys):
    t0 = time.perf_counter()
    best = (0.0, None)
    for n in GRID_N:
        for k in GRID_K:
            for p in sweep_budget(4, Workload("g", 64, k, n), GRID_BUDGETS).points:
                if isinstance(p, DesignPoint) and p.speedup_vs_2d > best[0]:
                    best = (p.speedup_vs_2d, (n, k, p.budget))
    s, (n, k, b) = best
    report(capsys, 7, 2.6 <= s <= 3.6, f"max speedup {s:.3f} at N={n}, K={k}, budget {b} (want [2.6, 3.6])",
           time.perf_counter() - t0, 5)


def test_criterion_08_tier_study_trend(capsys):
    t0 = time.perf_counter()
    study = optimal_tier_study(300, [2**12, 2**15, 2**18], rng_seed=0)
    meds = [study.medians[b] for b in (2**12, 2**15, 2**18)]
    ok = all(a <= b for a, b in zip(meds, meds[1:]))
    report(capsys, 8, ok, f"median optimal tiers {meds} for 2^12, 2^15, 2^18 (non-decreasing)",
           time.perf_counter() - t0, 30)


def test_criterion_09_cost_model(capsys):
    t0 = time.perf_counter()
    zero = TechParams(tsv_array_area=0, miv_array_area=0, fixed_overhead_3d=0)
    tech = TechParams()
    budget = Budget(2**18)
    degenerate = ordered = True
    ratios = {}
    for t in range(2, 17):
        spd = optimize_shape(budget, t, RN0).speedup_vs_2d
        degenerate &= all(perf_per_area(RN0, budget, t, link, zero).perf_per_area_vs_2d == spd
                          for link in ("tsv", "miv"))
        tsv = perf_per_area(RN0, budget, t, "tsv", tech).perf_per_area_vs_2d
        ordered &= perf_per_area(RN0, budget, t, "miv", tech).perf_per_area_vs_2d >= tsv
        ratios[t] = tsv
    above = all(ratios[t] > 1 for t in range(5, 17))
    ok = degenerate and ordered and above
    report(capsys, 9, ok, f"zero-area ratio == speedup: {degenerate}; MIV >= TSV: {ordered}; TSV ratio l=5..16 "
           f"{ratios[5]:.2f}..{ratios[16]:.2f} > 1: {above}", time.perf_counter() - t0, 1)


def test_criterion_10_reduction_optimum(capsys):
    t0 = time.perf_counter()
    bad = []
    for k in range(1, 10**4 + 1):
        ts = np.arange(1, k + 1)
        expect = int(ts[np.argmin(-(-k // ts) + ts)])
        if reduction_optimal_tiers(k) != expect:
            bad.append(k)
    report(capsys, 10, not bad, f"exhaustive scan k=1..10^4, mismatches {len(bad)}", time.perf_counter() - t0, 5)


DETERMINISM_RUNS = {
    "latency": ["--workload", "GNMT0", "--shape", "128x128x4"],
    "simulate": ["--inline", "20,40,30", "--shape", "8x8x4", "--seed", "11"],
    "optimize": ["--workload", "RN0", "--macs", "2^18", "--tiers", "12"],
    "sweep-tiers": ["--workload", "RN0", "--macs", "262144", "--tiers", "2..12"],
    "sweep-macs": ["--inline", "64,8192,512", "--tiers", "4", "--macs", "2^8..2^19"],
    "tier-study": ["--n", "50", "--seed", "1"],
    "perf-area": ["--workload", "RN0", "--macs", "2^18"],
    "verify": ["--cases", "30", "--seed", "7"],
}


def test_criterion_11_determinism(capsys, tmp_path):
    t0 = time.perf_counter()
    differing = []
    for command, argv in DETERMINISM_RUNS.items():
        outputs = []
        for rep in range(2):
            path = tmp_path / f"{command}-{rep}.csv"
            status = run([command, *argv, "--out", str(path)])
            assert status == 0, command
            outputs.append(path.read_bytes())
        if outputs[0] != outputs[1]:
            differing.append(command)
    capsys.readouterr()
    report(capsys, 11, not differing, f"{len(DETERMINISM_RUNS)} commands run twice, differing: {differing or 'none'}",
           time.perf_counter() - t0, 60)


if __name__ == "__main__":
    raise SystemExit(pytest.main([__file__, "-v"]))
