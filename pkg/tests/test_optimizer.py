import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from systolic3d.model import ArrayShape, Workload, latency_3d
from systolic3d.optimizer import (Budget, DesignPoint, InfeasibleDesign, SkippedPoint, optimal_tier_study,
                                  optimal_tiers, optimize_shape, sweep_budget, sweep_tiers)
from systolic3d.workloads import WorkloadSet

RN0 = Workload("RN0", 64, 12100, 147)


def brute_force(macs, tiers, m, k, n):
    """Every (rows, cols) with rows*cols <= floor(macs/tiers); ties by (cycles, rows, cols)."""
    per_tier = macs // tiers
    best = None
    for r in range(1, per_tier + 1):
        for c in range(1, per_tier // r + 1):
            cycles = (2 * r + c + math.ceil(k / tiers) + tiers - 3) * math.ceil(m / r) * math.ceil(n / c)
            key = (cycles, r, c)
            if best is None or key < best:
                best = key
    return best


def test_rn0_planar_optimum():
    p = optimize_shape(Budget(9408), 1, RN0)
    assert (p.shape.rows, p.shape.cols) == (64, 147)
    assert p.cycles == 12373
    assert p.speedup_vs_2d == 1.0


def test_small_budget_example():
    w = Workload("x", 2, 10, 2)
    assert brute_force(4, 1, 2, 10, 2) == (14, 2, 2)
    p = optimize_shape(Budget(4), 1, w)
    assert p.shape == ArrayShape(2, 2, 1)
    assert p.cycles == 14 and p.estimate.folds == 1


def test_infeasible_split():
    with pytest.raises(InfeasibleDesign):
        optimize_shape(Budget(3), 4, Workload("x", 8, 8, 8))
    with pytest.raises(InfeasibleDesign):
        optimize_shape(Budget(64), 4, Workload("x", 8, 3, 8))
    with pytest.raises(ValueError, match="cap"):
        optimize_shape(Budget(4096, max_tiers=4), 5, RN0)


@settings(max_examples=120, deadline=None)
@given(st.integers(1, 1024), st.integers(1, 16), st.integers(1, 128), st.integers(1, 300), st.integers(1, 128))
def test_matches_brute_force(macs, tiers, m, k, n):
    if tiers > k or macs // tiers < 1:
        return
    p = optimize_shape(Budget(macs), tiers, Workload("w", m, k, n))
    assert (p.cycles, p.shape.rows, p.shape.cols) == brute_force(macs, tiers, m, k, n)
    assert p.shape.mac_count() <= macs


@settings(max_examples=60, deadline=None)
@given(st.integers(1, 4096), st.integers(1, 4096), st.integers(1, 8),
       st.integers(1, 200), st.integers(8, 2000), st.integers(1, 200))
def test_budget_monotone(b1, b2, tiers, m, k, n):
    lo, hi = sorted((b1, b2))
    if lo // tiers < 1:
        return
    w = Workload("w", m, k, n)
    assert optimize_shape(Budget(hi), tiers, w).cycles <= optimize_shape(Budget(lo), tiers, w).cycles


@given(st.integers(1, 100), st.integers(1, 3000), st.integers(1, 100), st.integers(1, 8), st.integers(0, 10**5))
def test_saturation(m, k, n, tiers, extra):
    if tiers > k:
        return
    w = Workload("w", m, k, n)
    enough = tiers * m * n
    assert optimize_shape(Budget(enough + extra), tiers, w).cycles == optimize_shape(Budget(enough), tiers, w).cycles
    assert optimize_shape(Budget(enough), tiers, w).cycles == latency_3d(ArrayShape(m, n, tiers), w).total_cycles


def test_sweep_tiers_rn0():
    points = sweep_tiers(Budget(2**18), RN0, range(1, 13))
    assert points[0].speedup_vs_2d == 1.0
    assert 8.0 <= points[11].speedup_vs_2d <= 10.0


def test_sweep_tiers_small_k_slowdown():
    w = Workload("x", 64, 255, 147)
    (p,) = sweep_tiers(Budget(2**12), w, [2])
    assert p.speedup_vs_2d < 1


def test_sweep_tiers_skips_infeasible():
    w = Workload("x", 4, 3, 4)
    points = sweep_tiers(Budget(8), w, [1, 2, 3, 4, 9])
    assert [type(p) for p in points] == [DesignPoint, DesignPoint, DesignPoint, SkippedPoint, SkippedPoint]
    with pytest.raises(ValueError):
        sweep_tiers(Budget(8), w, [])
    with pytest.raises(ValueError):
        sweep_tiers(Budget(8, max_tiers=4), w, [5])


def test_sweep_budget_threshold():
    w = Workload("x", 64, 8192, 512)
    sweep = sweep_budget(4, w, [2**e for e in range(8, 20)])
    assert sweep.analytic_threshold == 64 * 512 == 2**15
    assert sweep.first_speedup_budget is not None and sweep.first_speedup_budget > sweep.analytic_threshold
    with pytest.raises(ValueError):
        sweep_budget(4, w, [])
    with pytest.raises(ValueError):
        sweep_budget(4, w, [4096, 1024])


FIG_GRID_BUDGETS = [2**e for e in range(8, 20)]


@pytest.mark.parametrize("n", [64, 512, 2048])
@pytest.mark.parametrize("k", [1024, 8192, 16384])
def test_threshold_implication_on_grid(n, k):
    w = Workload("g", 64, k, n)
    for tiers in range(2, 17):
        for p in sweep_budget(tiers, w, FIG_GRID_BUDGETS).points:
            if isinstance(p, DesignPoint) and p.speedup_vs_2d > 1:
                assert p.budget > w.m * w.n


def test_threshold_implication_is_not_universal():
    # small K relative to the planar optimum lets a two-tier split win below m*n
    p = optimize_shape(Budget(4096), 2, Workload("x", 64, 784, 147))
    assert 4096 < 64 * 147 and p.speedup_vs_2d > 1
    p = optimize_shape(Budget(4096), 2, RN0)
    assert 4096 < RN0.m * RN0.n and p.speedup_vs_2d > 1


def test_threshold_spot_check_at_mn_budget_and_above():
    w = Workload("x", 64, 2**14, 512)
    at = optimize_shape(Budget(64 * 512), 4, w)
    assert at.speedup_vs_2d <= 1
    above = optimize_shape(Budget(64 * 512 * 4), 4, w)
    assert above.speedup_vs_2d > 1


def test_tier_study_determinism_and_shape():
    s1 = optimal_tier_study(5, [4096, 2**15], rng_seed=11)
    s2 = optimal_tier_study(5, [4096, 2**15], rng_seed=11)
    assert s1.optima == s2.optima
    assert all(len(v) == 5 for v in s1.optima.values())
    assert all(1 <= t <= 16 for v in s1.optima.values() for t in v)
    single = optimal_tier_study(1, [2**15], rng_seed=3)
    assert single.optima == optimal_tier_study(1, [2**15], rng_seed=3).optima


def test_tier_study_k1_workloads():
    ws = WorkloadSet(tuple(Workload(f"w{i}", 16 + i, 1, 20) for i in range(4)), source="test")
    study = optimal_tier_study(4, [4096, 2**18], rng_seed=0, workloads=ws)
    assert all(t == 1 for v in study.optima.values() for t in v)


def test_optimal_tiers_matches_scan():
    budget = Budget(2**15)
    w = Workload("x", 100, 3000, 90)
    best = optimal_tiers(budget, w)
    scan = min((optimize_shape(budget, t, w).cycles, optimize_shape(budget, t, w).shape.rows,
                optimize_shape(budget, t, w).shape.cols, t) for t in range(1, 17))
    assert (best.cycles, best.shape.rows, best.shape.cols, best.tiers) == scan
