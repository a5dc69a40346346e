"""
Array-shape search under a MAC budget, tier/budget sweeps and the
randomized optimal-tier study.

Every tier gets ``floor(macs / tiers)`` MACs and the same ``rows x cols``
grid with ``rows * cols <= floor(macs / tiers)``.

The search only visits *fold-canonical* sizes: for a fixed row fold count
``f = ceil(m / rows)`` the smallest row count with that fold count,
``ceil(m / f)``, is never slower (latency grows with ``rows`` at a fixed
fold count) and never costs more MACs. The same holds for columns, so
the minimizer over all feasible shapes is always canonical. This takes
the search from O(m * n) shapes to O(sqrt(m) * sqrt(n)) while returning
the exact same answer, ties included (smaller rows, then smaller cols).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache
from typing import Sequence

import numpy as np

from .model import ArrayShape, LatencyEstimate, Workload, ceil_div, latency_3d
from .workloads import WorkloadRanges, WorkloadSet, generate_random


class InfeasibleDesign(ValueError):
    """The budget cannot host the requested tier count for this workload."""


@dataclass(frozen=True)
class Budget:
    macs: int
    max_tiers: int = 16

    def __post_init__(self):
        if self.macs < 1:
            raise ValueError(f"MAC budget must be >= 1, got {self.macs}")
        if self.max_tiers < 1:
            raise ValueError(f"max_tiers must be >= 1, got {self.max_tiers}")

    def per_tier(self, tiers: int) -> int:
        # round down: never provision more MACs than the budget
        return self.macs // tiers


@dataclass(frozen=True)
class DesignPoint:
    shape: ArrayShape
    estimate: LatencyEstimate
    speedup_vs_2d: float
    budget: int

    @property
    def tiers(self) -> int:
        return self.shape.tiers

    @property
    def cycles(self) -> int:
        return self.estimate.total_cycles


@dataclass(frozen=True)
class SkippedPoint:
    """Marker for a sweep entry that has no feasible design."""

    tiers: int
    budget: int
    reason: str


@lru_cache(maxsize=4096)
def _canonical_sizes(extent: int) -> np.ndarray:
    folds = np.arange(1, extent + 1, dtype=np.int64)
    return np.unique(-(-extent // folds))


def _check_tiers(budget: Budget, tiers: int, w: Workload) -> int:
    if tiers < 1:
        raise ValueError(f"tiers must be >= 1, got {tiers}")
    if tiers > budget.max_tiers:
        raise ValueError(f"{tiers} tiers exceed the manufacturing cap of {budget.max_tiers}")
    if tiers > w.k:
        raise InfeasibleDesign(f"{tiers} tiers exceed K={w.k} of {w.name!r}")
    per_tier = budget.per_tier(tiers)
    if per_tier < 1:
        raise InfeasibleDesign(f"budget of {budget.macs} MACs leaves no MAC per tier for {tiers} tiers")
    return per_tier


def best_shape(per_tier_macs: int, tiers: int, w: Workload) -> tuple[int, int, int]:
    """Return ``(total_cycles, rows, cols)`` of the fastest grid with ``rows*cols <= per_tier_macs``."""
    rows = _canonical_sizes(w.m)
    cols = _canonical_sizes(w.n)
    rows = rows[rows <= per_tier_macs]
    cols = cols[cols <= per_tier_macs]
    row_folds = -(-w.m // rows)
    col_folds = -(-w.n // cols)
    k_term = ceil_div(w.k, tiers) + tiers - 3
    cycles = (2 * rows[:, None] + cols[None, :] + k_term) * row_folds[:, None] * col_folds[None, :]
    cycles = np.where(rows[:, None] * cols[None, :] <= per_tier_macs, cycles, np.iinfo(np.int64).max)
    # row-major argmin returns the first minimum: smallest rows, then smallest cols
    flat = int(np.argmin(cycles))
    i, j = divmod(flat, cycles.shape[1])
    return int(cycles[i, j]), int(rows[i]), int(cols[j])


def _optimize(budget: Budget, tiers: int, w: Workload) -> tuple[ArrayShape, LatencyEstimate]:
    per_tier = _check_tiers(budget, tiers, w)
    _, r, c = best_shape(per_tier, tiers, w)
    shape = ArrayShape(r, c, tiers)
    return shape, latency_3d(shape, w)


def optimize_shape(budget: Budget, tiers: int, w: Workload) -> DesignPoint:
    """Fastest identical-tier shape for ``w`` using at most ``budget.macs`` MACs."""
    shape, est = _optimize(budget, tiers, w)
    if tiers == 1:
        base = est
    else:
        _, base = _optimize(budget, 1, w)
    return DesignPoint(shape, est, base.total_cycles / est.total_cycles, budget.macs)


def _feasibility(budget: Budget, tiers: int, w: Workload) -> str | None:
    if tiers > w.k:
        return f"tiers > K ({w.k})"
    if budget.per_tier(tiers) < 1:
        return f"floor({budget.macs}/{tiers}) = 0 MACs per tier"
    return None


def sweep_tiers(budget: Budget, w: Workload, tier_range: Sequence[int]) -> list[DesignPoint | SkippedPoint]:
    """Optimize at every tier count; speedups are relative to the optimized planar array."""
    if not tier_range:
        raise ValueError("tier_range is empty")
    for t in tier_range:
        if t < 1 or t > budget.max_tiers:
            raise ValueError(f"tier count {t} outside [1, {budget.max_tiers}]")
    _, base = _optimize(budget, 1, w)
    out: list[DesignPoint | SkippedPoint] = []
    for t in tier_range:
        reason = _feasibility(budget, t, w)
        if reason:
            out.append(SkippedPoint(t, budget.macs, reason))
            continue
        shape, est = _optimize(budget, t, w)
        out.append(DesignPoint(shape, est, base.total_cycles / est.total_cycles, budget.macs))
    return out


@dataclass(frozen=True)
class BudgetSweep:
    tiers: int
    workload: Workload
    points: list[DesignPoint | SkippedPoint]
    # smallest swept budget where the stacked array beats the planar one
    first_speedup_budget: int | None
    # M*N: stacking needs strictly more MACs than this to pay off
    analytic_threshold: int


def sweep_budget(tiers: int, w: Workload, budgets: Sequence[int], max_tiers: int = 16) -> BudgetSweep:
    if not budgets:
        raise ValueError("budget list is empty")
    if any(b2 <= b1 for b1, b2 in zip(budgets, budgets[1:])):
        raise ValueError("budgets must be strictly ascending")
    points: list[DesignPoint | SkippedPoint] = []
    first = None
    for macs in budgets:
        budget = Budget(macs, max_tiers)
        reason = _feasibility(budget, tiers, w)
        if reason:
            points.append(SkippedPoint(tiers, macs, reason))
            continue
        point = optimize_shape(budget, tiers, w)
        points.append(point)
        if first is None and point.speedup_vs_2d > 1:
            first = macs
    return BudgetSweep(tiers, w, points, first, w.m * w.n)


@dataclass
class TierStudy:
    budgets: list[int]
    workloads: WorkloadSet
    # budget -> optimal tier count per workload, in workload order
    optima: dict[int, list[int]] = field(default_factory=dict)

    def median(self, budget: int) -> float:
        return float(np.median(self.optima[budget]))

    @property
    def medians(self) -> dict[int, float]:
        return {b: self.median(b) for b in self.budgets}


def optimal_tiers(budget: Budget, w: Workload) -> DesignPoint:
    """Best design over every feasible tier count, ties by (cycles, rows, cols, tiers)."""
    best = None
    for t in range(1, min(budget.max_tiers, w.k) + 1):
        per_tier = budget.per_tier(t)
        if per_tier < 1:
            break
        cycles, r, c = best_shape(per_tier, t, w)
        key = (cycles, r, c, t)
        if best is None or key < best:
            best = key
    if best is None:
        raise InfeasibleDesign(f"no feasible design for {w.name!r} at {budget.macs} MACs")
    _, r, c, t = best
    shape = ArrayShape(r, c, t)
    est = latency_3d(shape, w)
    _, base = _optimize(budget, 1, w)
    return DesignPoint(shape, est, base.total_cycles / est.total_cycles, budget.macs)


def optimal_tier_study(n_workloads: int, budgets: Sequence[int], rng_seed: int, max_tiers: int = 16,
                       ranges: WorkloadRanges | None = None,
                       workloads: WorkloadSet | None = None) -> TierStudy:
    """Distribution of the latency-optimal tier count over random workloads.

    ``workloads`` overrides the random draw (``n_workloads`` is then ignored).
    """
    if workloads is None:
        workloads = generate_random(n_workloads, ranges, seed=rng_seed)
    study = TierStudy(list(budgets), workloads)
    for macs in budgets:
        budget = Budget(macs, max_tiers)
        study.optima[macs] = [optimal_tiers(budget, w).tiers for w in workloads]
    return study
