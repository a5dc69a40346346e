"""
Closed-form latency model for output-stationary systolic arrays.

A 2D array of ``rows x cols`` MACs runs a GEMM ``A(M x K) @ B(K x N)`` in
``ceil(M/rows) * ceil(N/cols)`` serialized folds. Each fold costs

    fill (rows + cols - 2) + compute (K) + drain (rows)

cycles. The stacked variant splits K across ``tiers`` identical tiers, each
tier accumulating a ``ceil(K/tiers)`` slice in place, followed by
``tiers - 1`` serialized vertical additions down every pile of MACs.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum


def ceil_div(a: int, b: int) -> int:
    return -(-a // b)


class SplitDim(str, Enum):
    """Dimension distributed over independent tiers in the scale-out baseline."""

    M = "M"
    N = "N"


@dataclass(frozen=True)
class Workload:
    """A GEMM instance A(m x k) @ B(k x n)."""

    name: str
    m: int
    k: int
    n: int

    def __post_init__(self):
        for dim in ("m", "k", "n"):
            value = getattr(self, dim)
            if not isinstance(value, int) or isinstance(value, bool) or value < 1:
                raise ValueError(f"workload {self.name!r}: {dim} must be a positive integer, got {value!r}")

    @property
    def dims(self) -> tuple[int, int, int]:
        return (self.m, self.k, self.n)


@dataclass(frozen=True)
class ArrayShape:
    """Rows and columns per tier plus the tier count (1 for a planar array)."""

    rows: int
    cols: int
    tiers: int = 1

    def __post_init__(self):
        for dim in ("rows", "cols", "tiers"):
            value = getattr(self, dim)
            if not isinstance(value, int) or isinstance(value, bool) or value < 1:
                raise ValueError(f"array {dim} must be a positive integer, got {value!r}")

    def mac_count(self) -> int:
        return self.rows * self.cols * self.tiers

    @classmethod
    def parse(cls, text: str) -> "ArrayShape":
        """Parse ``RxC`` or ``RxCxT``."""
        parts = text.lower().split("x")
        if len(parts) not in (2, 3):
            raise ValueError(f"shape must look like RxC or RxCxT, got {text!r}")
        try:
            values = [int(p) for p in parts]
        except ValueError:
            raise ValueError(f"shape must look like RxC or RxCxT, got {text!r}") from None
        return cls(*values)

    def __str__(self) -> str:
        return f"{self.rows}x{self.cols}x{self.tiers}"


@dataclass(frozen=True)
class LatencyEstimate:
    total_cycles: int
    folds: int
    fold_cycles: int
    fill_cycles: int
    compute_cycles: int
    reduce_cycles: int
    drain_cycles: int


def fold_count(shape: ArrayShape, w: Workload) -> int:
    return ceil_div(w.m, shape.rows) * ceil_div(w.n, shape.cols)


def _estimate(shape: ArrayShape, w: Workload, compute: int, reduce: int) -> LatencyEstimate:
    fill = shape.rows + shape.cols - 2
    drain = shape.rows
    per_fold = fill + compute + reduce + drain
    folds = fold_count(shape, w)
    return LatencyEstimate(
        total_cycles=per_fold * folds,
        folds=folds,
        fold_cycles=per_fold,
        fill_cycles=fill,
        compute_cycles=compute,
        reduce_cycles=reduce,
        drain_cycles=drain,
    )


def latency_2d(shape: ArrayShape, w: Workload) -> LatencyEstimate:
    """Latency of the planar output-stationary dataflow: ``(2R + C + K - 2)`` per fold."""
    if shape.tiers != 1:
        raise ValueError(f"latency_2d needs a single-tier shape, got {shape.tiers} tiers (use latency_3d)")
    return _estimate(shape, w, compute=w.k, reduce=0)


def latency_3d(shape: ArrayShape, w: Workload) -> LatencyEstimate:
    """Latency of the distributed output-stationary dataflow.

    Per fold: ``2R' + C' + ceil(K/l) + l - 1 - 2`` where ``l`` is the tier count.
    Reduces to :func:`latency_2d` for a single tier.
    """
    if shape.tiers > w.k:
        raise ValueError(
            f"{shape.tiers} tiers exceed K={w.k} for {w.name!r}: some tiers would get an empty K slice"
        )
    return _estimate(shape, w, compute=ceil_div(w.k, shape.tiers), reduce=shape.tiers - 1)


def latency_scaleout(per_tier_shape: ArrayShape, tiers: int, w: Workload,
                     split_dim: SplitDim | str = SplitDim.M) -> LatencyEstimate:
    """Independent tiers each running a planar slice of M (or N); no vertical traffic."""
    split_dim = SplitDim(split_dim)
    if tiers < 1:
        raise ValueError(f"tiers must be >= 1, got {tiers}")
    extent = w.m if split_dim is SplitDim.M else w.n
    if extent < tiers:
        raise ValueError(f"cannot split {split_dim.value}={extent} over {tiers} tiers")
    share = ceil_div(extent, tiers)
    if split_dim is SplitDim.M:
        sub = Workload(w.name, share, w.k, w.n)
    else:
        sub = Workload(w.name, w.m, w.k, share)
    return latency_2d(per_tier_shape, sub)


def speedup(baseline: LatencyEstimate, candidate: LatencyEstimate) -> float:
    if baseline.total_cycles <= 0 or candidate.total_cycles <= 0:
        raise ValueError("speedup needs estimates with a positive cycle count")
    return baseline.total_cycles / candidate.total_cycles


def reduction_term(k: int, tiers: int) -> int:
    return ceil_div(k, tiers) + tiers


def reduction_optimal_tiers(k: int) -> int:
    """Tier count minimizing ``ceil(k/l) + l``; the smallest minimizer wins ties.

    The minimum is at most ``2*sqrt(k) + 2`` and ``k/l + l - 2*sqrt(k)`` equals
    ``(l - sqrt(k))**2 / l``, so every minimizer lies within ``sqrt(2*l)`` of
    ``sqrt(k)``; the scanned window is a safe superset of that band.
    """
    if k < 1:
        raise ValueError(f"k must be >= 1, got {k}")
    root = math.isqrt(k)
    slack = 2 * math.isqrt(root + 1) + 3
    lo = max(1, root - slack)
    hi = min(k, root + slack)
    return min(range(lo, hi + 1), key=lambda t: (reduction_term(k, t), t))
