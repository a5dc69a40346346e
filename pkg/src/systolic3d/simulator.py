"""
Cycle-stepped functional simulator for output-stationary (OS) and
distributed output-stationary (dOS) systolic arrays.

Microarchitecture modelled per fold:

* Each tier is a ``rows x cols`` grid. Row ``i`` of A streams in from the
  left, column ``j`` of B from the top. Operands advance one cell every
  ``skew`` cycles through pipeline registers, so the streams of row ``i`` and
  column ``j`` are injected ``i*skew`` / ``j*skew`` cycles late and tier ``t``
  is delayed by a further ``t*skew``. Every operand carries its K index and
  each cell checks that the A and B tokens it multiplies agree.
* Tier ``t`` owns one contiguous K slice (slice sizes differ by at most one,
  the larger ones on top) and accumulates it in place.
* Cross-tier reduction runs top to bottom, one hop per cycle. A finished
  tier sends its accumulator to the cell below, which merges it in the same
  read-modify-write as its own final product (the MUX feeds the vertical
  input to the adder alongside the product) or, if that cell is already
  done, as a plain addition.
* When every pile of the bottom tier holds its final value the outputs drain
  through the bottom tier, one row per cycle (``rows`` cycles).

Folds run back to back with a full drain in between. They share no state and
their timing does not depend on data, so all folds of a run are stepped in
lockstep as a batch and their cycle spans are laid end to end.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import Callable, TextIO

import numpy as np

from .model import ArrayShape, Workload, ceil_div


class Dataflow(str, Enum):
    OS = "OS"
    DOS = "dOS"


class AccumulatorOverflow(ArithmeticError):
    def __init__(self, fold: int, tier: int, row: int, col: int, cycle: int, value: int, bits: int):
        self.fold, self.tier, self.row, self.col, self.cycle = fold, tier, row, col, cycle
        super().__init__(
            f"accumulator overflow ({bits}-bit) in fold {fold} at tier {tier}, cell ({row}, {col}), "
            f"local cycle {cycle}: value {value}"
        )


@dataclass(frozen=True)
class SimConfig:
    shape: ArrayShape
    dataflow: Dataflow = Dataflow.DOS
    skew: int = 1
    operand_bits: int = 8
    acc_bits: int = 32

    def __post_init__(self):
        object.__setattr__(self, "dataflow", Dataflow(self.dataflow))
        if self.dataflow is Dataflow.OS and self.shape.tiers != 1:
            raise ValueError("the OS dataflow runs on a single tier; use dOS for stacked arrays")
        if self.skew < 0:
            raise ValueError(f"skew must be >= 0, got {self.skew}")
        if not 2 <= self.operand_bits <= 32 or not 2 <= self.acc_bits <= 63:
            raise ValueError("operand_bits must be in [2, 32] and acc_bits in [2, 63]")


@dataclass(frozen=True)
class SkewSchedule:
    """Injection offsets in cycles; an element enters at ``tier + row`` (A) or ``tier + col`` (B) offset."""

    skew: int
    row_offsets: tuple[int, ...]
    col_offsets: tuple[int, ...]
    tier_offsets: tuple[int, ...]

    def a_start(self, tier: int, row: int) -> int:
        return self.tier_offsets[tier] + self.row_offsets[row]

    def b_start(self, tier: int, col: int) -> int:
        return self.tier_offsets[tier] + self.col_offsets[col]


def trace_skew_schedule(cfg: SimConfig, w: Workload | None = None) -> SkewSchedule:
    s, d = cfg.shape, cfg.skew
    if w is not None and cfg.dataflow is Dataflow.DOS and s.tiers > w.k:
        raise ValueError(f"{s.tiers} tiers exceed K={w.k}")
    return SkewSchedule(
        skew=d,
        row_offsets=tuple(i * d for i in range(s.rows)),
        col_offsets=tuple(j * d for j in range(s.cols)),
        tier_offsets=tuple(t * d for t in range(s.tiers)),
    )


def k_slices(k: int, tiers: int) -> list[tuple[int, int]]:
    """``(start, length)`` of each tier's K slice, top tier first."""
    base, extra = divmod(k, tiers)
    out, start = [], 0
    for t in range(tiers):
        length = base + (1 if t < extra else 0)
        out.append((start, length))
        start += length
    return out


@dataclass
class SimResult:
    cycles: int
    output: np.ndarray
    mac_active_cycles: tuple[int, ...]
    folds_executed: int
    fold_cycles: int


def utilization(result: SimResult, shape: ArrayShape) -> float:
    if result.cycles <= 0:
        raise ValueError("utilization of a zero-cycle run is undefined")
    return sum(result.mac_active_cycles) / (shape.mac_count() * result.cycles)


def _as_int_matrix(x, name: str, bits: int) -> np.ndarray:
    arr = np.asarray(x)
    if arr.ndim != 2:
        raise ValueError(f"{name} must be a 2-D matrix, got shape {arr.shape}")
    if arr.size == 0:
        raise ValueError(f"{name} is empty")
    if not np.issubdtype(arr.dtype, np.integer):
        raise TypeError(f"{name} must hold integers, got dtype {arr.dtype}")
    lo, hi = -(1 << (bits - 1)), (1 << (bits - 1)) - 1
    if arr.min() < lo or arr.max() > hi:
        raise ValueError(f"{name} has values outside the signed {bits}-bit operand range [{lo}, {hi}]")
    return arr.astype(np.int64)


def simulate(cfg: SimConfig, a, b, *, trace: TextIO | None = None,
             on_partials: Callable[[int, np.ndarray], None] | None = None) -> SimResult:
    """Run ``a @ b`` on the configured array and count cycles.

    ``trace`` receives one ``cycle tier row col event`` line per cell event:
    ``mac`` (in-place accumulate), ``merge`` (final product plus the partial
    from above), ``reduce`` (cross-tier addition only), ``send`` and ``drain``.
    ``on_partials(fold, partials)`` gets each fold's per-tier in-place partial
    sums (tiers x rows x cols) before cross-tier reduction is applied; their sum
    over tiers is the fold's output tile.
    """
    a = _as_int_matrix(a, "a", cfg.operand_bits)
    b = _as_int_matrix(b, "b", cfg.operand_bits)
    m, k = a.shape
    k2, n = b.shape
    if k != k2:
        raise ValueError(f"dimension mismatch: a is {m}x{k}, b is {k2}x{n}")
    shape = cfg.shape
    R, C, T = shape.rows, shape.cols, shape.tiers
    if T > k:
        raise ValueError(f"{T} tiers exceed K={k}: some tiers would get an empty K slice")
    d = cfg.skew
    sched = trace_skew_schedule(cfg)

    row_folds, col_folds = ceil_div(m, R), ceil_div(n, C)
    F = row_folds * col_folds

    # padded operand tiles, one per fold (row-fold major); index k is a bubble
    a_pad = np.zeros((row_folds * R, k + 1), dtype=np.int64)
    a_pad[:m, :k] = a
    b_pad = np.zeros((k + 1, col_folds * C), dtype=np.int64)
    b_pad[:k, :n] = b
    fr, fc = np.divmod(np.arange(F), col_folds)
    a_tiles = a_pad.reshape(row_folds, R, k + 1)[fr]  # (F, R, k+1)
    b_tiles = b_pad.reshape(k + 1, col_folds, C).transpose(1, 0, 2)[fc]  # (F, k+1, C)
    useful = ((fr[:, None] * R + np.arange(R))[:, :, None] < m) & ((fc[:, None] * C + np.arange(C))[:, None, :] < n)

    slices = k_slices(k, T)
    starts = np.array([s for s, _ in slices])
    lengths = np.array([length for _, length in slices])
    a_start = np.array([[sched.a_start(t, i) for i in range(R)] for t in range(T)])  # (T, R)
    b_start = np.array([[sched.b_start(t, j) for j in range(C)] for t in range(T)])  # (T, C)

    la, lb = (C - 1) * d + 1, (R - 1) * d + 1
    a_val = np.zeros((F, T, R, la), dtype=np.int64)
    a_tok = np.full((T, R, la), -1, dtype=np.int64)
    b_val = np.zeros((F, T, lb, C), dtype=np.int64)
    b_tok = np.full((T, lb, C), -1, dtype=np.int64)
    a_tap = np.arange(C) * d
    b_tap = np.arange(R) * d

    acc = np.zeros((F, T, R, C), dtype=np.int64)
    partial = np.zeros_like(acc) if on_partials else None
    vert_in = np.zeros_like(acc)
    vert_valid = np.zeros((T, R, C), dtype=bool)
    merged = np.zeros((T, R, C), dtype=bool)
    merged[0] = True
    sent = np.zeros((T, R, C), dtype=bool)
    done_macs = np.zeros((T, R, C), dtype=np.int64)
    need = lengths[:, None, None]
    active = np.zeros(T, dtype=np.int64)
    acc_lo, acc_hi = -(1 << (cfg.acc_bits - 1)), (1 << (cfg.acc_bits - 1)) - 1

    events: list[tuple[int, np.ndarray, str]] = []  # (local cycle, tier/row/col mask, event)
    rows_idx = np.arange(R)[None, :]
    cols_idx = np.arange(C)[None, :]
    partials_reported = False

    cycle = 0
    while True:
        # operands advance one register per cycle, then new elements enter at position 0
        if la > 1:
            a_val[..., 1:] = a_val[..., :-1]
            a_tok[..., 1:] = a_tok[..., :-1]
        if lb > 1:
            b_val[:, :, 1:, :] = b_val[:, :, :-1, :]
            b_tok[:, 1:, :] = b_tok[:, :-1, :]
        kk = cycle - a_start
        live = (kk >= 0) & (kk < lengths[:, None])
        kidx = np.where(live, starts[:, None] + kk, k)
        a_val[..., 0] = a_tiles[:, rows_idx, kidx]
        a_tok[..., 0] = np.where(live, kidx, -1)
        kk = cycle - b_start
        live = (kk >= 0) & (kk < lengths[:, None])
        kidx = np.where(live, starts[:, None] + kk, k)
        b_val[:, :, 0, :] = b_tiles[:, kidx, cols_idx]
        b_tok[:, 0, :] = np.where(live, kidx, -1)

        ta = a_tok[:, :, a_tap]  # (T, R, C)
        tb = b_tok[:, b_tap, :]
        fire = ta >= 0
        if not np.array_equal(fire, tb >= 0) or not np.array_equal(ta[fire], tb[fire]):
            raise RuntimeError(f"operand streams misaligned at local cycle {cycle}")
        product = np.where(fire, a_val[:, :, :, a_tap] * b_val[:, :, b_tap, :], 0)

        merge = vert_valid & ~merged
        acc += product
        if partial is not None:
            partial += product
        if merge.any():
            acc += np.where(merge, vert_in, 0)
            merged |= merge
            vert_valid &= ~merge
        if acc.min() < acc_lo or acc.max() > acc_hi:
            f, t, i, j = np.argwhere((acc < acc_lo) | (acc > acc_hi))[0]
            raise AccumulatorOverflow(int(f), int(t), int(i), int(j), cycle, int(acc[f, t, i, j]), cfg.acc_bits)

        done_macs += fire
        active += (fire[None] & useful[:, None]).sum(axis=(0, 2, 3))
        finished = done_macs == need
        if trace is not None:
            events.append((cycle, fire, "mac"))
            events.append((cycle, merge & fire, "merge"))
            events.append((cycle, merge & ~fire, "reduce"))

        if partial is not None and not partials_reported and finished.all():
            for f in range(F):
                on_partials(f, partial[f].copy())
            partials_reported = True

        # finished tiers hand their sum to the cell below; it arrives next cycle
        send = finished & merged & ~sent
        send[-1] = False
        if send.any():
            vert_in[:, 1:] = np.where(send[None, :-1], acc[:, :-1], vert_in[:, 1:])
            vert_valid[1:] |= send[:-1]
            sent |= send
            if trace is not None:
                events.append((cycle, send, "send"))

        cycle += 1
        if (finished[-1] & merged[-1]).all():
            break

    compute_span = cycle
    # drain through the bottom tier, bottom row first
    output_tiles = np.zeros((F, R, C), dtype=np.int64)
    shift = acc[:, -1].copy()
    for step in range(R):
        output_tiles[:, R - 1 - step] = shift[:, R - 1]
        shift[:, 1:] = shift[:, :-1]
        shift[:, 0] = 0
        if trace is not None:
            row_mask = np.zeros((T, R, C), dtype=bool)
            row_mask[-1, R - 1 - step] = True
            events.append((compute_span + step, row_mask, "drain"))
    fold_cycles = compute_span + R

    output = output_tiles.reshape(row_folds, col_folds, R, C).transpose(0, 2, 1, 3)
    output = output.reshape(row_folds * R, col_folds * C)[:m, :n].copy()

    if trace is not None:
        _write_trace(trace, events, F, fold_cycles)

    return SimResult(
        cycles=fold_cycles * F,
        output=output,
        mac_active_cycles=tuple(int(x) for x in active),
        folds_executed=F,
        fold_cycles=fold_cycles,
    )


def _write_trace(out: TextIO, events, folds: int, fold_cycles: int) -> None:
    out.write("# cycle tier row col event\n")
    records = []
    for local, mask, name in events:
        for t, i, j in np.argwhere(mask):
            records.append((local, int(t), int(i), int(j), name))
    records.sort()
    for f in range(folds):
        base = f * fold_cycles
        for local, t, i, j, name in records:
            out.write(f"{base + local} {t} {i} {j} {name}\n")


def reference_matmul(a, b) -> np.ndarray:
    """Plain triple-loop product on Python ints."""
    a = np.asarray(a).tolist()
    b = np.asarray(b).tolist()
    m, k, n = len(a), len(b), len(b[0])
    out = [[0] * n for _ in range(m)]
    for i in range(m):
        for j in range(n):
            s = 0
            for p in range(k):
                s += a[i][p] * b[p][j]
            out[i][j] = s
    return np.array(out, dtype=np.int64)
