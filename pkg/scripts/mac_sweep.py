"""Optimized speedup over MAC budget for an (N, K) grid at a fixed tier count.

Also reports where the first speedup appears relative to the M*N threshold.
"""

import argparse
from pathlib import Path

from systolic3d.cli import emit_plot_data
from systolic3d.model import Workload
from systolic3d.optimizer import DesignPoint, sweep_budget


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--m", type=int, default=64)
    ap.add_argument("--n", type=int, nargs="+", default=[64, 512, 2048])
    ap.add_argument("--k", type=int, nargs="+", default=[1024, 8192, 16384])
    ap.add_argument("--tiers", type=int, default=4)
    ap.add_argument("--min-exp", type=int, default=8)
    ap.add_argument("--max-exp", type=int, default=19)
    ap.add_argument("--out", type=Path, default=Path("results/mac_sweep.csv"))
    args = ap.parse_args()
    args.out.parent.mkdir(parents=True, exist_ok=True)

    budgets = [2**e for e in range(args.min_exp, args.max_exp + 1)]
    rows = []
    for n in args.n:
        for k in args.k:
            sweep = sweep_budget(args.tiers, Workload(f"N{n}K{k}", args.m, k, n), budgets)
            peak = 0.0
            for p in sweep.points:
                if isinstance(p, DesignPoint):
                    rows.append({"N": n, "K": k, "macs": p.budget, "total_cycles": p.cycles,
                                 "speedup_vs_2d": p.speedup_vs_2d, "above_threshold": p.budget > args.m * n})
                    peak = max(peak, p.speedup_vs_2d)
            print(f"N={n:<5} K={k:<6} threshold {sweep.analytic_threshold:>7}  first speedup at "
                  f"{sweep.first_speedup_budget}  peak {peak:.3f}")
    emit_plot_data(rows, args.out, metadata={"M": args.m, "tiers": args.tiers})
    print(f"wrote {len(rows)} points to {args.out}")


if __name__ == "__main__":
    main()
