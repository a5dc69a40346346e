"""Optimized speedup over tier count for a family of K values and MAC budgets.

Writes one plot-data CSV per budget into --out-dir.
"""

import argparse
from pathlib import Path

from systolic3d.cli import emit_plot_data
from systolic3d.model import Workload
from systolic3d.optimizer import Budget, DesignPoint, sweep_tiers

K_VALUES = (255, 1024, 4096, 12100, 16384)


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--m", type=int, default=64)
    ap.add_argument("--n", type=int, default=147)
    ap.add_argument("--budgets", type=int, nargs="+", default=[2**12, 2**15, 2**18])
    ap.add_argument("--max-tiers", type=int, default=16)
    ap.add_argument("--out-dir", type=Path, default=Path("results"))
    args = ap.parse_args()
    args.out_dir.mkdir(parents=True, exist_ok=True)

    for macs in args.budgets:
        rows = []
        for k in K_VALUES:
            w = Workload(f"K{k}", args.m, k, args.n)
            for p in sweep_tiers(Budget(macs, args.max_tiers), w, range(1, args.max_tiers + 1)):
                if not isinstance(p, DesignPoint):
                    continue
                rows.append({"K": k, "tiers": p.tiers, "rows": p.shape.rows, "cols": p.shape.cols,
                             "total_cycles": p.cycles, "speedup_vs_2d": p.speedup_vs_2d})
        path = emit_plot_data(rows, args.out_dir / f"tier_sweep_{macs}.csv",
                              metadata={"M": args.m, "N": args.n, "macs": macs})
        best = max(rows, key=lambda r: r["speedup_vs_2d"])
        print(f"{macs:>7} MACs: best speedup {best['speedup_vs_2d']:.3f} (K={best['K']}, {best['tiers']} tiers) -> {path}")


if __name__ == "__main__":
    main()
