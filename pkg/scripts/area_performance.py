"""Area-normalized performance of TSV and MIV stacks against the planar array.

Uses the placeholder technology constants unless --tech names a key = value file.
"""

import argparse
from pathlib import Path

from systolic3d.cli import emit_plot_data
from systolic3d.costmodel import TechParams, load_tech_params, perf_per_area
from systolic3d.model import Workload
from systolic3d.optimizer import Budget, optimize_shape


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--mkn", type=int, nargs=3, default=[64, 12100, 147], metavar=("M", "K", "N"))
    ap.add_argument("--macs", type=int, default=2**18)
    ap.add_argument("--tech", type=Path)
    ap.add_argument("--out", type=Path, default=Path("results/area_performance.csv"))
    args = ap.parse_args()
    args.out.parent.mkdir(parents=True, exist_ok=True)

    tech = load_tech_params(args.tech) if args.tech else TechParams()
    w = Workload("w", *args.mkn)
    budget = Budget(args.macs)
    rows = []
    print(f"{'tiers':>5} {'speedup':>8} {'tsv':>7} {'miv':>7}")
    for t in range(2, budget.max_tiers + 1):
        spd = optimize_shape(budget, t, w).speedup_vs_2d
        tsv = perf_per_area(w, budget, t, "tsv", tech).perf_per_area_vs_2d
        miv = perf_per_area(w, budget, t, "miv", tech).perf_per_area_vs_2d
        rows.append({"tiers": t, "speedup_vs_2d": spd, "tsv_perf_per_area": tsv, "miv_perf_per_area": miv})
        print(f"{t:>5} {spd:>8.3f} {tsv:>7.3f} {miv:>7.3f}")
    emit_plot_data(rows, args.out, metadata={"M": w.m, "K": w.k, "N": w.n, "macs": args.macs,
                                             **{k: v for k, v in vars(tech).items()}})


if __name__ == "__main__":
    main()
