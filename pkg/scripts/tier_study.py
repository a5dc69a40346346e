"""Distribution of the latency-optimal tier count over random workloads."""

import argparse
from collections import Counter
from pathlib import Path

from systolic3d.cli import emit_plot_data
from systolic3d.optimizer import optimal_tier_study


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--n", type=int, default=300)
    ap.add_argument("--budgets", type=int, nargs="+", default=[2**12, 2**15, 2**18])
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--out", type=Path, default=Path("results/tier_study.csv"))
    args = ap.parse_args()
    args.out.parent.mkdir(parents=True, exist_ok=True)

    study = optimal_tier_study(args.n, args.budgets, args.seed)
    rows = [{"macs": macs, "workload": w.name, "M": w.m, "K": w.k, "N": w.n, "optimal_tiers": t}
            for macs in study.budgets for w, t in zip(study.workloads, study.optima[macs])]
    emit_plot_data(rows, args.out, metadata={"n": args.n, "seed": args.seed})
    for macs in study.budgets:
        hist = Counter(study.optima[macs])
        spread = " ".join(f"{t}:{hist[t]}" for t in sorted(hist))
        print(f"{macs:>7} MACs  median {study.medians[macs]:>4}  histogram {spread}")


if __name__ == "__main__":
    main()
