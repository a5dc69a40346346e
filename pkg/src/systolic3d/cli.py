"""Command-line front end: ``systolic3d <command> ...`` (also ``python -m systolic3d``)."""

from __future__ import annotations

import argparse
import csv
import io
import re
import sys
from pathlib import Path
from typing import Any, Sequence

import numpy as np

from . import costmodel
from .model import ArrayShape, SplitDim, Workload, latency_3d, latency_scaleout
from .optimizer import Budget, DesignPoint, InfeasibleDesign, SkippedPoint, optimal_tier_study, optimize_shape, \
    sweep_budget, sweep_tiers
from .simulator import Dataflow, SimConfig, reference_matmul, simulate, utilization
from .workloads import WorkloadFormatError, WorkloadRanges, WorkloadSet, builtin_table1, load_csv

WORKLOAD_COLUMNS = {
    "workload": "workload name",
    "M": "rows of A",
    "K": "inner dimension",
    "N": "columns of B",
}

COLUMNS: dict[str, dict[str, str]] = {
    "latency": {
        **WORKLOAD_COLUMNS,
        "rows": "array rows per tier",
        "cols": "array columns per tier",
        "tiers": "tier count",
        "model": "dos (distributed output stationary) or scaleout-M / scaleout-N",
        "folds": "serialized folds ceil(M/rows)*ceil(N/cols)",
        "fill_cycles": "rows + cols - 2",
        "compute_cycles": "in-place accumulate cycles per fold",
        "reduce_cycles": "cross-tier reduction cycles per fold",
        "drain_cycles": "output drain cycles per fold",
        "fold_cycles": "cycles per fold",
        "total_cycles": "fold_cycles * folds",
    },
    "simulate": {
        **WORKLOAD_COLUMNS,
        "rows": "array rows per tier",
        "cols": "array columns per tier",
        "tiers": "tier count",
        "dataflow": "OS or dOS",
        "skew": "per-hop injection skew in cycles",
        "seed": "operand RNG seed",
        "folds": "folds executed",
        "sim_cycles": "simulated cycles",
        "model_cycles": "analytical total_cycles for the same shape",
        "utilization": "active MAC cycles / (MACs * cycles)",
        "output_matches_reference": "1 if the simulated product equals the reference GEMM",
    },
    "optimize": {
        **WORKLOAD_COLUMNS,
        "macs": "MAC budget",
        "tiers": "tier count",
        "rows": "optimized rows per tier",
        "cols": "optimized columns per tier",
        "macs_used": "rows * cols * tiers",
        "folds": "serialized folds",
        "total_cycles": "latency of the optimized shape",
        "baseline_rows": "rows of the optimized planar array at the same budget",
        "baseline_cols": "columns of the optimized planar array",
        "baseline_cycles": "latency of the optimized planar array",
        "speedup_vs_2d": "baseline_cycles / total_cycles",
    },
    "sweep-tiers": {
        "workload": "workload name",
        "macs": "MAC budget",
        "tiers": "tier count",
        "status": "ok or infeasible",
        "rows": "optimized rows per tier",
        "cols": "optimized columns per tier",
        "macs_used": "rows * cols * tiers",
        "folds": "serialized folds",
        "total_cycles": "latency of the optimized shape",
        "baseline_rows": "rows of the optimized planar array (normalization point)",
        "baseline_cols": "columns of the optimized planar array",
        "baseline_cycles": "latency of the optimized planar array",
        "speedup_vs_2d": "baseline_cycles / total_cycles",
    },
    "sweep-macs": {
        "workload": "workload name",
        "tiers": "tier count",
        "macs": "MAC budget",
        "status": "ok or infeasible",
        "rows": "optimized rows per tier",
        "cols": "optimized columns per tier",
        "macs_used": "rows * cols * tiers",
        "total_cycles": "latency of the optimized shape",
        "baseline_rows": "rows of the optimized planar array at this budget",
        "baseline_cols": "columns of the optimized planar array",
        "baseline_cycles": "latency of the optimized planar array",
        "speedup_vs_2d": "baseline_cycles / total_cycles",
        "above_threshold": "1 if macs > M*N",
    },
    "tier-study": {
        **WORKLOAD_COLUMNS,
        "macs": "MAC budget",
        "optimal_tiers": "latency-optimal tier count (ties: fewer rows, cols, tiers)",
        "rows": "rows per tier at the optimum",
        "cols": "columns per tier at the optimum",
        "total_cycles": "latency at the optimum",
        "speedup_vs_2d": "speedup of the optimum over the optimized planar array",
    },
    "perf-area": {
        "workload": "workload name",
        "macs": "MAC budget",
        "tiers": "tier count",
        "link": "tsv or miv (none for the planar baseline)",
        "rows": "optimized rows per tier",
        "cols": "optimized columns per tier",
        "total_cycles": "latency of the optimized shape",
        "speedup_vs_2d": "latency speedup over the optimized planar array",
        "footprint_um2": "largest tier area",
        "total_silicon_um2": "area summed over tiers",
        "baseline_area_um2": "area of the planar array with the full budget",
        "perf_per_area_vs_2d": "(1/latency)/area relative to the planar array",
    },
    "verify": {
        "case": "case index",
        "dataflow": "OS or dOS",
        "rows": "array rows per tier",
        "cols": "array columns per tier",
        "tiers": "tier count",
        "M": "rows of A",
        "K": "inner dimension",
        "N": "columns of B",
        "folds": "folds executed",
        "sim_cycles": "simulated cycles",
        "model_cycles": "analytical total_cycles",
        "cycles_match": "1 if sim_cycles == model_cycles",
        "output_match": "1 if the simulated product equals the reference GEMM",
    },
}


class CliError(Exception):
    pass


# -- plot data ---------------------------------------------------------------

# ratios get 4 significant digits, other reals (areas) keep full precision
RATIO_COLUMNS = {"speedup_vs_2d", "perf_per_area_vs_2d", "utilization"}


def _fmt(value: Any, ratio: bool = True) -> str:
    if isinstance(value, bool):
        return "1" if value else "0"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        return f"{float(value):.4g}" if ratio else repr(float(value))
    if value is None:
        return ""
    return str(value)


def format_plot_data(rows: Sequence[dict], columns: Sequence[str], metadata: dict | None = None) -> str:
    buf = io.StringIO()
    for key, value in (metadata or {}).items():
        buf.write(f"# {key}: {_fmt(value)}\n")
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(columns)
    for row in rows:
        writer.writerow([_fmt(row.get(c), c in RATIO_COLUMNS) for c in columns])
    return buf.getvalue()


def emit_plot_data(rows: Sequence[dict], path: str | Path, columns: Sequence[str] | None = None,
                   metadata: dict | None = None) -> Path:
    """Write a ``# key: value`` metadata block followed by a CSV table."""
    if not rows:
        raise ValueError("no data points to write")
    columns = list(columns or rows[0].keys())
    path = Path(path)
    path.write_text(format_plot_data(rows, columns, metadata), encoding="utf-8")
    return path


def _parse_cell(text: str) -> Any:
    if text == "":
        return None
    if re.fullmatch(r"-?\d+", text):
        return int(text)
    try:
        return float(text)
    except ValueError:
        return text


def read_plot_data(path: str | Path) -> tuple[dict[str, str], list[dict[str, Any]]]:
    metadata: dict[str, str] = {}
    data_lines = []
    for line in Path(path).read_text(encoding="utf-8").splitlines():
        if line.startswith("#"):
            key, _, value = line[1:].partition(":")
            metadata[key.strip()] = value.strip()
        elif line:
            data_lines.append(line)
    reader = csv.DictReader(data_lines)
    rows = [{k: _parse_cell(v) for k, v in row.items()} for row in reader]
    return metadata, rows


# -- argument helpers ----------------------------------------------------------

def _parse_int(token: str) -> int:
    token = token.strip()
    m = re.fullmatch(r"(\d+)\^(\d+)", token)
    if m:
        return int(m.group(1)) ** int(m.group(2))
    return int(token)


def parse_int_list(text: str) -> list[int]:
    """``2..12``, ``1,2,4``, ``2^8..2^19`` (powers of the base) or mixes thereof."""
    out: list[int] = []
    try:
        for part in text.split(","):
            part = part.strip()
            if ".." in part:
                lo_s, hi_s = part.split("..", 1)
                lo_m = re.fullmatch(r"(\d+)\^(\d+)", lo_s.strip())
                hi_m = re.fullmatch(r"(\d+)\^(\d+)", hi_s.strip())
                if lo_m and hi_m and lo_m.group(1) == hi_m.group(1):
                    base = int(lo_m.group(1))
                    out += [base ** e for e in range(int(lo_m.group(2)), int(hi_m.group(2)) + 1)]
                else:
                    out += list(range(_parse_int(lo_s), _parse_int(hi_s) + 1))
            else:
                out.append(_parse_int(part))
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer list or range: {text!r}") from None
    if not out:
        raise argparse.ArgumentTypeError(f"empty list: {text!r}")
    return out


def _shape(text: str) -> ArrayShape:
    try:
        return ArrayShape.parse(text)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def select_workloads(args) -> WorkloadSet:
    sources = [s for s in (args.workload, args.csv, args.inline) if s is not None]
    if len(sources) != 1:
        raise CliError("give exactly one of --workload, --csv, --inline")
    if args.workload is not None:
        table = builtin_table1()
        try:
            return WorkloadSet((table[args.workload],), source="builtin")
        except KeyError:
            raise CliError(f"unknown builtin workload {args.workload!r}; choose from {', '.join(table.names())}")
    if args.csv is not None:
        return load_csv(args.csv)
    try:
        m, k, n = (int(x) for x in args.inline.split(","))
    except ValueError:
        raise CliError(f"--inline expects M,K,N, got {args.inline!r}") from None
    return WorkloadSet((Workload("inline", m, k, n),), source="inline")


def _single(ws: WorkloadSet, command: str) -> Workload:
    if len(ws) != 1:
        raise CliError(f"{command} takes a single workload; {ws.source} has {len(ws)}")
    return ws.entries[0]


def _workload_fields(w: Workload) -> dict:
    return {"workload": w.name, "M": w.m, "K": w.k, "N": w.n}


def _design_fields(p: DesignPoint, base: DesignPoint) -> dict:
    return {
        "rows": p.shape.rows, "cols": p.shape.cols, "macs_used": p.shape.mac_count(),
        "folds": p.estimate.folds, "total_cycles": p.cycles,
        "baseline_rows": base.shape.rows, "baseline_cols": base.shape.cols,
        "baseline_cycles": base.cycles, "speedup_vs_2d": p.speedup_vs_2d,
    }


# -- commands --------------------------------------------------------------------

def cmd_latency(args):
    rows = []
    for w in select_workloads(args):
        shape = args.shape
        if args.scaleout:
            est = latency_scaleout(ArrayShape(shape.rows, shape.cols, 1), shape.tiers, w, SplitDim(args.scaleout))
            model = f"scaleout-{args.scaleout}"
        else:
            est = latency_3d(shape, w)
            model = "dos"
        rows.append({**_workload_fields(w), "rows": shape.rows, "cols": shape.cols, "tiers": shape.tiers,
                     "model": model, "folds": est.folds, "fill_cycles": est.fill_cycles,
                     "compute_cycles": est.compute_cycles, "reduce_cycles": est.reduce_cycles,
                     "drain_cycles": est.drain_cycles, "fold_cycles": est.fold_cycles,
                     "total_cycles": est.total_cycles})
    if len(rows) == 1:
        summary = str(rows[0]["total_cycles"])
    else:
        summary = f"{len(rows)} workloads, total_cycles " + " ".join(f"{r['workload']}={r['total_cycles']}" for r in rows)
    return rows, {"command": "latency", "shape": str(args.shape)}, summary


def cmd_simulate(args):
    w = _single(select_workloads(args), "simulate")
    rng = np.random.default_rng(args.seed)
    lo, hi = -(1 << (args.operand_bits - 1)), 1 << (args.operand_bits - 1)
    a = rng.integers(lo, hi, size=(w.m, w.k))
    b = rng.integers(lo, hi, size=(w.k, w.n))
    cfg = SimConfig(args.shape, Dataflow(args.dataflow), args.skew, args.operand_bits, args.acc_bits)
    if args.trace:
        with open(args.trace, "w", encoding="utf-8") as fh:
            res = simulate(cfg, a, b, trace=fh)
    else:
        res = simulate(cfg, a, b)
    model = latency_3d(args.shape, w).total_cycles
    ok = bool(np.array_equal(res.output, reference_matmul(a, b)))
    row = {**_workload_fields(w), "rows": args.shape.rows, "cols": args.shape.cols, "tiers": args.shape.tiers,
           "dataflow": cfg.dataflow.value, "skew": args.skew, "seed": args.seed, "folds": res.folds_executed,
           "sim_cycles": res.cycles, "model_cycles": model, "utilization": utilization(res, args.shape),
           "output_matches_reference": ok}
    summary = f"{w.name} on {args.shape} ({cfg.dataflow.value}): {res.cycles} cycles simulated, " \
              f"{model} modelled, output {'matches' if ok else 'DIFFERS FROM'} reference"
    return [row], {"command": "simulate"}, summary


def cmd_optimize(args):
    rows = []
    budget = Budget(args.macs, args.max_tiers)
    for w in select_workloads(args):
        p = optimize_shape(budget, args.tiers, w)
        base = optimize_shape(budget, 1, w)
        rows.append({**_workload_fields(w), "macs": args.macs, "tiers": args.tiers, **_design_fields(p, base)})
    summary = "; ".join(f"{r['workload']}: {r['rows']}x{r['cols']}x{r['tiers']} {r['total_cycles']} cycles "
                        f"(speedup {_fmt(r['speedup_vs_2d'])})" for r in rows)
    return rows, {"command": "optimize", "macs": args.macs, "tiers": args.tiers}, summary


def cmd_sweep_tiers(args):
    w = _single(select_workloads(args), "sweep-tiers")
    budget = Budget(args.macs, args.max_tiers)
    base = optimize_shape(budget, 1, w)
    rows = []
    for p in sweep_tiers(budget, w, args.tiers):
        row = {"workload": w.name, "macs": args.macs, "tiers": p.tiers}
        if isinstance(p, SkippedPoint):
            row.update(status="infeasible", baseline_rows=base.shape.rows, baseline_cols=base.shape.cols,
                       baseline_cycles=base.cycles)
        else:
            row.update(status="ok", **_design_fields(p, base))
        rows.append(row)
    ok = [r for r in rows if r["status"] == "ok"]
    meta = {"command": "sweep-tiers", "workload": w.name, "M": w.m, "K": w.k, "N": w.n, "macs": args.macs,
            "baseline_shape": str(base.shape), "baseline_cycles": base.cycles}
    if ok:
        best = max(ok, key=lambda r: (r["speedup_vs_2d"], -r["tiers"]))
        summary = f"{w.name} at {args.macs} MACs: max speedup {_fmt(best['speedup_vs_2d'])} at {best['tiers']} tiers"
    else:
        summary = f"{w.name} at {args.macs} MACs: no feasible tier count"
    return rows, meta, summary


def cmd_sweep_macs(args):
    w = _single(select_workloads(args), "sweep-macs")
    sweep = sweep_budget(args.tiers, w, args.macs, args.max_tiers)
    rows = []
    for p in sweep.points:
        row = {"workload": w.name, "tiers": args.tiers}
        if isinstance(p, SkippedPoint):
            row.update(macs=p.budget, status="infeasible")
        else:
            base = optimize_shape(Budget(p.budget, args.max_tiers), 1, w)
            row.update(macs=p.budget, status="ok", **_design_fields(p, base))
        row["above_threshold"] = row["macs"] > sweep.analytic_threshold
        rows.append(row)
    meta = {"command": "sweep-macs", "workload": w.name, "M": w.m, "K": w.k, "N": w.n, "tiers": args.tiers,
            "analytic_threshold": sweep.analytic_threshold,
            "first_speedup_budget": sweep.first_speedup_budget if sweep.first_speedup_budget else "none"}
    speedups = [r["speedup_vs_2d"] for r in rows if r["status"] == "ok"]
    summary = (f"{w.name}, {args.tiers} tiers: threshold M*N = {sweep.analytic_threshold}, first speedup at "
               f"{sweep.first_speedup_budget or 'none'}, max speedup {_fmt(max(speedups)) if speedups else 'n/a'}")
    return rows, meta, summary


def cmd_tier_study(args):
    ranges = WorkloadRanges()
    study = optimal_tier_study(args.n, args.macs, args.seed, args.max_tiers, ranges)
    rows = []
    for macs in study.budgets:
        budget = Budget(macs, args.max_tiers)
        for w, t in zip(study.workloads, study.optima[macs]):
            p = optimize_shape(budget, t, w)
            rows.append({**_workload_fields(w), "macs": macs, "optimal_tiers": t, "rows": p.shape.rows,
                         "cols": p.shape.cols, "total_cycles": p.cycles, "speedup_vs_2d": p.speedup_vs_2d})
    meta = {"command": "tier-study", "n": args.n, "seed": args.seed, "max_tiers": args.max_tiers,
            "ranges": f"M{list(ranges.m)} K{list(ranges.k)} N{list(ranges.n)} log-uniform"}
    for macs, med in study.medians.items():
        meta[f"median_optimal_tiers_{macs}"] = med
    summary = "median optimal tiers: " + ", ".join(f"{m} MACs -> {_fmt(v)}" for m, v in study.medians.items())
    return rows, meta, summary


def cmd_perf_area(args):
    w = _single(select_workloads(args), "perf-area")
    tech = costmodel.load_tech_params(args.tech) if args.tech else costmodel.TechParams()
    budget = Budget(args.macs, args.max_tiers)
    links = ["tsv", "miv"] if args.link == "both" else [args.link]
    base = optimize_shape(budget, 1, w)
    base_area = costmodel.tier_areas(args.macs, 1, "none", tech)[0]
    rows = [{"workload": w.name, "macs": args.macs, "tiers": 1, "link": "none", "rows": base.shape.rows,
             "cols": base.shape.cols, "total_cycles": base.cycles, "speedup_vs_2d": 1.0,
             "footprint_um2": base_area, "total_silicon_um2": base_area, "baseline_area_um2": base_area,
             "perf_per_area_vs_2d": 1.0}]
    for link in links:
        for t in args.tiers:
            if t == 1:
                continue
            p = optimize_shape(budget, t, w)
            rep = costmodel.perf_per_area(w, budget, t, link, tech)
            rows.append({"workload": w.name, "macs": args.macs, "tiers": t, "link": link, "rows": p.shape.rows,
                         "cols": p.shape.cols, "total_cycles": p.cycles, "speedup_vs_2d": p.speedup_vs_2d,
                         "footprint_um2": rep.footprint, "total_silicon_um2": rep.total_silicon,
                         "baseline_area_um2": base_area, "perf_per_area_vs_2d": rep.perf_per_area_vs_2d})
    meta = {"command": "perf-area", "workload": w.name, "macs": args.macs,
            "tech": " ".join(f"{k}={_fmt(v, ratio=False)}" for k, v in vars(tech).items()),
            "tech_source": "file" if args.tech else "placeholder defaults"}
    best = max(rows, key=lambda r: r["perf_per_area_vs_2d"])
    summary = f"{w.name} at {args.macs} MACs: best perf/area {_fmt(best['perf_per_area_vs_2d'])} " \
              f"({best['link']}, {best['tiers']} tiers)"
    return rows, meta, summary


def verify_cases(n_cases: int, max_macs: int, max_dim: int, seed: int) -> list[dict]:
    """Random simulator-vs-model and simulator-vs-reference checks."""
    rng = np.random.default_rng(seed)
    rows = []
    for case in range(n_cases):
        m, k, n = (int(x) for x in rng.integers(1, max_dim + 1, size=3))
        dataflow = Dataflow.OS if rng.random() < 0.5 else Dataflow.DOS
        tiers = 1 if dataflow is Dataflow.OS else int(rng.integers(1, min(16, k) + 1))
        tiers = min(tiers, max_macs)
        per_tier = max_macs // tiers
        rows_ = int(rng.integers(1, min(max_dim, per_tier) + 1))
        cols = int(rng.integers(1, min(max_dim, per_tier // rows_) + 1))
        shape = ArrayShape(rows_, cols, tiers)
        a = rng.integers(-128, 128, size=(m, k))
        b = rng.integers(-128, 128, size=(k, n))
        res = simulate(SimConfig(shape, dataflow), a, b)
        model = latency_3d(shape, Workload("case", m, k, n))
        rows.append({"case": case, "dataflow": dataflow.value, "rows": rows_, "cols": cols, "tiers": tiers,
                     "M": m, "K": k, "N": n, "folds": res.folds_executed, "sim_cycles": res.cycles,
                     "model_cycles": model.total_cycles, "cycles_match": res.cycles == model.total_cycles,
                     "output_match": bool(np.array_equal(res.output, reference_matmul(a, b)))})
    return rows


def cmd_verify(args):
    rows = verify_cases(args.cases, args.max_macs, args.max_dim, args.seed)
    bad_cycles = sum(not r["cycles_match"] for r in rows)
    bad_output = sum(not r["output_match"] for r in rows)
    meta = {"command": "verify", "cases": args.cases, "max_macs": args.max_macs, "max_dim": args.max_dim,
            "seed": args.seed}
    summary = f"verify: {len(rows)} cases, {len(rows) - bad_output} outputs match reference, " \
              f"{len(rows) - bad_cycles} cycle counts match model"
    status = 0 if bad_cycles == 0 and bad_output == 0 else 1
    return rows, meta, summary, status


COMMANDS = {
    "latency": (cmd_latency, "analytical latency of a given array shape"),
    "simulate": (cmd_simulate, "cycle-level simulation on random int8 operands"),
    "optimize": (cmd_optimize, "fastest array shape under a MAC budget"),
    "sweep-tiers": (cmd_sweep_tiers, "optimized speedup over a range of tier counts"),
    "sweep-macs": (cmd_sweep_macs, "optimized speedup over a range of MAC budgets"),
    "tier-study": (cmd_tier_study, "distribution of the optimal tier count over random workloads"),
    "perf-area": (cmd_perf_area, "area-normalized performance of TSV/MIV stacks"),
    "verify": (cmd_verify, "check the simulator against the model and a reference GEMM"),
}


def _epilog(command: str) -> str:
    lines = ["CSV columns:"]
    lines += [f"  {name:<26} {desc}" for name, desc in COLUMNS[command].items()]
    return "\n".join(lines)


def _add_workload_args(p: argparse.ArgumentParser) -> None:
    g = p.add_argument_group("workload (exactly one)")
    g.add_argument("--workload", help="builtin workload name (RN0, RN1, GNMT0, GNMT1, DB0, DB1, TF0, TF1)")
    g.add_argument("--csv", help="workload CSV file (name,M,K,N)")
    g.add_argument("--inline", help="inline M,K,N")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="systolic3d", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)
    ps = {}
    for name, (_, help_text) in COMMANDS.items():
        p = sub.add_parser(name, help=help_text, description=help_text, epilog=_epilog(name),
                           formatter_class=argparse.RawDescriptionHelpFormatter)
        p.add_argument("--out", help="output CSV path; '-' streams the CSV to stdout and the summary to stderr")
        ps[name] = p
    for name in ("latency", "simulate", "optimize", "sweep-tiers", "sweep-macs", "perf-area"):
        _add_workload_args(ps[name])
    for name in ("optimize", "sweep-tiers", "sweep-macs", "tier-study", "perf-area"):
        ps[name].add_argument("--max-tiers", type=int, default=16, help="manufacturing tier cap (default 16)")

    p = ps["latency"]
    p.add_argument("--shape", type=_shape, required=True, help="RxC or RxCxT")
    p.add_argument("--scaleout", choices=["M", "N"], help="evaluate independent tiers splitting M or N instead")

    p = ps["simulate"]
    p.add_argument("--shape", type=_shape, required=True, help="RxC or RxCxT")
    p.add_argument("--dataflow", choices=["OS", "dOS"], default="dOS")
    p.add_argument("--skew", type=int, default=1)
    p.add_argument("--operand-bits", type=int, default=8)
    p.add_argument("--acc-bits", type=int, default=32)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--trace", help="write a per-cycle event trace to this file")

    p = ps["optimize"]
    p.add_argument("--macs", type=_parse_int, required=True, help="MAC budget, e.g. 262144 or 2^18")
    p.add_argument("--tiers", type=int, default=1)

    p = ps["sweep-tiers"]
    p.add_argument("--macs", type=_parse_int, required=True, help="MAC budget, e.g. 262144 or 2^18")
    p.add_argument("--tiers", type=parse_int_list, default=parse_int_list("1..16"), help="e.g. 2..12 or 1,2,4")

    p = ps["sweep-macs"]
    p.add_argument("--tiers", type=int, required=True)
    p.add_argument("--macs", type=parse_int_list, required=True, help="ascending budgets, e.g. 2^8..2^19")

    p = ps["tier-study"]
    p.add_argument("--n", type=int, default=300, help="number of random workloads")
    p.add_argument("--macs", type=parse_int_list, default=parse_int_list("4096,32768,262144"))
    p.add_argument("--seed", type=int, default=0)

    p = ps["perf-area"]
    p.add_argument("--macs", type=_parse_int, required=True)
    p.add_argument("--tiers", type=parse_int_list, default=parse_int_list("2..16"))
    p.add_argument("--link", choices=["tsv", "miv", "both"], default="both")
    p.add_argument("--tech", help="tech parameter file (key = value); default: placeholder constants")

    p = ps["verify"]
    p.add_argument("--max-macs", type=int, default=4096)
    p.add_argument("--max-dim", type=int, default=64)
    p.add_argument("--cases", type=int, default=100)
    p.add_argument("--seed", type=int, default=0)
    return parser


def run(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    func = COMMANDS[args.command][0]
    try:
        result = func(args)
        rows, meta, summary = result[:3]
        status = result[3] if len(result) > 3 else 0
        columns = list(COLUMNS[args.command])
        if args.out == "-":
            sys.stdout.write(format_plot_data(rows, columns, meta))
            print(summary, file=sys.stderr)
        else:
            if args.out:
                emit_plot_data(rows, args.out, columns, meta)
            print(summary)
    except (CliError, InfeasibleDesign, WorkloadFormatError, ValueError, OSError, ArithmeticError) as exc:
        print(f"systolic3d {args.command}: error: {exc}", file=sys.stderr)
        return 2
    return status


def main() -> None:
    sys.exit(run())
