"""Design-space exploration for 3D-stacked systolic-array GEMM accelerators."""

from .model import (ArrayShape, LatencyEstimate, SplitDim, Workload, latency_2d, latency_3d, latency_scaleout,
                    reduction_optimal_tiers, speedup)
from .optimizer import Budget, DesignPoint, InfeasibleDesign, SkippedPoint, optimal_tier_study, optimize_shape, \
    sweep_budget, sweep_tiers
from .simulator import Dataflow, SimConfig, SimResult, simulate, trace_skew_schedule, utilization
from .workloads import WorkloadSet, builtin_table1, generate_random, load_csv

__all__ = [
    "ArrayShape", "LatencyEstimate", "SplitDim", "Workload", "latency_2d", "latency_3d", "latency_scaleout",
    "reduction_optimal_tiers", "speedup", "Budget", "DesignPoint", "InfeasibleDesign", "SkippedPoint",
    "optimal_tier_study", "optimize_shape", "sweep_budget", "sweep_tiers", "Dataflow", "SimConfig", "SimResult",
    "simulate", "trace_skew_schedule", "utilization", "WorkloadSet", "builtin_table1", "generate_random", "load_csv",
]
__version__ = "0.1.0"
