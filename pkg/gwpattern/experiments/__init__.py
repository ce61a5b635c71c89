from .report import ExperimentReport, ExperimentRow, write_csv, write_report
from .runner import run_replicates
from .suite import (
    EXPERIMENTS,
    rerun,
    run_clt,
    run_concentration,
    run_degree_histogram,
    run_heavy_tail_growth,
    run_llt_and_tails,
    run_lln,
    run_path_pairs,
)

__all__ = [
    "EXPERIMENTS",
    "ExperimentReport",
    "ExperimentRow",
    "rerun",
    "run_clt",
    "run_concentration",
    "run_degree_histogram",
    "run_heavy_tail_growth",
    "run_llt_and_tails",
    "run_lln",
    "run_path_pairs",
    "run_replicates",
    "write_csv",
    "write_report",
]
