"""Cross-validation harness and statistics."""

from .experiment import (RUN_COLUMNS, TRIALS, TrialResult, archive_trial, feature_table,
                         read_runs, run_experiment, sample_seed, system_label,
                         write_runs)  # fmt: skip
from .folds import SCHEMES, Fold, FoldPlan, make_folds
from .report import REPORT_FILES, mean_error_matrix, write_report
from .stats import (compare_symbol, format_tally, friedman_average_ranks, friedman_statistic,
                    sbs_comparison, vbs_selection_rate, wilcoxon_rank_sum)  # fmt: skip

__all__ = [
    "RUN_COLUMNS", "TRIALS", "TrialResult", "archive_trial", "feature_table", "read_runs",
    "run_experiment", "sample_seed", "system_label", "write_runs", "SCHEMES", "Fold",
    "FoldPlan", "make_folds", "REPORT_FILES", "mean_error_matrix", "write_report",
    "compare_symbol", "format_tally", "friedman_average_ranks", "friedman_statistic",
    "sbs_comparison", "vbs_selection_rate", "wilcoxon_rank_sum",
]
