"""Gradient-free neural-network training by alternating minimization.

The package trains small feed-forward ReLU classifiers without
backpropagation: every weight matrix, activation, and pre-activation is a
separate optimization variable, updated in closed form or through a
hand-rolled batched iterative least-squares solver.  Gradient baselines
(SGD, Adam), dataset utilities, Welch-test statistics, and an experiment
harness with a CLI round out the library.
"""

from .admm import (
    ActivationKind,
    DirectSolver,
    HyperParams,
    LossKind,
    LsmrSolver,
    NetworkState,
    TrainReport,
    accuracy,
    activation_update,
    evaluate_lagrangian,
    init_state,
    lagrangian_update,
    last_output_update,
    output_update,
    predict,
    train_admm,
    train_iteration,
    weight_update,
)
from .baselines import AdamConfig, MlpState, SgdConfig, train_baseline
from .data import (
    Dataset,
    SplitSpec,
    load_csv,
    standardize,
    synthetic_blobs,
    synthetic_correlated_pairs,
    train_test_split,
)
from .harness import (
    PRESETS,
    RunConfig,
    resolve_dataset,
    run_bench,
    run_comparison,
    run_single,
)
from .linalg import SeededRng
from .lsmr import LsmrParams, LsmrReport, StopReason, lsmr_solve, lsmr_solve_multi
from .stats import RunSummary, WelchResult, summarize, welch_t_test

__version__ = "0.1.0"

__all__ = [
    "ActivationKind",
    "AdamConfig",
    "Dataset",
    "DirectSolver",
    "HyperParams",
    "LossKind",
    "LsmrParams",
    "LsmrReport",
    "LsmrSolver",
    "MlpState",
    "NetworkState",
    "PRESETS",
    "RunConfig",
    "RunSummary",
    "SeededRng",
    "SgdConfig",
    "SplitSpec",
    "StopReason",
    "TrainReport",
    "WelchResult",
    "accuracy",
    "activation_update",
    "evaluate_lagrangian",
    "init_state",
    "lagrangian_update",
    "last_output_update",
    "load_csv",
    "lsmr_solve",
    "lsmr_solve_multi",
    "output_update",
    "predict",
    "resolve_dataset",
    "run_bench",
    "run_comparison",
    "run_single",
    "standardize",
    "summarize",
    "synthetic_blobs",
    "synthetic_correlated_pairs",
    "train_admm",
    "train_baseline",
    "train_iteration",
    "train_test_split",
    "weight_update",
    "welch_t_test",
]
