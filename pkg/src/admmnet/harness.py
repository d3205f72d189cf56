"""Experiment orchestration: dataset presets, repeated seeded comparisons,
and per-procedure timing sweeps.

This module owns the run protocol shared by the command-line entry points
and the test suite.  A comparison executes R independent runs per method,
where run i derives everything (data split, weight init) from the single
integer ``seed + i``; methods therefore see identical splits run for run
and their accuracy samples are paired.  The bench path times each
alternating-update procedure in isolation on a warmed-up state, one row
per (procedure, layer) pair and hidden size.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field
from importlib import resources


from .admm import (
    ActivationKind,
    DirectSolver,
    HyperParams,
    LsmrSolver,
    Solver,
    accuracy,
    activation_update,
    init_state,
    lagrangian_update,
    last_output_update,
    output_update,
    predict,
    train_admm,
    train_iteration,
    weight_update,
)
from .baselines import AdamConfig, SgdConfig, train_baseline
from .data import (
    Dataset,
    SplitSpec,
    apply_standardization,
    load_csv,
    standardize,
    synthetic_correlated_pairs,
    train_test_split,
)
from .linalg import SeededRng
from .lsmr import LsmrParams
from .stats import RunSummary, WelchResult, summarize, welch_t_test

__all__ = [
    "METHODS",
    "ADMM_METHODS",
    "PRESETS",
    "Preset",
    "RunConfig",
    "RunResult",
    "IterationRecord",
    "ComparisonResult",
    "TimingRecord",
    "resolve_dataset",
    "network_dims",
    "prepare_run",
    "run_single",
    "run_comparison",
    "run_bench",
    "format_real",
    "train_csv_lines",
    "comparison_csv_lines",
    "bench_csv_lines",
    "comparison_report_lines",
]

METHODS = ("admm-lsmr", "admm-direct", "sgd", "adam")
ADMM_METHODS = ("admm-lsmr", "admm-direct")

# The tabular benchmark preset trims large files to this many leading rows;
# the bundled stand-in generator produces the same count.
SUBSET_ROWS = 20000
SURROGATE_DATA_SEED = 5

# Sweeps run on the state before timing starts, so procedures see
# representative magnitudes rather than the init distribution.
BENCH_WARMUP_SWEEPS = 3


@dataclass(frozen=True)
class Preset:
    """Named experiment setup: architecture, budgets, and data source."""

    name: str
    layers: int
    hidden_size: int
    admm_iters: int
    epochs: int
    gamma: float
    beta: float
    label_column: int | str
    max_rows: int | None
    packaged_file: str | None


PRESETS = {
    "iris": Preset(
        name="iris",
        layers=3,
        hidden_size=8,
        admm_iters=50,
        epochs=200,
        gamma=10.0,
        beta=1.0,
        label_column=-1,
        max_rows=None,
        packaged_file="iris.csv",
    ),
    "higgs-subset": Preset(
        name="higgs-subset",
        layers=4,
        hidden_size=28,
        admm_iters=50,
        epochs=5,
        gamma=10.0,
        beta=1.0,
        # class label first, as in the published HIGGS file
        label_column=0,
        max_rows=SUBSET_ROWS,
        packaged_file=None,
    ),
}


@dataclass(frozen=True)
class RunConfig:
    """Everything a command needs besides the resolved dataset.

    ``methods`` keeps the order given on the command line; comparison
    output follows it.  ``seed`` is the base of the per-run seed sequence
    ``seed + run_index``.
    """

    methods: tuple[str, ...]
    layers: int
    hidden_size: int
    admm_iters: int
    epochs: int
    gamma: float
    beta: float
    seed: int
    runs: int
    test_fraction: float = 0.2
    batch_size: int = 32
    init_std: float = 0.1
    lsmr: LsmrParams = field(default_factory=LsmrParams)

    def __post_init__(self):
        if not self.methods:
            raise ValueError("at least one method is required")
        for m in self.methods:
            if m not in METHODS:
                raise ValueError(
                    f"unknown method {m!r}; choose from {', '.join(METHODS)}"
                )
        if self.layers < 2:
            raise ValueError(f"layers must be at least 2, got {self.layers}")
        if self.hidden_size < 1:
            raise ValueError(f"hidden size must be positive, got {self.hidden_size}")
        if self.admm_iters < 1:
            raise ValueError(f"iters must be positive, got {self.admm_iters}")
        if self.epochs < 0:
            raise ValueError(f"epochs must be nonnegative, got {self.epochs}")
        if self.gamma <= 0 or self.beta <= 0:
            raise ValueError(
                f"penalties must be positive, got gamma={self.gamma}, beta={self.beta}"
            )
        if self.seed < 0:
            raise ValueError(f"seed must be nonnegative, got {self.seed}")
        if self.runs < 1:
            raise ValueError(f"runs must be positive, got {self.runs}")
        if not (0.0 < self.test_fraction < 1.0):
            raise ValueError(
                f"test fraction must lie in (0, 1), got {self.test_fraction}"
            )
        if self.batch_size < 1:
            raise ValueError(f"batch size must be positive, got {self.batch_size}")
        if self.init_std <= 0:
            raise ValueError(f"init std must be positive, got {self.init_std}")


@dataclass(frozen=True)
class IterationRecord:
    """One training-progress row.  ``objective`` is the augmented
    objective for the alternating trainers and the mean squared loss for
    the gradient baselines; ``constraint_residual`` only applies to the
    former and is None otherwise."""

    iteration: int
    objective: float
    train_accuracy: float
    constraint_residual: float | None


@dataclass(frozen=True)
class RunResult:
    method: str
    seed: int
    test_accuracy: float
    records: tuple[IterationRecord, ...] = ()


@dataclass
class ComparisonResult:
    """Run lists aligned with ``methods`` (command-line order, repeats
    allowed), their summaries, and a Welch test for every method pair."""

    methods: tuple[str, ...]
    results: list[list[RunResult]]
    summaries: list[RunSummary]
    tests: list[tuple[str, str, WelchResult]]

    def runs_for(self, method: str) -> list[RunResult]:
        """Run list of the first occurrence of ``method``."""
        for m, runs in zip(self.methods, self.results):
            if m == method:
                return runs
        raise KeyError(method)


@dataclass(frozen=True)
class TimingRecord:
    procedure: str
    layer: int
    hidden_size: int
    mean_seconds: float
    repeats: int


def packaged_dataset_path(filename: str):
    """Filesystem path of a CSV shipped inside the package."""
    return resources.files("admmnet") / "datasets" / filename


def resolve_dataset(preset: str | None, data_path: str | None) -> Dataset:
    """Turn the --preset / --data pair into a loaded Dataset.

    A preset fixes the label column and row budget; an explicit path
    replaces the preset's file but keeps those conventions.  The tabular
    benchmark preset falls back to a built-in generator with matching
    shape (20000 samples, 28 features, 2 classes) when no file is given,
    since the source file is too large to ship.
    """
    if preset is not None:
        if preset not in PRESETS:
            raise ValueError(
                f"unknown preset {preset!r}; choose from {', '.join(sorted(PRESETS))}"
            )
        p = PRESETS[preset]
        if data_path is not None:
            return load_csv(
                data_path,
                label_column=p.label_column,
                max_rows=p.max_rows,
                name=p.name,
            )
        if p.packaged_file is not None:
            return load_csv(
                packaged_dataset_path(p.packaged_file),
                label_column=p.label_column,
                name=p.name,
            )
        return synthetic_correlated_pairs(SUBSET_ROWS, seed=SURROGATE_DATA_SEED)
    if data_path is not None:
        return load_csv(data_path)
    raise ValueError("no dataset: supply --preset or --data")


def network_dims(config: RunConfig, dataset: Dataset) -> list[int]:
    """Layer sizes: data dimension, layers-1 equal hidden layers, classes."""
    return (
        [dataset.n_features]
        + [config.hidden_size] * (config.layers - 1)
        + [dataset.n_classes]
    )


def prepare_run(
    dataset: Dataset, run_seed: int, test_fraction: float
) -> tuple[Dataset, Dataset, int]:
    """Split and standardize one run's data; return its model seed too.

    The run seed spawns two children: one shuffles the stratified split,
    the other (returned) seeds weight initialization.  Standardization
    statistics come from the training portion only.
    """
    split_rng, model_rng = SeededRng(run_seed).split(2)
    train_ds, test_ds = train_test_split(
        dataset, SplitSpec(test_fraction=test_fraction, seed=split_rng.seed)
    )
    train_ds, mean, std = standardize(train_ds)
    test_ds = apply_standardization(test_ds, mean, std)
    return train_ds, test_ds, model_rng.seed


def _solver_for(method: str, params: LsmrParams) -> Solver:
    if method == "admm-lsmr":
        return LsmrSolver(params=params)
    if method == "admm-direct":
        return DirectSolver()
    raise ValueError(f"method {method!r} has no linear solver")


def run_single(
    config: RunConfig, dataset: Dataset, method: str, run_seed: int
) -> RunResult:
    """Train one method once from one seed; report per-iteration progress
    and the held-out accuracy."""
    train_ds, test_ds, model_seed = prepare_run(
        dataset, run_seed, config.test_fraction
    )
    dims = network_dims(config, dataset)
    records: list[IterationRecord] = []

    if method in ADMM_METHODS:
        hp = HyperParams.uniform(
            config.layers,
            gamma=config.gamma,
            beta=config.beta,
            seed=model_seed,
            admm_iters=config.admm_iters,
            init_std=config.init_std,
            solver=_solver_for(method, config.lsmr),
        )
        _, report = train_admm(
            train_ds.features,
            train_ds.one_hot,
            train_ds.labels,
            dims,
            hp,
            test_data=test_ds.features,
            test_labels=test_ds.labels,
        )
        for i, obj in enumerate(report.lagrangian):
            records.append(
                IterationRecord(
                    iteration=i + 1,
                    objective=obj,
                    train_accuracy=report.train_accuracy[i],
                    constraint_residual=report.constraint_residual[i],
                )
            )
        test_acc = float(report.test_accuracy)
    elif method in ("sgd", "adam"):
        optimizer = SgdConfig() if method == "sgd" else AdamConfig()
        log: list[dict] = []
        weights, _ = train_baseline(
            train_ds.features,
            train_ds.one_hot,
            train_ds.labels,
            dims,
            optimizer,
            config.epochs,
            batch_size=config.batch_size,
            seed=model_seed,
            init_std=config.init_std,
            epoch_log=log,
        )
        for i, entry in enumerate(log):
            records.append(
                IterationRecord(
                    iteration=i + 1,
                    objective=entry["loss"],
                    train_accuracy=entry["accuracy"],
                    constraint_residual=None,
                )
            )
        scores = predict(weights, test_ds.features, ActivationKind.RELU)
        test_acc = accuracy(scores, test_ds.labels)
    else:
        raise ValueError(f"unknown method {method!r}")

    return RunResult(
        method=method, seed=run_seed, test_accuracy=test_acc, records=tuple(records)
    )


def run_comparison(config: RunConfig, dataset: Dataset) -> ComparisonResult:
    """R seeded runs per method with shared per-run seeds, summarized and
    pairwise Welch-tested.  Needs at least two runs."""
    if config.runs < 2:
        raise ValueError("comparison statistics need at least 2 runs")
    results = [
        [
            run_single(config, dataset, method, config.seed + i)
            for i in range(config.runs)
        ]
        for method in config.methods
    ]
    samples = [[r.test_accuracy for r in runs] for runs in results]
    summaries = [
        summarize(m, acc) for m, acc in zip(config.methods, samples)
    ]
    tests = []
    for i, a in enumerate(config.methods):
        for j in range(i + 1, len(config.methods)):
            tests.append(
                (a, config.methods[j], welch_t_test(samples[i], samples[j]))
            )
    return ComparisonResult(
        methods=config.methods, results=results, summaries=summaries, tests=tests
    )


def _bench_thunks(state, y, hp):
    """(procedure, layer, thunk) for every update of one full sweep.

    Thunks close over a fixed state, so each call repeats identical work;
    the shared linear terms are precomputed because the procedures under
    measurement take them as inputs.
    """
    L = state.n_layers
    w = state.weights
    x = state.activations
    z = state.preactivations
    thunks = []
    for l in range(1, L + 1):
        thunks.append(
            (
                "weight_update",
                l,
                lambda l=l: weight_update(z[l - 1], x[l - 1], hp.solver),
            )
        )
    for l in range(1, L):
        thunks.append(
            (
                "activation_update",
                l,
                lambda l=l: activation_update(
                    w[l], z[l], z[l - 1], hp.gamma[l - 1], hp.beta[l],
                    hp.activation, hp.solver,
                ),
            )
        )
    for l in range(1, L):
        w_term = w[l - 1] @ x[l - 1]
        thunks.append(
            (
                "output_update",
                l,
                lambda l=l, w_term=w_term: output_update(
                    x[l], w_term, hp.gamma[l - 1], hp.beta[l - 1], hp.activation
                ),
            )
        )
    w_last = w[L - 1] @ x[L - 1]
    thunks.append(
        (
            "last_output_update",
            L,
            lambda: last_output_update(y, w_last, state.lam, hp.beta[-1], hp.loss),
        )
    )
    thunks.append(
        (
            "lagrangian_update",
            L,
            lambda: lagrangian_update(state.lam, z[L - 1], w_last, hp.beta[-1]),
        )
    )
    return thunks


def run_bench(
    config: RunConfig, dataset: Dataset, hidden_sizes, repeats: int
) -> list[TimingRecord]:
    """Wall-time each update procedure per layer across hidden sizes.

    For every hidden size the network is built fresh, warmed up with a few
    full sweeps, and then each procedure is called ``repeats`` times on the
    frozen state (serially, monotonic clock).  Loading, initialization, and
    the warm-up are excluded from the timings.
    """
    sizes = [int(h) for h in hidden_sizes]
    if not sizes:
        raise ValueError("hidden-size list must not be empty")
    if any(h < 1 for h in sizes):
        raise ValueError(f"hidden sizes must be positive, got {sizes}")
    if repeats < 1:
        raise ValueError(f"repeats must be positive, got {repeats}")
    method = config.methods[0]
    if method not in ADMM_METHODS:
        raise ValueError(
            f"bench times the alternating updates; method must be one of "
            f"{', '.join(ADMM_METHODS)}, got {method!r}"
        )
    ds, _, _ = standardize(dataset)
    records: list[TimingRecord] = []
    for hs in sizes:
        dims = [ds.n_features] + [hs] * (config.layers - 1) + [ds.n_classes]
        hp = HyperParams.uniform(
            config.layers,
            gamma=config.gamma,
            beta=config.beta,
            seed=config.seed,
            admm_iters=config.admm_iters,
            init_std=config.init_std,
            solver=_solver_for(method, config.lsmr),
        )
        state = init_state(dims, ds.features, hp)
        for _ in range(BENCH_WARMUP_SWEEPS):
            state = train_iteration(state, ds.one_hot, hp)
        for procedure, layer, thunk in _bench_thunks(state, ds.one_hot, hp):
            total = 0.0
            for _ in range(repeats):
                t0 = time.perf_counter()
                thunk()
                total += time.perf_counter() - t0
            records.append(
                TimingRecord(
                    procedure=procedure,
                    layer=layer,
                    hidden_size=hs,
                    mean_seconds=total / repeats,
                    repeats=repeats,
                )
            )
    return records


def format_real(x: float) -> str:
    """Canonical 6-significant-digit rendering used in every CSV."""
    return f"{float(x):.6g}"


def train_csv_lines(records) -> list[str]:
    """Per-iteration progress rows; the residual cell is empty for
    trainers without a constraint."""
    lines = ["iteration,objective,train_accuracy,constraint_residual"]
    for r in records:
        residual = "" if r.constraint_residual is None else format_real(
            r.constraint_residual
        )
        lines.append(
            f"{r.iteration},{format_real(r.objective)},"
            f"{format_real(r.train_accuracy)},{residual}"
        )
    return lines


def comparison_csv_lines(result: ComparisonResult) -> list[str]:
    """One row per (method, run); ``seed - run`` is the configured base."""
    lines = ["run,seed,method,test_accuracy"]
    for method, runs in zip(result.methods, result.results):
        for i, r in enumerate(runs):
            lines.append(f"{i},{r.seed},{method},{format_real(r.test_accuracy)}")
    return lines


def bench_csv_lines(records) -> list[str]:
    lines = ["procedure,layer,hidden_size,mean_seconds,repeats"]
    for r in records:
        lines.append(
            f"{r.procedure},{r.layer},{r.hidden_size},"
            f"{format_real(r.mean_seconds)},{r.repeats}"
        )
    return lines


def comparison_report_lines(result: ComparisonResult) -> list[str]:
    """Human-readable mean/std table plus one line per Welch pair."""
    lines = []
    width = max(len(s.method) for s in result.summaries)
    lines.append(f"{'method'.ljust(width)}  runs  mean      std")
    for s in result.summaries:
        std = format_real(s.std) + (" (single run)" if s.degenerate else "")
        lines.append(
            f"{s.method.ljust(width)}  {len(s.accuracies):<4d}  "
            f"{format_real(s.mean):<8s}  {std}"
        )
    for a, b, w in result.tests:
        lines.append(
            f"welch {a} vs {b}: t={format_real(w.t)} df={format_real(w.df)} "
            f"p={format_real(w.p_two_sided)} "
            f"ci99=({format_real(w.ci99[0])}, {format_real(w.ci99[1])})"
        )
    return lines
