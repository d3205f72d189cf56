"""Command-line front end with three subcommands.

``train`` runs one seeded training job and writes its per-iteration
progress as CSV.  ``compare`` repeats every requested method across a
shared seed sequence and reports summary statistics with Welch tests.
``bench`` times each alternating-update procedure across a hidden-size
grid.  CSV goes to ``--out`` when given, else to stdout; the human
summary goes to stdout when the CSV went to a file, else to stderr.

Flags can also be supplied through ``--config FILE`` in ``key=value``
form (keys match the long flag names, ``#`` starts a comment); explicit
flags override file entries.  Exit codes: 0 success, 1 invalid
configuration or dataset, 2 failure during computation.
"""

from __future__ import annotations

import argparse
import sys

from .harness import (
    ADMM_METHODS,
    METHODS,
    PRESETS,
    RunConfig,
    bench_csv_lines,
    comparison_csv_lines,
    comparison_report_lines,
    format_real,
    resolve_dataset,
    run_bench,
    run_comparison,
    run_single,
    train_csv_lines,
)
from .lsmr import LsmrParams

__all__ = ["main", "CliError"]


class CliError(ValueError):
    """Bad invocation or configuration; exits with status 1."""


class _Parser(argparse.ArgumentParser):
    # argparse exits with status 2 on bad flags; route through the
    # validation path instead so exit codes keep their meaning.
    def error(self, message):
        raise CliError(message)


# flag name -> value parser, shared by command line and config files
_CONVERTERS = {
    "method": str,
    "data": str,
    "preset": str,
    "layers": int,
    "hidden-size": str,
    "iters": int,
    "epochs": int,
    "seed": int,
    "runs": int,
    "gamma": float,
    "beta": float,
    "lsmr-atol": float,
    "lsmr-btol": float,
    "lsmr-max-iters": int,
    "test-fraction": float,
    "out": str,
}

_COMMON_FLAGS = (
    "method",
    "data",
    "preset",
    "layers",
    "hidden-size",
    "seed",
    "gamma",
    "beta",
    "lsmr-atol",
    "lsmr-btol",
    "lsmr-max-iters",
    "out",
)

_COMMAND_FLAGS = {
    "train": _COMMON_FLAGS + ("iters", "epochs", "test-fraction"),
    "compare": _COMMON_FLAGS + ("iters", "epochs", "test-fraction", "runs"),
    "bench": _COMMON_FLAGS + ("runs",),
}

_HELP = {
    "method": "training method: " + ", ".join(METHODS),
    "data": "CSV dataset path",
    "preset": "named setup: " + ", ".join(sorted(PRESETS)),
    "layers": "number of weight layers",
    "hidden-size": "hidden width (bench also takes lists '5,10' or grids '5:100:5')",
    "iters": "alternating sweeps per run",
    "epochs": "baseline training epochs per run",
    "seed": "base seed; run i uses seed+i",
    "runs": "runs per method (compare) or timing repeats (bench)",
    "gamma": "activation-consistency penalty weight",
    "beta": "pre-activation-consistency penalty weight",
    "lsmr-atol": "iterative solver tolerance on the residual",
    "lsmr-btol": "iterative solver tolerance on the right-hand side",
    "lsmr-max-iters": "iterative solver iteration cap (default min(m, n))",
    "test-fraction": "held-out fraction of each run's split",
    "out": "write the CSV here instead of stdout",
}


def _build_parser() -> _Parser:
    parser = _Parser(prog="admmnet", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    descriptions = {
        "train": "run one seeded training job and emit per-iteration metrics",
        "compare": "repeat methods over a shared seed sequence and test the gap",
        "bench": "time each update procedure across a hidden-size grid",
    }
    for command, flags in _COMMAND_FLAGS.items():
        p = sub.add_parser(command, description=descriptions[command])
        for flag in flags:
            p.add_argument(
                "--" + flag, type=_CONVERTERS[flag], default=None, help=_HELP[flag]
            )
        p.add_argument("--config", default=None, help="key=value flag file")
    return parser


def _read_config_file(path: str, allowed) -> dict:
    """Parse key=value lines; unknown keys and bad syntax are errors."""
    values = {}
    try:
        with open(path) as fh:
            lines = fh.readlines()
    except OSError as exc:
        raise CliError(f"config file: {exc}") from exc
    for lineno, raw in enumerate(lines, start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise CliError(f"{path}:{lineno}: expected key=value, got {line!r}")
        key, _, value = line.partition("=")
        key, value = key.strip(), value.strip()
        if key not in allowed:
            raise CliError(f"{path}:{lineno}: unknown key {key!r}")
        try:
            values[key] = _CONVERTERS[key](value)
        except ValueError as exc:
            raise CliError(f"{path}:{lineno}: bad value for {key}: {value!r}") from exc
    return values


class _Settings:
    """Flag values merged over config file, preset, and global defaults."""

    def __init__(self, args):
        self._args = args
        allowed = set(_COMMAND_FLAGS[args.command])
        self._file = (
            _read_config_file(args.config, allowed) if args.config else {}
        )
        preset_name = self.get("preset", None)
        if preset_name is not None and preset_name not in PRESETS:
            raise CliError(
                f"unknown preset {preset_name!r}; choose from "
                + ", ".join(sorted(PRESETS))
            )
        self.preset = PRESETS[preset_name] if preset_name else None

    def get(self, name, default, preset_field=None):
        value = getattr(self._args, name.replace("-", "_"), None)
        if value is None:
            value = self._file.get(name)
        if value is None and preset_field is not None and self.preset is not None:
            value = getattr(self.preset, preset_field)
        return default if value is None else value


def _parse_hidden_grid(spec: str) -> list[int]:
    """Expand '28', '5,10,20', or 'start:stop[:step]' (stop inclusive)."""
    sizes = []
    for token in spec.split(","):
        token = token.strip()
        if not token:
            raise CliError(f"empty entry in hidden-size list {spec!r}")
        if ":" in token:
            parts = token.split(":")
            if len(parts) not in (2, 3):
                raise CliError(f"bad hidden-size range {token!r}")
            try:
                start, stop = int(parts[0]), int(parts[1])
                step = int(parts[2]) if len(parts) == 3 else 1
            except ValueError:
                raise CliError(f"bad hidden-size range {token!r}") from None
            if step < 1 or stop < start:
                raise CliError(f"bad hidden-size range {token!r}")
            sizes.extend(range(start, stop + 1, step))
        else:
            try:
                sizes.append(int(token))
            except ValueError:
                raise CliError(f"bad hidden size {token!r}") from None
    return sizes


def _single_hidden_size(spec: str) -> int:
    try:
        return int(spec)
    except ValueError:
        raise CliError(
            f"hidden-size must be a single integer here, got {spec!r}"
        ) from None


def _parse_methods(spec: str) -> tuple[str, ...]:
    return tuple(m.strip() for m in spec.split(",") if m.strip())


def _make_config(s: _Settings, methods, hidden_size, runs) -> RunConfig:
    lsmr = LsmrParams(
        atol=s.get("lsmr-atol", 1e-8),
        btol=s.get("lsmr-btol", 1e-8),
        max_iters=s.get("lsmr-max-iters", None),
    )
    return RunConfig(
        methods=methods,
        layers=s.get("layers", 3, "layers"),
        hidden_size=hidden_size,
        admm_iters=s.get("iters", 50, "admm_iters"),
        epochs=s.get("epochs", 200, "epochs"),
        gamma=s.get("gamma", 10.0, "gamma"),
        beta=s.get("beta", 1.0, "beta"),
        seed=s.get("seed", 0),
        runs=runs,
        test_fraction=s.get("test-fraction", 0.2),
        lsmr=lsmr,
    )


def _load_dataset(s: _Settings):
    return resolve_dataset(s.get("preset", None), s.get("data", None))


def _emit(csv_lines, report_lines, out_path):
    """CSV to the file or stdout; the report to whichever is left."""
    text = "\n".join(csv_lines) + "\n"
    if out_path:
        with open(out_path, "w") as fh:
            fh.write(text)
        for line in report_lines:
            print(line)
    else:
        sys.stdout.write(text)
        for line in report_lines:
            print(line, file=sys.stderr)


def _build_train(args):
    s = _Settings(args)
    method = s.get("method", "admm-lsmr")
    config = _make_config(
        s,
        methods=_parse_methods(method),
        hidden_size=_single_hidden_size(s.get("hidden-size", "8", "hidden_size")),
        runs=1,
    )
    if len(config.methods) != 1:
        raise CliError("train takes exactly one --method")
    dataset = _load_dataset(s)
    out = s.get("out", None)

    def execute():
        result = run_single(config, dataset, config.methods[0], config.seed)
        summary = (
            f"train: method={result.method} dataset={dataset.name} "
            f"seed={result.seed} iterations={len(result.records)} "
            f"test_accuracy={format_real(result.test_accuracy)}"
        )
        _emit(train_csv_lines(result.records), [summary], out)
        return 0

    return execute


def _build_compare(args):
    s = _Settings(args)
    config = _make_config(
        s,
        methods=_parse_methods(s.get("method", "admm-lsmr")),
        hidden_size=_single_hidden_size(s.get("hidden-size", "8", "hidden_size")),
        runs=s.get("runs", 10),
    )
    if config.runs < 2:
        raise CliError("compare needs --runs of at least 2")
    dataset = _load_dataset(s)
    out = s.get("out", None)

    def execute():
        result = run_comparison(config, dataset)
        _emit(comparison_csv_lines(result), comparison_report_lines(result), out)
        return 0

    return execute


def _build_bench(args):
    s = _Settings(args)
    grid = _parse_hidden_grid(s.get("hidden-size", "5:100:5"))
    if not grid or any(h < 1 for h in grid):
        raise CliError(f"hidden sizes must be positive, got {grid}")
    methods = _parse_methods(s.get("method", "admm-lsmr"))
    if len(methods) != 1 or methods[0] not in ADMM_METHODS:
        raise CliError(
            "bench takes one alternating-update method: " + ", ".join(ADMM_METHODS)
        )
    repeats = s.get("runs", 10)
    if repeats < 1:
        raise CliError(f"runs must be positive, got {repeats}")
    config = _make_config(s, methods=methods, hidden_size=grid[0], runs=repeats)
    dataset = _load_dataset(s)
    out = s.get("out", None)

    def execute():
        records = run_bench(config, dataset, grid, repeats)
        summary = (
            f"bench: {len(records)} timings over {len(grid)} hidden sizes, "
            f"repeats={repeats}"
        )
        _emit(bench_csv_lines(records), [summary], out)
        return 0

    return execute


_BUILDERS = {"train": _build_train, "compare": _build_compare, "bench": _build_bench}


def main(argv=None) -> int:
    """Entry point; returns the process exit code instead of raising."""
    try:
        args = _build_parser().parse_args(argv)
        execute = _BUILDERS[args.command](args)
    except CliError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except (ValueError, OSError) as exc:
        # configuration and dataset problems found before any training
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except SystemExit as exc:
        # argparse exits on --help after printing
        return 0 if exc.code in (None, 0) else int(exc.code)
    try:
        return execute()
    except KeyboardInterrupt:
        raise
    except Exception as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
