"""Command-line interface: flags, config files, CSV output, exit codes."""

import subprocess
import sys

from admmnet import cli
from admmnet.data import synthetic_blobs

TRAIN_HEADER = "iteration,objective,train_accuracy,constraint_residual"
COMPARE_HEADER = "run,seed,method,test_accuracy"
BENCH_HEADER = "procedure,layer,hidden_size,mean_seconds,repeats"


def run(capsys, argv):
    code = cli.main(argv)
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def write_blobs_csv(tmp_path):
    ds = synthetic_blobs(n_per_class=40, d=2, classes=2, separation=8.0, seed=0)
    path = tmp_path / "blobs.csv"
    lines = []
    for j in range(ds.n_samples):
        cells = [f"{v:.9g}" for v in ds.features[:, j]]
        cells.append(ds.class_names[ds.labels[j]])
        lines.append(",".join(cells))
    path.write_text("\n".join(lines) + "\n")
    return str(path)


class TestHelp:
    def test_top_level(self, capsys):
        code, out, _ = run(capsys, ["--help"])
        assert code == 0
        assert "train" in out and "compare" in out and "bench" in out

    def test_subcommand(self, capsys):
        code, out, _ = run(capsys, ["train", "--help"])
        assert code == 0
        assert "--method" in out

    def test_no_command(self, capsys):
        code, _, err = run(capsys, [])
        assert code == 1
        assert "error" in err

    def test_unknown_command(self, capsys):
        code, _, err = run(capsys, ["frobnicate"])
        assert code == 1

    def test_module_entry_point(self):
        r = subprocess.run(
            [sys.executable, "-m", "admmnet.cli", "--help"],
            capture_output=True,
            text=True,
        )
        assert r.returncode == 0


class TestTrain:
    def test_iris_quick(self, capsys):
        code, out, err = run(
            capsys,
            ["train", "--preset", "iris", "--method", "admm-direct",
             "--iters", "3", "--seed", "0"],
        )
        assert code == 0
        lines = out.strip().splitlines()
        assert lines[0] == TRAIN_HEADER
        assert len(lines) == 4
        first = lines[1].split(",")
        assert first[0] == "1"
        float(first[1]), float(first[2]), float(first[3])
        assert "test_accuracy=" in err

    def test_sgd_blobs_reaches_perfect_accuracy(self, capsys, tmp_path):
        path = write_blobs_csv(tmp_path)
        code, _, err = run(
            capsys,
            ["train", "--data", path, "--method", "sgd", "--layers", "2",
             "--epochs", "150", "--hidden-size", "8", "--seed", "0"],
        )
        assert code == 0
        assert "test_accuracy=1" in err.strip().splitlines()[-1]

    def test_baseline_rows_leave_residual_empty(self, capsys, tmp_path):
        path = write_blobs_csv(tmp_path)
        code, out, _ = run(
            capsys,
            ["train", "--data", path, "--method", "adam", "--layers", "2",
             "--epochs", "3", "--seed", "1"],
        )
        assert code == 0
        lines = out.strip().splitlines()
        assert len(lines) == 4
        for row in lines[1:]:
            assert row.endswith(",")

    def test_out_file_matches_stdout_csv(self, capsys, tmp_path):
        argv = ["train", "--preset", "iris", "--method", "admm-direct",
                "--iters", "2", "--seed", "3"]
        code, out, _ = run(capsys, argv)
        assert code == 0
        target = tmp_path / "run.csv"
        code, out2, _ = run(capsys, argv + ["--out", str(target)])
        assert code == 0
        assert target.read_text() == out
        # with --out taken, the report moves to stdout
        assert "test_accuracy=" in out2

    def test_same_seed_is_byte_identical(self, capsys, tmp_path):
        a, b = tmp_path / "a.csv", tmp_path / "b.csv"
        base = ["train", "--preset", "iris", "--method", "admm-lsmr",
                "--iters", "3", "--seed", "11"]
        assert run(capsys, base + ["--out", str(a)])[0] == 0
        assert run(capsys, base + ["--out", str(b)])[0] == 0
        assert a.read_bytes() == b.read_bytes()

    def test_two_methods_rejected(self, capsys):
        code, _, err = run(
            capsys,
            ["train", "--preset", "iris", "--method", "sgd,adam"],
        )
        assert code == 1
        assert "one" in err

    def test_unknown_preset(self, capsys):
        code, _, err = run(capsys, ["train", "--preset", "nope"])
        assert code == 1

    def test_missing_data_file(self, capsys):
        code, _, err = run(
            capsys, ["train", "--data", "/no/such/file.csv", "--method", "sgd"]
        )
        assert code == 1

    def test_zero_hidden_size(self, capsys):
        code, _, err = run(
            capsys,
            ["train", "--preset", "iris", "--method", "sgd",
             "--hidden-size", "0"],
        )
        assert code == 1

    def test_runtime_failure_exits_two(self, capsys, tmp_path):
        path = tmp_path / "tiny.csv"
        path.write_text("1,2,a\n3,4,b\n")
        code, _, err = run(
            capsys,
            ["train", "--data", str(path), "--method", "sgd", "--epochs", "1"],
        )
        assert code == 2
        assert "error" in err


class TestConfigFile:
    def test_values_apply(self, capsys, tmp_path):
        blobs = write_blobs_csv(tmp_path)
        cfg = tmp_path / "run.cfg"
        cfg.write_text(
            "# comment line\n"
            f"data={blobs}\n"
            "method=adam\n"
            "layers=2\n"
            "epochs=7\n"
            "seed=2\n"
        )
        code, out, _ = run(capsys, ["train", "--config", str(cfg)])
        assert code == 0
        assert len(out.strip().splitlines()) == 8

    def test_flag_overrides_config(self, capsys, tmp_path):
        blobs = write_blobs_csv(tmp_path)
        cfg = tmp_path / "run.cfg"
        cfg.write_text(f"data={blobs}\nmethod=adam\nlayers=2\nepochs=7\n")
        code, out, _ = run(
            capsys, ["train", "--config", str(cfg), "--epochs", "3"]
        )
        assert code == 0
        assert len(out.strip().splitlines()) == 4

    def test_unknown_key_cites_line(self, capsys, tmp_path):
        cfg = tmp_path / "run.cfg"
        cfg.write_text("epochs=3\nbogus=1\n")
        code, _, err = run(
            capsys, ["train", "--preset", "iris", "--config", str(cfg)]
        )
        assert code == 1
        assert "run.cfg:2" in err

    def test_bad_value_cites_line(self, capsys, tmp_path):
        cfg = tmp_path / "run.cfg"
        cfg.write_text("epochs=many\n")
        code, _, err = run(
            capsys, ["train", "--preset", "iris", "--config", str(cfg)]
        )
        assert code == 1
        assert "run.cfg:1" in err


class TestCompare:
    def test_quick_two_methods(self, capsys):
        code, out, err = run(
            capsys,
            ["compare", "--preset", "iris", "--method", "admm-direct,sgd",
             "--runs", "2", "--iters", "3", "--epochs", "3", "--seed", "5"],
        )
        assert code == 0
        lines = out.strip().splitlines()
        assert lines[0] == COMPARE_HEADER
        assert len(lines) == 5
        rows = [l.split(",") for l in lines[1:]]
        assert [r[2] for r in rows] == ["admm-direct", "admm-direct", "sgd", "sgd"]
        # seed column = base seed + run index
        assert [r[0] for r in rows[:2]] == ["0", "1"]
        assert [r[1] for r in rows[:2]] == ["5", "6"]
        assert "welch admm-direct vs sgd:" in err

    def test_method_against_itself_gives_zero_t(self, capsys):
        code, _, err = run(
            capsys,
            ["compare", "--preset", "iris", "--method",
             "admm-direct,admm-direct", "--runs", "2", "--iters", "3"],
        )
        assert code == 0
        welch = [l for l in err.splitlines() if l.startswith("welch")][0]
        assert "t=0 " in welch
        assert "p=1" in welch

    def test_single_run_rejected(self, capsys):
        code, _, err = run(
            capsys,
            ["compare", "--preset", "iris", "--method", "sgd,adam",
             "--runs", "1"],
        )
        assert code == 1

    def test_unknown_method(self, capsys):
        code, _, err = run(
            capsys,
            ["compare", "--preset", "iris", "--method", "sgd,magic",
             "--runs", "2"],
        )
        assert code == 1


class TestBench:
    def test_row_structure(self, capsys):
        code, out, err = run(
            capsys,
            ["bench", "--preset", "iris", "--hidden-size", "5,7",
             "--runs", "1", "--seed", "0"],
        )
        assert code == 0
        lines = out.strip().splitlines()
        assert lines[0] == BENCH_HEADER
        # default 3-layer network: 3 weight + 2 activation + 2 output
        # + 1 last-output + 1 multiplier update per hidden size
        assert len(lines) == 1 + 2 * 9
        rows = [l.split(",") for l in lines[1:]]
        sizes = {r[2] for r in rows}
        assert sizes == {"5", "7"}
        procedures = {r[0] for r in rows}
        assert procedures == {
            "weight_update",
            "activation_update",
            "output_update",
            "last_output_update",
            "lagrangian_update",
        }
        for r in rows:
            assert float(r[3]) >= 0.0
            assert r[4] == "1"

    def test_range_grid(self, capsys):
        code, out, _ = run(
            capsys,
            ["bench", "--preset", "iris", "--hidden-size", "5:9:2",
             "--runs", "1"],
        )
        assert code == 0
        rows = out.strip().splitlines()[1:]
        assert {r.split(",")[2] for r in rows} == {"5", "7", "9"}

    def test_baseline_method_rejected(self, capsys):
        code, _, err = run(
            capsys,
            ["bench", "--preset", "iris", "--method", "sgd",
             "--hidden-size", "5", "--runs", "1"],
        )
        assert code == 1
        assert "alternating" in err

    def test_bad_grid_token(self, capsys):
        code, _, err = run(
            capsys,
            ["bench", "--preset", "iris", "--hidden-size", "5:x", "--runs", "1"],
        )
        assert code == 1

    def test_empty_grid(self, capsys):
        code, _, err = run(
            capsys,
            ["bench", "--preset", "iris", "--hidden-size", ",", "--runs", "1"],
        )
        assert code == 1
