"""How each update's cost grows with the hidden-layer width.

Times every update procedure on the iris preset at a few hidden sizes and
prints the per-procedure growth, the same measurement the `bench`
subcommand writes as CSV.  Takes roughly ten seconds:

    python3 demos/timing_scaling.py
"""

from admmnet.data import load_csv
from admmnet.harness import RunConfig, packaged_dataset_path, run_bench
from admmnet.lsmr import LsmrParams

dataset = load_csv(packaged_dataset_path("iris.csv"), name="iris")
sizes = [10, 30, 50, 70]
config = RunConfig(
    methods=("admm-lsmr",),
    layers=3,
    hidden_size=sizes[0],
    admm_iters=50,
    epochs=200,
    gamma=10.0,
    beta=1.0,
    seed=0,
    runs=1,
    lsmr=LsmrParams(),
)

records = run_bench(config, dataset, sizes, repeats=3)

# One row per (procedure, layer); timings in microseconds across the grid.
by_key: dict[tuple[str, int], dict[int, float]] = {}
for rec in records:
    by_key.setdefault((rec.procedure, rec.layer), {})[rec.hidden_size] = (
        rec.mean_seconds * 1e6
    )

header = "procedure             layer  " + "".join(f"HS={h:<8}" for h in sizes)
print(header)
for (procedure, layer), times in sorted(by_key.items()):
    cells = "".join(f"{times[h]:<11.0f}" for h in sizes)
    print(f"{procedure:<21} {layer:<6} {cells}")

print()
print("microseconds per call, mean of 3 repeats after warmup; the")
print("hidden-to-hidden weight solve (layer 2) grows fastest because both")
print("of its matrix dimensions follow the hidden size")
