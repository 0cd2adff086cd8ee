"""The four-step recipe: grid, rank, grow, choose.

Mean-decrease-accuracy ranking orders the 103 features by how much held-out
accuracy suffers when each one is shuffled. The sweep then grows the vector
one ranked feature at a time, re-evaluating accuracy and the MCU budget at
every prefix, and picks the smallest prefix within 5% of the best accuracy
that still fits the part.
"""

from nilmedge.cost import CORTEX_M4_PAPER
from nilmedge.pipeline import window_dataset
from nilmedge.scenarios import builtin_scenario
from nilmedge.synth import synth_scenario
from nilmedge.train import mda_rank, split_dataset, sweep_feature_count

script, registry = builtin_scenario("single7")
stream, track = synth_scenario(script, registry, seed=3)
dataset = window_dataset(stream, track)
train, test = split_dataset(dataset, 0.8, seed=0)

params = {"n_trees": 100, "max_depth": 12}
mda = mda_rank("rf", params, train, test, repetitions=5, seed=0)
names = dataset.layout.names
print(f"baseline accuracy {mda.baseline_accuracy:.3f}")
print("top of the ranking:",
      ", ".join(names[k] for k in mda.ranking[:8]))

report = sweep_feature_count(
    train, test, "rf", mda, CORTEX_M4_PAPER,
    fixed_params=params,
    feature_counts=[1, 2, 3, 4, 5, 6, 8, 10, 16, 32, 64, 103],
    seed=0,
)

print(f"\n{'m':>4} {'accuracy':>9} {'cycles':>9} {'flash KiB':>10} {'fits?':>6}")
for point in report.points:
    total = point.cost.total
    mark = " <-- chosen" if point.m == report.chosen_m else ""
    print(f"{point.m:>4} {point.accuracy:>9.3f} {total.cycles:>9.0f} "
          f"{total.flash_bytes / 1024:>10.1f} "
          f"{'yes' if point.cost.verdict.fits else 'NO':>6}{mark}")

print(f"\nchosen: {report.chosen_m} features at "
      f"{report.chosen.accuracy:.3f} accuracy "
      f"(sweep max {report.max_accuracy:.3f}, tolerance {report.drop_tolerance})")
