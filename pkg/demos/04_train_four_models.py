"""Four classifier families on the same seven-load scenario.

Trains kNN, SVM, MLP, and random forest on steady windows of the `single7`
scenario and compares held-out accuracy next to each model's modeled MCU
footprint. The forest shines here exactly as the trade-off analysis
predicts: accurate, tiny, and fast.
"""

import numpy as np

from nilmedge.cost import CORTEX_M4_PAPER, cost_report
from nilmedge.models.base import classify_matrix
from nilmedge.pipeline import window_dataset
from nilmedge.scenarios import builtin_scenario
from nilmedge.synth import synth_scenario
from nilmedge.train import split_dataset, train_model

script, registry = builtin_scenario("single7")
stream, track = synth_scenario(script, registry, seed=2)
dataset = window_dataset(stream, track)
train, test = split_dataset(dataset, 0.8, seed=0)
print(f"dataset: {dataset.n} windows x {dataset.n_features} features, "
      f"{len(dataset.class_names)} appliances\n")

JOBS = [
    ("knn", {"k": 3}),
    ("svm", {"c": 10.0, "gamma": 0.01}),
    ("mlp", {"hidden": (800, 100), "lr": 0.1, "epochs": 80, "batch": 16}),
    ("rf", {"n_trees": 100, "max_depth": 12}),
]

print(f"{'model':<5} {'accuracy':>9} {'cycles':>10} {'flash KiB':>10} {'fits?':>6}")
for kind, params in JOBS:
    model = train_model(kind, train, params, seed=7)
    acc = float(np.mean(classify_matrix(model, test.x) == test.y))
    report = cost_report(model, CORTEX_M4_PAPER)
    print(f"{kind:<5} {acc:>9.3f} {report.total.cycles:>10.0f} "
          f"{report.total.flash_bytes / 1024:>10.1f} "
          f"{'yes' if report.verdict.fits else 'NO':>6}")

print("\nfull-vector kNN and MLP pay for every noisy harmonic column;")
print("the tree ensemble simply never splits on them")
