"""Shared builders and brute-force oracles for the test suite.

Every oracle here recomputes its answer from first principles (scalar loops,
exhaustive enumeration) so the fast numpy paths are checked against code
that shares none of their structure.
"""

from __future__ import annotations

import math

import numpy as np

from nilmedge.features import DEFAULT_LAYOUT, FeatureLayout
from nilmedge.models.forest import RfModel, TreeNodes
from nilmedge.models.knn import KnnModel
from nilmedge.models.mlp import MlpModel
from nilmedge.models.svm import SvmModel, pair_order
from nilmedge.train.dataset import Dataset


def small_layout(n_features: int) -> FeatureLayout:
    """A layout with exactly n_features entries (for synthetic datasets)."""
    if n_features == 3:
        return FeatureLayout(harmonic_orders=())
    if n_features < 3:
        return FeatureLayout(time_domain=False,
                             harmonic_orders=tuple(range(1, 2 * n_features, 2)),
                             complex_pairs=False)
    return FeatureLayout(harmonic_orders=tuple(range(1, 2 * (n_features - 3), 2)),
                         complex_pairs=False)


def blob_dataset(n_classes=3, per_class=60, n_features=4, spread=1.0, seed=0) -> Dataset:
    rng = np.random.default_rng(seed)
    centers = rng.normal(0, 5, size=(n_classes, n_features))
    x = np.vstack([centers[c] + rng.normal(0, spread, size=(per_class, n_features))
                   for c in range(n_classes)])
    y = np.repeat(np.arange(n_classes), per_class)
    return Dataset(x=x, y=y, class_names=tuple(f"class_{c}" for c in range(n_classes)),
                   layout=small_layout(n_features))


# --- random model builders -----------------------------------------------------

def _common(n_classes, n_features):
    return dict(
        class_names=tuple(f"class_{c}" for c in range(n_classes)),
        layout=DEFAULT_LAYOUT,
        selected_indices=tuple(range(n_features)),
    )


def random_knn(rng, n=60, f=5, n_classes=3, k=5) -> KnnModel:
    return KnnModel(**_common(n_classes, f), scaler=None, k=k,
                    train_x=rng.normal(size=(n, f)),
                    train_y=rng.integers(0, n_classes, size=n))


def random_svm(rng, n_sv_per_class=6, f=5, n_classes=4, kernel="rbf", gamma=0.3) -> SvmModel:
    n_sv = n_sv_per_class * n_classes
    return SvmModel(**_common(n_classes, f), scaler=None,
                    kernel=kernel, gamma=gamma,
                    support=rng.normal(size=(n_sv, f)),
                    sv_counts=np.full(n_classes, n_sv_per_class),
                    dual_coef=rng.normal(size=(n_classes - 1, n_sv)),
                    intercepts=rng.normal(size=n_classes * (n_classes - 1) // 2))


def random_mlp(rng, sizes=(4, 3, 3, 2)) -> MlpModel:
    ws = tuple(rng.normal(size=(o, i)) for i, o in zip(sizes, sizes[1:]))
    bs = tuple(rng.normal(size=o) for o in sizes[1:])
    return MlpModel(**_common(sizes[-1], sizes[0]), scaler=None, weights=ws, biases=bs)


def random_tree(rng, f, n_classes, depth=3) -> TreeNodes:
    feature, threshold, left, right, leaf = [], [], [], [], []

    def build(level):
        node = len(feature)
        feature.append(-1)
        threshold.append(0.0)
        left.append(-1)
        right.append(-1)
        leaf.append(-1)
        if level >= depth or rng.random() < 0.25:
            leaf[node] = int(rng.integers(0, n_classes))
        else:
            feature[node] = int(rng.integers(0, f))
            threshold[node] = float(rng.normal())
            left[node] = build(level + 1)
            right[node] = build(level + 1)
        return node

    build(0)
    return TreeNodes(feature=np.array(feature, dtype=np.int32),
                     threshold=np.array(threshold),
                     left=np.array(left, dtype=np.int32),
                     right=np.array(right, dtype=np.int32),
                     leaf_class=np.array(leaf, dtype=np.int32))


def random_rf(rng, n_trees=20, f=5, n_classes=3, depth=4) -> RfModel:
    return RfModel(**_common(n_classes, f), scaler=None,
                   trees=tuple(random_tree(rng, f, n_classes, depth) for _ in range(n_trees)))


# --- brute-force prediction oracles ---------------------------------------------

def knn_oracle(model: KnnModel, x) -> int:
    """Full sort of (distance, row) pairs with explicit scalar distances."""
    dists = []
    for row_idx in range(model.train_x.shape[0]):
        d = 0.0
        for j in range(model.train_x.shape[1]):
            diff = model.train_x[row_idx, j] - x[j]
            d += diff * diff
        dists.append((d, row_idx))
    dists.sort()
    nearest = dists[: model.k]
    votes: dict[int, int] = {}
    dist_sum: dict[int, float] = {}
    for d, row_idx in nearest:
        c = int(model.train_y[row_idx])
        votes[c] = votes.get(c, 0) + 1
        dist_sum[c] = dist_sum.get(c, 0.0) + d
    best_votes = max(votes.values())
    tied = [c for c, v in votes.items() if v == best_votes]
    if len(tied) > 1:
        best_sum = min(dist_sum[c] for c in tied)
        tied = [c for c in tied if dist_sum[c] == best_sum]
    return min(tied)


def svm_oracle(model: SvmModel, x) -> int:
    """Enumerate all class pairs with scalar kernel evaluations."""
    starts = np.concatenate([[0], np.cumsum(model.sv_counts)])

    def kernel(s, xv):
        if model.kernel == "linear":
            return sum(s[j] * xv[j] for j in range(len(xv)))
        d2 = sum((s[j] - xv[j]) ** 2 for j in range(len(xv)))
        return math.exp(-model.gamma * d2)

    votes = {c: 0 for c in range(model.n_classes)}
    scores = {c: 0.0 for c in range(model.n_classes)}
    for p, (a, b) in enumerate(pair_order(model.n_classes)):
        decision = float(model.intercepts[p])
        for s in range(int(starts[a]), int(starts[a + 1])):
            decision += model.dual_coef[b - 1, s] * kernel(model.support[s], x)
        for s in range(int(starts[b]), int(starts[b + 1])):
            decision += model.dual_coef[a, s] * kernel(model.support[s], x)
        if decision > 0:
            votes[a] += 1
        else:
            votes[b] += 1
        scores[a] += decision
        scores[b] -= decision
    best_votes = max(votes.values())
    tied = [c for c, v in votes.items() if v == best_votes]
    if len(tied) > 1:
        best_score = max(scores[c] for c in tied)
        tied = [c for c in tied if scores[c] == best_score]
    return min(tied)


def mlp_oracle_scores(model: MlpModel, x):
    """Per-neuron scalar forward pass."""
    a = list(x)
    for layer, (w, b) in enumerate(zip(model.weights, model.biases)):
        out = []
        for o in range(w.shape[0]):
            z = b[o]
            for i in range(w.shape[1]):
                z += w[o, i] * a[i]
            if layer < len(model.weights) - 1:
                z = max(0.0, z)
            out.append(z)
        a = out
    return a


def mlp_oracle(model: MlpModel, x) -> int:
    scores = mlp_oracle_scores(model, x)
    best = max(scores)
    return min(c for c, s in enumerate(scores) if s == best)


def rf_oracle(model: RfModel, x) -> int:
    """Route each tree one node at a time; explicit vote count."""
    votes = {c: 0 for c in range(model.n_classes)}
    for tree in model.trees:
        node = 0
        while tree.feature[node] != -1:
            if x[tree.feature[node]] <= tree.threshold[node]:
                node = int(tree.left[node])
            else:
                node = int(tree.right[node])
        votes[int(tree.leaf_class[node])] += 1
    best = max(votes.values())
    return min(c for c, v in votes.items() if v == best)


# --- scalar power oracles --------------------------------------------------------

def real_power_oracle(v, i) -> float:
    acc = 0.0
    for k in range(len(v)):
        acc += v[k] * i[k]
    return acc / len(v)


def apparent_power_oracle(v, i) -> float:
    sv = sum(float(x) * float(x) for x in v) / len(v)
    si = sum(float(x) * float(x) for x in i) / len(i)
    return math.sqrt(sv) * math.sqrt(si)
