"""Random-forest training: bagged CART trees with Gini splits.

Each tree sees a bootstrap resample (n draws with replacement) and, at every
node, ceil(sqrt(f)) candidate features drawn without replacement. The best
split minimizes the weighted Gini impurity of the children; thresholds sit
at the midpoint between adjacent distinct sorted values. A node becomes a
leaf when it is pure, the depth limit is reached, or no split improves on
the parent impurity. Per-tree RNG streams derive from (seed, tree index), so
training is reproducible and order-independent.
"""

from __future__ import annotations

import numpy as np

from ..models.forest import LEAF, RfModel, TreeNodes
from .dataset import Dataset

_IMPROVEMENT_EPS = 1e-12


def _gini(counts: np.ndarray) -> float:
    total = counts.sum()
    if total == 0:
        return 0.0
    p = counts / total
    return float(1.0 - np.dot(p, p))


def _majority(counts: np.ndarray) -> int:
    return int(np.argmax(counts))  # first max = lowest class id


def _best_split(x, y, feature_ids, n_classes):
    """Best (feature, threshold, weighted child Gini) over the candidates."""
    n = y.size
    parent_counts = np.bincount(y, minlength=n_classes)
    best = None
    onehot = np.zeros((n, n_classes))
    onehot[np.arange(n), y] = 1.0
    for f in feature_ids:
        order = np.argsort(x[:, f], kind="stable")
        xs = x[order, f]
        cut = np.flatnonzero(xs[:-1] < xs[1:])  # split after position i
        if cut.size == 0:
            continue
        cum = np.cumsum(onehot[order], axis=0)
        left = cum[cut]  # (n_cuts, C)
        right = parent_counts - left
        nl = left.sum(axis=1)
        nr = n - nl
        gini_l = 1.0 - np.einsum("ij,ij->i", left, left) / (nl * nl)
        gini_r = 1.0 - np.einsum("ij,ij->i", right, right) / (nr * nr)
        weighted = (nl * gini_l + nr * gini_r) / n
        k = int(np.argmin(weighted))
        if best is None or weighted[k] < best[2]:
            threshold = (xs[cut[k]] + xs[cut[k] + 1]) / 2.0
            best = (int(f), float(threshold), float(weighted[k]))
    return best


def _grow_tree(x, y, n_classes, max_depth, n_candidates, rng) -> TreeNodes:
    feature: list[int] = []
    threshold: list[float] = []
    left: list[int] = []
    right: list[int] = []
    leaf_class: list[int] = []

    def new_node() -> int:
        feature.append(LEAF)
        threshold.append(0.0)
        left.append(LEAF)
        right.append(LEAF)
        leaf_class.append(LEAF)
        return len(feature) - 1

    def build(rows: np.ndarray, depth: int) -> int:
        node = new_node()
        counts = np.bincount(y[rows], minlength=n_classes)
        pure = np.count_nonzero(counts) <= 1
        if pure or (max_depth is not None and depth >= max_depth):
            leaf_class[node] = _majority(counts)
            return node
        candidates = rng.choice(x.shape[1], size=n_candidates, replace=False)
        split = _best_split(x[rows], y[rows], candidates, n_classes)
        if split is None or split[2] >= _gini(counts) - _IMPROVEMENT_EPS:
            leaf_class[node] = _majority(counts)
            return node
        f, thr, _ = split
        go_left = x[rows, f] <= thr
        feature[node] = f
        threshold[node] = thr
        left[node] = build(rows[go_left], depth + 1)
        right[node] = build(rows[~go_left], depth + 1)
        return node

    build(np.arange(y.size), 0)
    return TreeNodes(
        feature=np.array(feature, dtype=np.int32),
        threshold=np.array(threshold, dtype=np.float64),
        left=np.array(left, dtype=np.int32),
        right=np.array(right, dtype=np.int32),
        leaf_class=np.array(leaf_class, dtype=np.int32),
    )


def train_rf(
    d: Dataset,
    n_trees: int = 100,
    max_depth: int | None = None,
    seed: int = 0,
    selected_indices: tuple[int, ...] | None = None,
) -> RfModel:
    """Fit a forest on (optionally feature-selected) raw, unscaled features."""
    if n_trees < 1:
        raise ValueError("a forest needs at least one tree")
    if selected_indices is None:
        selected_indices = tuple(range(d.n_features))
    x = d.x[:, np.array(selected_indices, dtype=np.intp)]
    y = d.y
    n_classes = len(d.class_names)
    n_candidates = max(1, int(np.ceil(np.sqrt(x.shape[1]))))
    trees = []
    for t in range(n_trees):
        rng = np.random.default_rng([seed, t])
        rows = rng.integers(0, y.size, size=y.size)
        trees.append(_grow_tree(x[rows], y[rows], n_classes, max_depth, n_candidates, rng))
    return RfModel(
        class_names=d.class_names,
        layout=d.layout,
        selected_indices=tuple(selected_indices),
        scaler=None,  # trees are scale-free
        trees=tuple(trees),
    )
