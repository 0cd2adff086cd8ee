"""Random-forest inference over flat node tables.

Each tree is four parallel arrays indexed by node id: the split feature
(-1 marks a leaf), the threshold, and the left/right child ids, which always
point forward (child id > node id). Routing follows `x[feature] <= threshold`
to the left child. The forest takes a majority vote with the lowest class id
winning ties.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .base import BaseModel

LEAF = -1


class TreeIntegrityError(ValueError):
    """A node table is internally inconsistent (bad child or feature index)."""


@dataclass(frozen=True)
class TreeNodes:
    feature: np.ndarray  # (n_nodes,) int, LEAF for leaves
    threshold: np.ndarray  # (n_nodes,) float
    left: np.ndarray  # (n_nodes,) int child ids, LEAF for leaves
    right: np.ndarray
    leaf_class: np.ndarray  # (n_nodes,) int, LEAF for internal nodes

    def __post_init__(self):
        object.__setattr__(self, "feature", np.asarray(self.feature, dtype=np.int32))
        object.__setattr__(self, "threshold", np.asarray(self.threshold, dtype=np.float64))
        object.__setattr__(self, "left", np.asarray(self.left, dtype=np.int32))
        object.__setattr__(self, "right", np.asarray(self.right, dtype=np.int32))
        object.__setattr__(self, "leaf_class", np.asarray(self.leaf_class, dtype=np.int32))

    @property
    def n_nodes(self) -> int:
        return int(self.feature.size)

    def validate(self, n_features: int, n_classes: int) -> None:
        n = self.n_nodes
        if n == 0:
            raise TreeIntegrityError("empty node table")
        internal = self.feature != LEAF
        leaves = ~internal
        if np.any((self.feature[internal] < 0) | (self.feature[internal] >= n_features)):
            raise TreeIntegrityError("split feature index out of range")
        for child in (self.left[internal], self.right[internal]):
            if np.any((child <= np.flatnonzero(internal)) | (child >= n)):
                raise TreeIntegrityError("child node ids must point forward within the table")
        if np.any((self.leaf_class[leaves] < 0) | (self.leaf_class[leaves] >= n_classes)):
            raise TreeIntegrityError("leaf class id out of range")

    def worst_case_depth(self) -> int:
        """Longest root-to-leaf path, counted in comparisons."""
        depth = np.zeros(self.n_nodes, dtype=np.int64)
        worst = 0
        for node in range(self.n_nodes):
            if self.feature[node] == LEAF:
                worst = max(worst, int(depth[node]))
            else:
                depth[self.left[node]] = depth[node] + 1
                depth[self.right[node]] = depth[node] + 1
        return worst

    def route_matrix(self, x: np.ndarray) -> np.ndarray:
        """Leaf class for each row of x, routing all rows in lockstep."""
        pos = np.zeros(x.shape[0], dtype=np.int64)
        active = self.feature[pos] != LEAF
        while np.any(active):
            idx = np.flatnonzero(active)
            nodes = pos[idx]
            feats = self.feature[nodes]
            go_left = x[idx, feats] <= self.threshold[nodes]
            nxt = np.where(go_left, self.left[nodes], self.right[nodes])
            if np.any((nxt < 0) | (nxt >= self.n_nodes)):
                raise TreeIntegrityError("routing escaped the node table")
            pos[idx] = nxt
            active[idx] = self.feature[nxt] != LEAF
        return self.leaf_class[pos]


@dataclass(frozen=True)
class RfModel(BaseModel):
    trees: tuple[TreeNodes, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "trees", tuple(self.trees))
        if not self.trees:
            raise ValueError("a forest needs at least one tree")
        for tree in self.trees:
            tree.validate(self.n_features, self.n_classes)

    @property
    def n_trees(self) -> int:
        return len(self.trees)

    @property
    def node_count(self) -> int:
        return sum(t.n_nodes for t in self.trees)

    def worst_case_comparisons(self) -> int:
        """Sum of worst-case depths over trees; the MAC-equivalent count."""
        return sum(t.worst_case_depth() for t in self.trees)

    def predict_matrix(self, x: np.ndarray) -> np.ndarray:
        x = np.atleast_2d(np.asarray(x, dtype=np.float64))
        if x.shape[1] != self.n_features:
            raise ValueError(f"expected {self.n_features} features, got {x.shape[1]}")
        votes = np.zeros((x.shape[0], self.n_classes), dtype=np.int64)
        for tree in self.trees:
            leaf = tree.route_matrix(x)
            votes[np.arange(x.shape[0]), leaf] += 1
        return np.argmax(votes, axis=1).astype(np.int64)  # first max = lowest id


def predict_rf(model: RfModel, x: np.ndarray) -> int:
    """Class id for one (unscaled) feature vector; trees are scale-free."""
    return int(model.predict_matrix(np.asarray(x)[None, :])[0])
