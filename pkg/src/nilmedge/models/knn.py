"""k-nearest-neighbour classifier over squared Euclidean distance.

The model stores its (scaled) training matrix verbatim. Ties are broken
deterministically: equal distances prefer the lower training-row index,
equal vote counts prefer the smaller summed neighbour distance, and exact
residual ties fall back to the lowest class id.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .base import BaseModel


@dataclass(frozen=True)
class KnnModel(BaseModel):
    k: int = 1
    train_x: np.ndarray = None
    train_y: np.ndarray = None

    def __post_init__(self):
        object.__setattr__(self, "train_x", np.asarray(self.train_x, dtype=np.float64))
        object.__setattr__(self, "train_y", np.asarray(self.train_y, dtype=np.int32))
        if self.k < 1:
            raise ValueError("k must be a positive integer")
        if self.train_x.shape[0] < self.k:
            raise ValueError(f"k={self.k} exceeds the {self.train_x.shape[0]} training rows")
        if self.train_x.shape[0] != self.train_y.shape[0]:
            raise ValueError("training matrix and labels disagree on row count")

    def predict_matrix(self, x: np.ndarray) -> np.ndarray:
        x = np.atleast_2d(np.asarray(x, dtype=np.float64))
        if x.shape[1] != self.train_x.shape[1]:
            raise ValueError(
                f"expected {self.train_x.shape[1]} features, got {x.shape[1]}"
            )
        # squared distances computed row-wise to bound memory
        out = np.empty(x.shape[0], dtype=np.int64)
        for r, row in enumerate(x):
            diff = self.train_x - row
            dists = np.einsum("ij,ij->i", diff, diff)
            order = np.argsort(dists, kind="stable")[: self.k]
            votes = np.bincount(self.train_y[order], minlength=self.n_classes)
            best = np.flatnonzero(votes == votes.max())
            if best.size > 1:
                sums = np.array(
                    [dists[order[self.train_y[order] == c]].sum() for c in best]
                )
                best = best[np.flatnonzero(sums == sums.min())]
            out[r] = int(best[0])
        return out


def predict_knn(model: KnnModel, x: np.ndarray) -> int:
    """Class id for one already-scaled feature vector."""
    return int(model.predict_matrix(np.asarray(x)[None, :])[0])
