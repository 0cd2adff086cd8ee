"""Shared model plumbing: feature standardization and the common predict contract.

Every trained model carries the full-vector layout it was built from, the
indices it actually consumes, an optional scaler (tree models skip scaling),
and the class-id -> name table. `classify_matrix` applies selection and
scaling before handing rows to the kind-specific predictor, so callers can
always feed full feature vectors.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ..features import FeatureLayout, select_features


class ZeroVarianceError(ValueError):
    """A feature column is constant; distance/margin models cannot scale it."""


@dataclass(frozen=True)
class Scaler:
    """Per-feature standardization fitted on training data."""

    mean: np.ndarray
    std: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "mean", np.asarray(self.mean, dtype=np.float64))
        object.__setattr__(self, "std", np.asarray(self.std, dtype=np.float64))
        if self.mean.shape != self.std.shape:
            raise ValueError("mean and std must have the same shape")
        if np.any(self.std <= 0):
            raise ZeroVarianceError("scaler std must be positive for every feature")

    @classmethod
    def fit(cls, matrix: np.ndarray) -> "Scaler":
        matrix = np.asarray(matrix, dtype=np.float64)
        mean = matrix.mean(axis=0)
        std = matrix.std(axis=0)
        dead = np.flatnonzero(std == 0)
        if dead.size:
            raise ZeroVarianceError(
                f"zero-variance feature columns {dead.tolist()} rejected at fit time"
            )
        return cls(mean=mean, std=std)

    def transform(self, x: np.ndarray) -> np.ndarray:
        return (np.asarray(x, dtype=np.float64) - self.mean) / self.std


@dataclass(frozen=True)
class BaseModel:
    class_names: tuple[str, ...]
    layout: FeatureLayout
    selected_indices: tuple[int, ...]
    scaler: Scaler | None
    metadata: dict = field(default_factory=dict, compare=False)

    @property
    def n_classes(self) -> int:
        return len(self.class_names)

    @property
    def n_features(self) -> int:
        return len(self.selected_indices)

    def prepare(self, x_full: np.ndarray) -> np.ndarray:
        """Select this model's features from a full-layout vector and scale them."""
        x = select_features(np.asarray(x_full, dtype=np.float64), self.selected_indices)
        return self.scaler.transform(x) if self.scaler is not None else x

    def prepare_matrix(self, matrix: np.ndarray) -> np.ndarray:
        matrix = np.asarray(matrix, dtype=np.float64)
        sub = matrix[:, np.array(self.selected_indices, dtype=np.intp)]
        return self.scaler.transform(sub) if self.scaler is not None else sub


def classify(model, x_full: np.ndarray) -> int:
    """Predict the class id for one full-layout feature vector."""
    return int(model.predict_matrix(model.prepare(x_full)[None, :])[0])


def classify_matrix(model, matrix_full: np.ndarray) -> np.ndarray:
    """Predict class ids for full-layout rows (selection + scaling included)."""
    return model.predict_matrix(model.prepare_matrix(matrix_full))
