"""Multilayer perceptron inference: rectified hidden layers, argmax output.

Weights are stored as (out, in) matrices. The forward pass is

    a = max(0, W a + b)   per hidden layer
    scores = W_last a + b_last

and the prediction is the argmax of the scores (lowest class id on exact
ties, which is what argmax-first-hit gives).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .base import BaseModel


@dataclass(frozen=True)
class MlpModel(BaseModel):
    weights: tuple[np.ndarray, ...] = ()  # each (out_i, in_i)
    biases: tuple[np.ndarray, ...] = ()  # each (out_i,)

    def __post_init__(self):
        object.__setattr__(
            self, "weights", tuple(np.asarray(w, dtype=np.float64) for w in self.weights)
        )
        object.__setattr__(
            self, "biases", tuple(np.asarray(b, dtype=np.float64) for b in self.biases)
        )
        if len(self.weights) != len(self.biases) or not self.weights:
            raise ValueError("weights and biases must pair up, one per layer")
        for w, b in zip(self.weights, self.biases):
            if w.ndim != 2 or b.ndim != 1 or w.shape[0] != b.shape[0]:
                raise ValueError("each layer needs a (out, in) matrix and an (out,) bias")
        for prev, nxt in zip(self.weights, self.weights[1:]):
            if nxt.shape[1] != prev.shape[0]:
                raise ValueError(
                    f"layer dimensions do not chain: {prev.shape} then {nxt.shape}"
                )
        if self.weights[-1].shape[0] != self.n_classes:
            raise ValueError("the output layer must have one score per class")

    @property
    def layer_sizes(self) -> tuple[int, ...]:
        return (self.weights[0].shape[1],) + tuple(w.shape[0] for w in self.weights)

    @property
    def parameter_count(self) -> int:
        return int(sum(w.size + b.size for w, b in zip(self.weights, self.biases)))

    def scores_matrix(self, x: np.ndarray) -> np.ndarray:
        a = np.atleast_2d(np.asarray(x, dtype=np.float64))
        if a.shape[1] != self.weights[0].shape[1]:
            raise ValueError(f"expected {self.weights[0].shape[1]} features, got {a.shape[1]}")
        for w, b in zip(self.weights[:-1], self.biases[:-1]):
            a = np.maximum(a @ w.T + b, 0.0)
        return a @ self.weights[-1].T + self.biases[-1]

    def predict_matrix(self, x: np.ndarray) -> np.ndarray:
        return np.argmax(self.scores_matrix(x), axis=1).astype(np.int64)


def predict_mlp(model: MlpModel, x: np.ndarray) -> int:
    """Class id for one already-scaled feature vector."""
    return int(model.predict_matrix(np.asarray(x)[None, :])[0])
