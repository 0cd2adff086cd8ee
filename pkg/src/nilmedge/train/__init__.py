"""Training, hyperparameter search, feature ranking, and the sweep methodology."""

from .cart import train_rf
from .dataset import Dataset, load_dataset, save_dataset, split_dataset
from .metrics import ClassificationMetrics, confusion_matrix, evaluate
from .selection import (
    GridSearchResult,
    GridSpec,
    MdaReport,
    SweepPoint,
    SweepReport,
    derive_seed,
    grid_search,
    mda_rank,
    sweep_feature_count,
)
from .sgd import DivergenceError, train_mlp
from .smo import train_svm
from .trainers import MODEL_KINDS, train_knn, train_model

__all__ = [
    "Dataset",
    "split_dataset",
    "save_dataset",
    "load_dataset",
    "ClassificationMetrics",
    "confusion_matrix",
    "evaluate",
    "GridSpec",
    "GridSearchResult",
    "grid_search",
    "MdaReport",
    "mda_rank",
    "SweepPoint",
    "SweepReport",
    "sweep_feature_count",
    "derive_seed",
    "train_knn",
    "train_rf",
    "train_mlp",
    "train_svm",
    "train_model",
    "MODEL_KINDS",
    "DivergenceError",
]
