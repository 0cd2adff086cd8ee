"""Classifier inference engines with a uniform predict/serialize contract."""

from .base import BaseModel, Scaler, ZeroVarianceError, classify, classify_matrix
from .forest import RfModel, TreeIntegrityError, TreeNodes, predict_rf
from .io import (
    ModelFormatError,
    ModelIntegrityError,
    ModelTruncatedError,
    ModelVersionError,
    deserialize,
    from_json,
    load_model,
    model_kind,
    save_model,
    serialize,
    to_json,
)
from .knn import KnnModel, predict_knn
from .mlp import MlpModel, predict_mlp
from .svm import SvmModel, kernel_matrix, pair_order, predict_svm

__all__ = [
    "BaseModel",
    "Scaler",
    "ZeroVarianceError",
    "classify",
    "classify_matrix",
    "KnnModel",
    "predict_knn",
    "SvmModel",
    "predict_svm",
    "kernel_matrix",
    "pair_order",
    "MlpModel",
    "predict_mlp",
    "RfModel",
    "TreeNodes",
    "TreeIntegrityError",
    "predict_rf",
    "serialize",
    "deserialize",
    "save_model",
    "load_model",
    "to_json",
    "from_json",
    "model_kind",
    "ModelFormatError",
    "ModelVersionError",
    "ModelTruncatedError",
    "ModelIntegrityError",
]
