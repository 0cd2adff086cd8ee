"""Model file format.

Binary: magic ``NLMM``, little-endian u16 version, u8 kind, then a
length-prefixed JSON header (class table, layout, selected indices,
kind-specific scalars, and an array manifest) followed by the raw numeric
sections in manifest order. All reals are 64-bit IEEE, so a round trip
reproduces predictions bit for bit.

A JSON text twin of the same content exists for inspection; reals are
hex-encoded (float.hex) there to stay lossless.
"""

from __future__ import annotations

import json
import struct
from pathlib import Path

import numpy as np

from ..features import FeatureLayout
from .base import BaseModel, Scaler
from .forest import RfModel, TreeIntegrityError, TreeNodes
from .knn import KnnModel
from .mlp import MlpModel
from .svm import SvmModel

MAGIC = b"NLMM"
FORMAT_VERSION = 1

KIND_CODES = {"knn": 1, "svm": 2, "mlp": 3, "rf": 4}
KIND_NAMES = {v: k for k, v in KIND_CODES.items()}
KIND_CLASSES = {"knn": KnnModel, "svm": SvmModel, "mlp": MlpModel, "rf": RfModel}


class ModelFormatError(ValueError):
    """The byte stream is not a model file."""


class ModelVersionError(ModelFormatError):
    """The file declares an unsupported format version."""


class ModelTruncatedError(ModelFormatError):
    """The file ends before its declared sections do."""


class ModelIntegrityError(ModelFormatError):
    """Decoded payload violates a model invariant."""


def model_kind(model: BaseModel) -> str:
    for name, cls in KIND_CLASSES.items():
        if isinstance(model, cls):
            return name
    raise TypeError(f"unknown model type {type(model).__name__}")


def _array_manifest(model: BaseModel) -> list[tuple[str, np.ndarray]]:
    arrays: list[tuple[str, np.ndarray]] = []
    if model.scaler is not None:
        arrays.append(("scaler_mean", model.scaler.mean))
        arrays.append(("scaler_std", model.scaler.std))
    kind = model_kind(model)
    if kind == "knn":
        arrays += [("train_x", model.train_x), ("train_y", model.train_y)]
    elif kind == "svm":
        arrays += [
            ("support", model.support),
            ("dual_coef", model.dual_coef),
            ("intercepts", model.intercepts),
        ]
    elif kind == "mlp":
        for idx, (w, b) in enumerate(zip(model.weights, model.biases)):
            arrays += [(f"w{idx}", w), (f"b{idx}", b)]
    else:  # rf
        for t, tree in enumerate(model.trees):
            arrays += [
                (f"tree{t}_feature", tree.feature),
                (f"tree{t}_threshold", tree.threshold),
                (f"tree{t}_left", tree.left),
                (f"tree{t}_right", tree.right),
                (f"tree{t}_leaf", tree.leaf_class),
            ]
    return arrays


def _params(model: BaseModel) -> dict:
    kind = model_kind(model)
    if kind == "knn":
        return {"k": int(model.k)}
    if kind == "svm":
        return {
            "kernel": model.kernel,
            "gamma_hex": float(model.gamma).hex(),
            "sv_counts": [int(c) for c in model.sv_counts],
        }
    if kind == "mlp":
        return {"n_layers": len(model.weights)}
    return {"n_trees": model.n_trees}


def _meta(model: BaseModel) -> dict:
    arrays = _array_manifest(model)
    return {
        "class_names": list(model.class_names),
        "layout": model.layout.to_dict(),
        "selected_indices": [int(i) for i in model.selected_indices],
        "has_scaler": model.scaler is not None,
        "metadata": model.metadata,
        "params": _params(model),
        "arrays": [
            {"name": name, "dtype": arr.dtype.str, "shape": list(arr.shape)}
            for name, arr in arrays
        ],
    }


def serialize(model: BaseModel) -> bytes:
    """Encode a model to its binary file form."""
    meta_blob = json.dumps(_meta(model), sort_keys=True).encode("utf-8")
    chunks = [
        MAGIC,
        struct.pack("<HB", FORMAT_VERSION, KIND_CODES[model_kind(model)]),
        struct.pack("<I", len(meta_blob)),
        meta_blob,
    ]
    for _, arr in _array_manifest(model):
        raw = np.ascontiguousarray(arr).astype(arr.dtype.newbyteorder("<")).tobytes()
        chunks.append(struct.pack("<I", len(raw)))
        chunks.append(raw)
    return b"".join(chunks)


class _Reader:
    def __init__(self, blob: bytes):
        self.blob = blob
        self.pos = 0

    def take(self, n: int) -> bytes:
        if self.pos + n > len(self.blob):
            raise ModelTruncatedError(
                f"needed {n} bytes at offset {self.pos}, file has {len(self.blob)}"
            )
        out = self.blob[self.pos : self.pos + n]
        self.pos += n
        return out


def _rebuild(kind: str, meta: dict, arrays: dict[str, np.ndarray]) -> BaseModel:
    scaler = None
    if meta["has_scaler"]:
        scaler = Scaler(mean=arrays["scaler_mean"], std=arrays["scaler_std"])
    common = dict(
        class_names=tuple(meta["class_names"]),
        layout=FeatureLayout.from_dict(meta["layout"]),
        selected_indices=tuple(meta["selected_indices"]),
        scaler=scaler,
        metadata=meta.get("metadata", {}),
    )
    params = meta["params"]
    if kind == "knn":
        return KnnModel(**common, k=params["k"], train_x=arrays["train_x"], train_y=arrays["train_y"])
    if kind == "svm":
        return SvmModel(
            **common,
            kernel=params["kernel"],
            gamma=float.fromhex(params["gamma_hex"]),
            support=arrays["support"],
            sv_counts=np.array(params["sv_counts"], dtype=np.int64),
            dual_coef=arrays["dual_coef"],
            intercepts=arrays["intercepts"],
        )
    if kind == "mlp":
        n_layers = params["n_layers"]
        return MlpModel(
            **common,
            weights=tuple(arrays[f"w{i}"] for i in range(n_layers)),
            biases=tuple(arrays[f"b{i}"] for i in range(n_layers)),
        )
    trees = []
    for t in range(params["n_trees"]):
        trees.append(
            TreeNodes(
                feature=arrays[f"tree{t}_feature"],
                threshold=arrays[f"tree{t}_threshold"],
                left=arrays[f"tree{t}_left"],
                right=arrays[f"tree{t}_right"],
                leaf_class=arrays[f"tree{t}_leaf"],
            )
        )
    return RfModel(**common, trees=tuple(trees))


def deserialize(blob: bytes) -> BaseModel:
    """Decode a model file; no partial model escapes a malformed stream."""
    reader = _Reader(blob)
    if reader.take(len(MAGIC)) != MAGIC:
        raise ModelFormatError(f"bad magic; expected {MAGIC!r}")
    version, kind_code = struct.unpack("<HB", reader.take(3))
    if version != FORMAT_VERSION:
        raise ModelVersionError(f"unsupported model format version {version}")
    if kind_code not in KIND_NAMES:
        raise ModelFormatError(f"unknown model kind code {kind_code}")
    kind = KIND_NAMES[kind_code]
    (meta_len,) = struct.unpack("<I", reader.take(4))
    try:
        meta = json.loads(reader.take(meta_len).decode("utf-8"))
    except (UnicodeDecodeError, json.JSONDecodeError) as exc:
        raise ModelFormatError(f"corrupt header: {exc}") from None
    arrays: dict[str, np.ndarray] = {}
    for entry in meta["arrays"]:
        (raw_len,) = struct.unpack("<I", reader.take(4))
        raw = reader.take(raw_len)
        dtype = np.dtype(entry["dtype"])
        expected = int(np.prod(entry["shape"], dtype=np.int64)) * dtype.itemsize
        if raw_len != expected:
            raise ModelIntegrityError(
                f"array {entry['name']!r} declares shape {entry['shape']} but carries {raw_len} bytes"
            )
        arrays[entry["name"]] = np.frombuffer(raw, dtype=dtype).reshape(entry["shape"]).copy()
    if reader.pos != len(blob):
        raise ModelFormatError(f"{len(blob) - reader.pos} trailing bytes after the last section")
    try:
        return _rebuild(kind, meta, arrays)
    except (ValueError, KeyError, TreeIntegrityError) as exc:
        raise ModelIntegrityError(str(exc)) from None


def save_model(model: BaseModel, path: str | Path) -> None:
    Path(path).write_bytes(serialize(model))


def load_model(path: str | Path) -> BaseModel:
    return deserialize(Path(path).read_bytes())


# --- JSON twin ---------------------------------------------------------------

def to_json(model: BaseModel) -> str:
    doc = {"format": "nilmedge-model-json", "version": FORMAT_VERSION, "kind": model_kind(model)}
    doc["meta"] = _meta(model)
    payload = {}
    for name, arr in _array_manifest(model):
        if arr.dtype.kind == "f":
            payload[name] = [float(v).hex() for v in arr.ravel()]
        else:
            payload[name] = [int(v) for v in arr.ravel()]
    doc["arrays"] = payload
    return json.dumps(doc, sort_keys=True, indent=1)


def from_json(text: str) -> BaseModel:
    doc = json.loads(text)
    if doc.get("format") != "nilmedge-model-json":
        raise ModelFormatError("not a model JSON document")
    if doc.get("version") != FORMAT_VERSION:
        raise ModelVersionError(f"unsupported model format version {doc.get('version')}")
    meta = doc["meta"]
    arrays: dict[str, np.ndarray] = {}
    for entry in meta["arrays"]:
        flat = doc["arrays"][entry["name"]]
        dtype = np.dtype(entry["dtype"])
        if dtype.kind == "f":
            values = np.array([float.fromhex(v) for v in flat], dtype=dtype)
        else:
            values = np.array(flat, dtype=dtype)
        arrays[entry["name"]] = values.reshape(entry["shape"])
    try:
        return _rebuild(doc["kind"], meta, arrays)
    except (ValueError, KeyError, TreeIntegrityError) as exc:
        raise ModelIntegrityError(str(exc)) from None
