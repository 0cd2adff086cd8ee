import numpy as np
import pytest

from helpers import random_knn, random_mlp, random_rf, random_svm
from nilmedge.models.base import Scaler
from nilmedge.models.io import (
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


def all_kinds(rng):
    return [random_knn(rng), random_svm(rng), random_mlp(rng, (5, 4, 3)), random_rf(rng, f=5)]


def test_round_trip_preserves_predictions_exactly(rng):
    x = rng.normal(size=(1000, 5))
    for m in all_kinds(rng):
        m2 = deserialize(serialize(m))
        assert model_kind(m2) == model_kind(m)
        np.testing.assert_array_equal(m.predict_matrix(x), m2.predict_matrix(x))


def test_round_trip_is_byte_stable(rng):
    for m in all_kinds(rng):
        blob = serialize(m)
        assert serialize(deserialize(blob)) == blob


def test_scaler_and_metadata_survive(rng):
    m = random_knn(rng)
    scaled = type(m)(class_names=m.class_names, layout=m.layout,
                     selected_indices=m.selected_indices,
                     scaler=Scaler(mean=np.arange(5.0), std=np.ones(5)),
                     metadata={"note": "x"},
                     k=m.k, train_x=m.train_x, train_y=m.train_y)
    m2 = deserialize(serialize(scaled))
    np.testing.assert_array_equal(m2.scaler.mean, np.arange(5.0))
    assert m2.metadata == {"note": "x"}


def test_truncation_raises_without_partial_model(rng):
    blob = serialize(random_mlp(rng))
    for cut in (3, 6, 20, len(blob) - 5):
        with pytest.raises(ModelTruncatedError):
            deserialize(blob[:cut])


def test_unknown_version_rejected(rng):
    blob = bytearray(serialize(random_knn(rng)))
    blob[4] = 99  # little-endian u16 version field
    with pytest.raises(ModelVersionError):
        deserialize(bytes(blob))


def test_bad_magic_rejected(rng):
    blob = b"XXXX" + serialize(random_knn(rng))[4:]
    with pytest.raises(ModelFormatError):
        deserialize(blob)


def test_corrupt_payload_is_integrity_error(rng):
    m = random_rf(rng, n_trees=3, f=4)
    blob = bytearray(serialize(m))
    # break a child index deep in the last tree section
    blob[-4:] = (10**6).to_bytes(4, "little", signed=True)
    with pytest.raises((ModelIntegrityError, ModelFormatError)):
        deserialize(bytes(blob))


def test_trailing_bytes_rejected(rng):
    blob = serialize(random_knn(rng)) + b"\x00"
    with pytest.raises(ModelFormatError):
        deserialize(blob)


def test_file_round_trip(tmp_path, rng):
    m = random_svm(rng)
    path = tmp_path / "model.nlmm"
    save_model(m, path)
    m2 = load_model(path)
    x = rng.normal(size=(50, 5))
    np.testing.assert_array_equal(m.predict_matrix(x), m2.predict_matrix(x))


def test_json_twin_is_lossless(rng):
    x = rng.normal(size=(200, 5))
    for m in all_kinds(rng):
        m2 = from_json(to_json(m))
        np.testing.assert_array_equal(m.predict_matrix(x), m2.predict_matrix(x))
        if model_kind(m) == "svm":
            assert m2.gamma == m.gamma  # hex-encoded real survives exactly


def test_json_rejects_wrong_document(rng):
    with pytest.raises(ModelFormatError):
        from_json('{"format": "something-else"}')
