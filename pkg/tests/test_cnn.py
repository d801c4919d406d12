import numpy as np
import pytest

from facekit.errors import DimMismatch, MissingFile, SchemaViolation, UnknownFaceId
from facekit.features.cnn import ingest_cnn_features


def write_csv(path, ids, mat, header=False):
    with open(path, "w") as fh:
        if header:
            fh.write("face_id," + ",".join(f"f{i}" for i in range(mat.shape[1])) + "\n")
        for fid, row in zip(ids, mat):
            fh.write(fid + "," + ",".join(repr(float(v)) for v in row) + "\n")


def test_csv_roundtrip(tmp_path):
    rng = np.random.default_rng(0)
    mat = rng.normal(size=(3, 512))
    p = tmp_path / "feats.csv"
    write_csv(p, ["a", "b", "c"], mat)
    fm, missing = ingest_cnn_features(p, "CNN_A")
    assert fm.family == "CNN_A"
    assert fm.face_ids == ("a", "b", "c")
    np.testing.assert_array_equal(fm.values, mat)
    assert missing == ()


def test_csv_header_skipped(tmp_path):
    mat = np.ones((2, 512))
    p = tmp_path / "feats.csv"
    write_csv(p, ["x", "y"], mat, header=True)
    fm, _ = ingest_cnn_features(p, "CNN_G")
    assert fm.face_ids == ("x", "y")


def test_npz_roundtrip(tmp_path):
    rng = np.random.default_rng(1)
    mat = rng.normal(size=(4, 4096))
    p = tmp_path / "feats.npz"
    np.savez(p, face_ids=np.array(["f1", "f2", "f3", "f4"]), values=mat)
    fm, _ = ingest_cnn_features(p, "CNN_F")
    assert fm.face_ids == ("f1", "f2", "f3", "f4")
    np.testing.assert_array_equal(fm.values, mat)


def test_wrong_dim_raises(tmp_path):
    p = tmp_path / "feats.csv"
    write_csv(p, ["a"], np.zeros((1, 100)))
    with pytest.raises(DimMismatch):
        ingest_cnn_features(p, "CNN_A")


def test_non_cnn_family_rejected(tmp_path):
    p = tmp_path / "feats.csv"
    write_csv(p, ["a"], np.zeros((1, 512)))
    with pytest.raises(SchemaViolation):
        ingest_cnn_features(p, "S")


def test_missing_file(tmp_path):
    with pytest.raises(MissingFile):
        ingest_cnn_features(tmp_path / "nope.csv", "CNN_A")


def test_expected_ids_checked(tmp_path):
    p = tmp_path / "feats.csv"
    write_csv(p, ["a", "b"], np.zeros((2, 512)))
    fm, missing = ingest_cnn_features(p, "CNN_A", expected_ids=["a", "b", "c"])
    assert missing == ("c",)
    with pytest.raises(UnknownFaceId):
        ingest_cnn_features(p, "CNN_A", expected_ids=["a"])


def test_non_numeric_body_row_raises(tmp_path):
    p = tmp_path / "feats.csv"
    with open(p, "w") as fh:
        fh.write("a," + ",".join(["1.0"] * 512) + "\n")
        fh.write("b," + ",".join(["oops"] * 512) + "\n")
    with pytest.raises(SchemaViolation):
        ingest_cnn_features(p, "CNN_A")


def test_empty_file_warns(tmp_path):
    p = tmp_path / "feats.csv"
    p.write_text("")
    with pytest.warns(UserWarning):
        fm, missing = ingest_cnn_features(p, "CNN_A", expected_ids=["q"])
    assert fm.values.shape == (0, 512)
    assert missing == ("q",)
