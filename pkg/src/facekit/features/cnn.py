"""Ingestion of precomputed CNN feature vectors.

The toolkit never runs a network; it loads per-face vectors produced
elsewhere, keyed by face id, and validates their dimensionality (512 for the
two penultimate-layer families, 4096 for the fully-connected one).

Accepted formats: CSV (``face_id`` column then one column per dimension,
header optional) and NPZ with arrays ``face_ids`` and ``values``.
"""

from __future__ import annotations

import csv
import warnings
from pathlib import Path

import numpy as np

from facekit.errors import DimMismatch, MissingFile, SchemaViolation, UnknownFaceId
from facekit.features.vector import FAMILY_DIMS, FeatureMatrix

CNN_FAMILIES = ("CNN_A", "CNN_G", "CNN_F")


def _read_csv(path: Path) -> tuple[list[str], list[np.ndarray]]:
    ids, rows = [], []
    with open(path, newline="") as fh:
        for rec in csv.reader(fh):
            if not rec:
                continue
            try:
                vals = np.array([float(v) for v in rec[1:]])
            except ValueError:
                if not ids:
                    continue  # header
                raise SchemaViolation("row", str(path), f"non-numeric value in row for {rec[0]!r}")
            ids.append(rec[0])
            rows.append(vals)
    return ids, rows


def _read_npz(path: Path) -> tuple[list[str], list[np.ndarray]]:
    with np.load(path, allow_pickle=False) as data:
        if "face_ids" not in data or "values" not in data:
            raise SchemaViolation("npz", str(path), "need arrays 'face_ids' and 'values'")
        ids = [str(s) for s in data["face_ids"]]
        vals = np.asarray(data["values"], dtype=float)
    return ids, list(vals)


def ingest_cnn_features(path, family: str,
                        expected_ids=None) -> tuple[FeatureMatrix, tuple[str, ...]]:
    """Load per-face vectors for one CNN family.

    Returns the matrix and the tuple of expected face ids that were missing
    from the file (empty when expected_ids is not given).  Ids present in the
    file but not expected raise UnknownFaceId.
    """
    if family not in CNN_FAMILIES:
        raise SchemaViolation("family", family, f"must be one of {CNN_FAMILIES}")
    path = Path(path)
    if not path.exists():
        raise MissingFile(str(path))
    ids, rows = (_read_npz if path.suffix == ".npz" else _read_csv)(path)
    dim = FAMILY_DIMS[family]
    if not ids:
        warnings.warn(f"{path}: no feature rows")
        return FeatureMatrix(family, (), np.zeros((0, dim))), tuple(expected_ids or ())
    for fid, row in zip(ids, rows):
        if row.size != dim:
            raise DimMismatch(f"{fid}: expected {dim} dims for {family}, got {row.size}")
    if expected_ids is not None:
        known = set(expected_ids)
        for fid in ids:
            if fid not in known:
                raise UnknownFaceId(fid)
        missing = tuple(f for f in expected_ids if f not in set(ids))
    else:
        missing = ()
    return FeatureMatrix(family, tuple(ids), np.vstack(rows)), missing
