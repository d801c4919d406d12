"""Feature containers and their on-disk formats.

A FeatureMatrix serializes to a little-endian binary file: magic "CFKM",
format version, family tag, row/column counts, a face-id string table, then
the values as row-major float64.  A CSV export (header row of feature names)
is provided for interoperability.
"""

from __future__ import annotations

import csv
import struct
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from facekit.errors import DimMismatch, SchemaViolation

FAMILIES = (
    "S", "I", "SI", "SIex", "Mom", "LBP", "HOG",
    "CNN_A", "CNN_G", "CNN_F", "E", "N", "M", "C", "IP", "ENMC",
)

# Declared dimensionalities; HOG depends on its layout config and is absent.
FAMILY_DIMS = {
    "S": 23, "I": 31, "SI": 54, "SIex": 454, "Mom": 6, "LBP": 1328,
    "CNN_A": 512, "CNN_G": 512, "CNN_F": 4096,
    "E": 72, "N": 66, "M": 153, "C": 105, "IP": 21, "ENMC": 396,
}

_MAGIC = b"CFKM"
_VERSION = 1


def check_family(family: str) -> None:
    if family not in FAMILIES:
        raise SchemaViolation("family", family, f"must be one of {FAMILIES}")


@dataclass(frozen=True)
class FeatureVector:
    family: str
    values: np.ndarray
    names: tuple[str, ...] | None = None

    def __post_init__(self):
        check_family(self.family)
        vals = np.asarray(self.values, dtype=float).ravel()
        if not np.all(np.isfinite(vals)):
            raise SchemaViolation("values", self.family, "non-finite feature value")
        expected = FAMILY_DIMS.get(self.family)
        if expected is not None and vals.size != expected:
            raise DimMismatch(f"{self.family}: expected {expected} dims, got {vals.size}")
        if self.names is not None and len(self.names) != vals.size:
            raise DimMismatch(f"{self.family}: {len(self.names)} names for {vals.size} values")
        object.__setattr__(self, "values", vals)

    @property
    def dim(self) -> int:
        return int(self.values.size)


@dataclass(frozen=True)
class FeatureMatrix:
    family: str
    face_ids: tuple[str, ...]
    values: np.ndarray
    feature_names: tuple[str, ...] | None = None

    def __post_init__(self):
        check_family(self.family)
        vals = np.asarray(self.values, dtype=float)
        if vals.ndim != 2:
            raise SchemaViolation("values", self.family, f"expected 2-d array, got {vals.ndim}-d")
        if vals.shape[0] != len(self.face_ids):
            raise DimMismatch(
                f"{len(self.face_ids)} face ids for {vals.shape[0]} rows"
            )
        if len(set(self.face_ids)) != len(self.face_ids):
            raise SchemaViolation("face_ids", self.family, "duplicate face id")
        if self.feature_names is not None and len(self.feature_names) != vals.shape[1]:
            raise DimMismatch(
                f"{len(self.feature_names)} names for {vals.shape[1]} columns"
            )
        object.__setattr__(self, "values", vals)

    @property
    def n_faces(self) -> int:
        return len(self.face_ids)

    @property
    def dim(self) -> int:
        return int(self.values.shape[1])

    def row(self, face_id: str) -> np.ndarray:
        return self.values[self.face_ids.index(face_id)]


def stack_vectors(family: str, face_ids, vectors) -> FeatureMatrix:
    vecs = list(vectors)
    names = vecs[0].names if vecs and vecs[0].names else None
    return FeatureMatrix(
        family=family,
        face_ids=tuple(face_ids),
        values=np.vstack([v.values for v in vecs]) if vecs else np.zeros((0, 0)),
        feature_names=names,
    )


def save_matrix(matrix: FeatureMatrix, path) -> None:
    path = Path(path)
    ids_blob = b"".join(
        struct.pack("<I", len(e)) + e
        for e in (fid.encode("utf-8") for fid in matrix.face_ids)
    )
    fam = matrix.family.encode("utf-8")
    header = _MAGIC + struct.pack("<I", _VERSION)
    header += struct.pack("<I", len(fam)) + fam
    header += struct.pack("<QQ", matrix.n_faces, matrix.dim)
    body = np.ascontiguousarray(matrix.values, dtype="<f8").tobytes()
    path.write_bytes(header + ids_blob + body)


def load_matrix(path) -> FeatureMatrix:
    path = Path(path)
    blob = path.read_bytes()
    if blob[:4] != _MAGIC:
        raise SchemaViolation("magic", str(path), "not a feature matrix file")
    off = 4
    (version,) = struct.unpack_from("<I", blob, off)
    off += 4
    if version != _VERSION:
        raise SchemaViolation("version", str(path), f"unsupported version {version}")
    (fam_len,) = struct.unpack_from("<I", blob, off)
    off += 4
    family = blob[off:off + fam_len].decode("utf-8")
    off += fam_len
    n_rows, n_cols = struct.unpack_from("<QQ", blob, off)
    off += 16
    face_ids = []
    for _ in range(n_rows):
        (ln,) = struct.unpack_from("<I", blob, off)
        off += 4
        face_ids.append(blob[off:off + ln].decode("utf-8"))
        off += ln
    vals = np.frombuffer(blob, dtype="<f8", count=n_rows * n_cols, offset=off)
    return FeatureMatrix(
        family=family,
        face_ids=tuple(face_ids),
        values=vals.reshape(n_rows, n_cols).copy(),
    )


def export_csv(matrix: FeatureMatrix, path) -> None:
    names = matrix.feature_names or tuple(
        f"{matrix.family}_{i}" for i in range(matrix.dim)
    )
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["face_id", *names])
        for fid, row in zip(matrix.face_ids, matrix.values):
            w.writerow([fid, *(repr(float(v)) for v in row)])
