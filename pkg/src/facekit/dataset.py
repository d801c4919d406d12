"""Face dataset model and manifest I/O.

A manifest is one JSON document listing faces with image references, 76-point
landmark sets (inline or per-face CSV), attribute labels, and the index
configuration (part map, 26-landmark triangulation subset) used by all
downstream geometry.  Paths inside a manifest are relative to the manifest
file's directory.
"""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from facekit.errors import (
    DuplicateFaceId,
    MissingFile,
    SchemaViolation,
    TooFewFaces,
)
from facekit.folds import stratified_fold_indices
from facekit.landmarks import DELAUNAY_SUBSET, PART_INDEX_MAP, LandmarkSet

RACES = ("North", "South", "Other", "Unknown")
GENDERS = ("Male", "Female", "Unknown")
SET_TAGS = ("Set1", "Set2", "Synthetic")


@dataclass(frozen=True)
class AttributeLabels:
    race: str = "Unknown"
    gender: str = "Unknown"
    age: float | None = None
    height: float | None = None
    weight: float | None = None

    def __post_init__(self):
        if self.race not in RACES:
            raise SchemaViolation("race", self.race, f"must be one of {RACES}")
        if self.gender not in GENDERS:
            raise SchemaViolation("gender", self.gender, f"must be one of {GENDERS}")
        for name in ("age", "height", "weight"):
            v = getattr(self, name)
            if v is not None and (not np.isfinite(v) or v < 0):
                raise SchemaViolation(name, v, "must be nonnegative and finite when present")


@dataclass(frozen=True)
class FaceRecord:
    face_id: str
    image_path: Path
    landmarks: LandmarkSet
    labels: AttributeLabels = field(default_factory=AttributeLabels)
    set_tag: str = "Synthetic"

    def __post_init__(self):
        if not self.face_id:
            raise SchemaViolation("face_id", self.face_id, "must be nonempty")
        if self.set_tag not in SET_TAGS:
            raise SchemaViolation("set_tag", self.set_tag, f"must be one of {SET_TAGS}")


@dataclass(frozen=True)
class DatasetManifest:
    faces: tuple[FaceRecord, ...]
    reference_face_id: str
    part_index_map: dict[str, tuple[int, ...]] = field(
        default_factory=lambda: dict(PART_INDEX_MAP)
    )
    delaunay_subset: tuple[int, ...] = DELAUNAY_SUBSET

    def __post_init__(self):
        if not self.faces:
            raise SchemaViolation("faces", "[]", "manifest lists no faces")
        seen = set()
        for f in self.faces:
            if f.face_id in seen:
                raise DuplicateFaceId(f.face_id)
            seen.add(f.face_id)
        if self.reference_face_id not in seen:
            raise SchemaViolation(
                "reference_face_id",
                self.reference_face_id,
                "does not name a face in the manifest",
            )

    def face(self, face_id: str) -> FaceRecord:
        for f in self.faces:
            if f.face_id == face_id:
                return f
        raise KeyError(face_id)

    @property
    def reference_face(self) -> FaceRecord:
        return self.face(self.reference_face_id)

    def label_counts(self) -> dict[str, dict[str, int]]:
        out: dict[str, dict[str, int]] = {"race": {}, "gender": {}, "set": {}}
        for f in self.faces:
            out["race"][f.labels.race] = out["race"].get(f.labels.race, 0) + 1
            out["gender"][f.labels.gender] = out["gender"].get(f.labels.gender, 0) + 1
            out["set"][f.set_tag] = out["set"].get(f.set_tag, 0) + 1
        return out

    def race_task_faces(self) -> tuple[FaceRecord, ...]:
        """Faces usable for the North/South task; Other/Unknown excluded."""
        return tuple(f for f in self.faces if f.labels.race in ("North", "South"))


@dataclass(frozen=True)
class FoldAssignment:
    fold_of_face: dict[str, int]
    k: int
    seed: int


def _load_landmark_csv(path: Path) -> np.ndarray:
    if not path.exists():
        raise MissingFile(str(path))
    rows = []
    with open(path, newline="") as fh:
        for rec in csv.reader(fh):
            if not rec:
                continue
            try:
                rows.append((float(rec[0]), float(rec[1])))
            except (ValueError, IndexError):
                if not rows:
                    continue  # header line
                raise SchemaViolation("landmarks", str(path), f"bad row {rec!r}")
    if len(rows) != 76:
        raise SchemaViolation("landmarks", str(path), f"expected 76 rows, got {len(rows)}")
    return np.array(rows, dtype=float)


def _face_from_json(entry: dict, base: Path, idx: int) -> FaceRecord:
    loc = f"faces[{idx}]"
    if not isinstance(entry, dict):
        raise SchemaViolation("faces", loc, "face entry must be an object")
    try:
        face_id = entry["face_id"]
        image_rel = entry["image"]
    except KeyError as exc:
        raise SchemaViolation(str(exc.args[0]), loc, "required field missing")
    image_path = base / image_rel
    if not image_path.exists():
        raise MissingFile(str(image_path))
    if "landmarks" in entry:
        pts = np.asarray(entry["landmarks"], dtype=float)
        if pts.shape != (76, 2):
            raise SchemaViolation("landmarks", loc, f"expected 76x2, got {pts.shape}")
    elif "landmarks_csv" in entry:
        pts = _load_landmark_csv(base / entry["landmarks_csv"])
    else:
        raise SchemaViolation("landmarks", loc, "need landmarks or landmarks_csv")
    raw = entry.get("labels", {})
    labels = AttributeLabels(
        race=raw.get("race", "Unknown"),
        gender=raw.get("gender", "Unknown"),
        age=raw.get("age"),
        height=raw.get("height"),
        weight=raw.get("weight"),
    )
    return FaceRecord(
        face_id=face_id,
        image_path=image_path,
        landmarks=LandmarkSet(pts),
        labels=labels,
        set_tag=entry.get("set", "Synthetic"),
    )


def load_manifest(path) -> DatasetManifest:
    path = Path(path)
    if not path.exists():
        raise MissingFile(str(path))
    try:
        doc = json.loads(path.read_text())
    except json.JSONDecodeError as exc:
        raise SchemaViolation("manifest", str(path), f"invalid JSON: {exc}")
    if not isinstance(doc, dict) or "faces" not in doc:
        raise SchemaViolation("manifest", str(path), "top-level object with 'faces' required")
    base = path.parent
    faces = tuple(_face_from_json(e, base, i) for i, e in enumerate(doc["faces"]))
    if not faces:
        raise SchemaViolation("faces", str(path), "manifest lists no faces")
    part_map = {
        k: tuple(int(i) for i in v)
        for k, v in doc.get("part_index_map", PART_INDEX_MAP).items()
    }
    subset = tuple(int(i) for i in doc.get("delaunay_subset", DELAUNAY_SUBSET))
    ref = doc.get("reference_face_id", faces[0].face_id)
    return DatasetManifest(
        faces=faces,
        reference_face_id=ref,
        part_index_map=part_map,
        delaunay_subset=subset,
    )


def save_manifest(manifest: DatasetManifest, path) -> None:
    """Write a manifest with landmarks inline; paths stored relative to it."""
    path = Path(path)
    base = path.parent
    doc = {
        "version": 1,
        "reference_face_id": manifest.reference_face_id,
        "part_index_map": {k: list(v) for k, v in manifest.part_index_map.items()},
        "delaunay_subset": list(manifest.delaunay_subset),
        "faces": [],
    }
    for f in manifest.faces:
        try:
            rel = f.image_path.relative_to(base)
        except ValueError:
            rel = f.image_path
        entry = {
            "face_id": f.face_id,
            "image": str(rel),
            "landmarks": [[float(x), float(y)] for x, y in f.landmarks.points],
            "labels": {
                "race": f.labels.race,
                "gender": f.labels.gender,
                "age": f.labels.age,
                "height": f.labels.height,
                "weight": f.labels.weight,
            },
            "set": f.set_tag,
        }
        doc["faces"].append(entry)
    path.write_text(json.dumps(doc, indent=1) + "\n")


def make_folds(manifest: DatasetManifest, labels: dict[str, str], k: int, seed: int) -> FoldAssignment:
    """Stratified k-fold partition of the labeled faces, deterministic by seed."""
    ids = [f.face_id for f in manifest.faces if f.face_id in labels]
    if not ids:
        raise TooFewFaces("no labeled faces")
    lab = [labels[i] for i in ids]
    folds = stratified_fold_indices(lab, k, seed)
    return FoldAssignment(
        fold_of_face={i: int(f) for i, f in zip(ids, folds)}, k=k, seed=seed
    )


def from_cnsifd_dir(root) -> DatasetManifest:
    """Build a manifest from an imported dataset directory.

    Expected layout: ``images/<face_id>.png``, ``landmarks/<face_id>.csv``
    (76 rows of "x,y"), and ``labels.csv`` with header
    ``face_id,race,gender,age,height,weight,set``.  Empty cells mean absent.
    """
    root = Path(root)
    labels_file = root / "labels.csv"
    if not labels_file.exists():
        raise MissingFile(
            f"{labels_file} (expected layout: images/*.png, landmarks/*.csv, labels.csv)"
        )
    faces = []
    with open(labels_file, newline="") as fh:
        for row in csv.DictReader(fh):
            fid = row["face_id"]
            img = root / "images" / f"{fid}.png"
            lmk = root / "landmarks" / f"{fid}.csv"
            if not img.exists():
                raise MissingFile(str(img))
            pts = _load_landmark_csv(lmk)

            def _num(key):
                v = row.get(key, "")
                return float(v) if v not in ("", None) else None

            faces.append(
                FaceRecord(
                    face_id=fid,
                    image_path=img,
                    landmarks=LandmarkSet(pts),
                    labels=AttributeLabels(
                        race=row.get("race", "Unknown") or "Unknown",
                        gender=row.get("gender", "Unknown") or "Unknown",
                        age=_num("age"),
                        height=_num("height"),
                        weight=_num("weight"),
                    ),
                    set_tag=row.get("set", "Set1") or "Set1",
                )
            )
    if not faces:
        raise SchemaViolation("labels.csv", str(labels_file), "no faces listed")
    return DatasetManifest(faces=tuple(faces), reference_face_id=faces[0].face_id)
