"""Named spatial and intensity measurements.

The measurement set is configuration, not code: 23 spatial definitions (each
a distance between two landmark centroids) and 31 intensity definitions (a
polygonal patch plus one statistic), shipped with anthropometric defaults
against the canonical part map.  The counts are fixed by contract.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

from facekit.errors import EmptyPatch, SchemaViolation
from facekit.landmarks import N_LANDMARKS, LandmarkSet
from facekit.raster import hull_mask, polygon_mask
from facekit.features.vector import FeatureVector

N_SPATIAL = 23
N_INTENSITY = 31
STATS = ("mean", "min", "max")


@dataclass(frozen=True)
class SpatialDef:
    """Distance between the centroids of two landmark index groups."""

    name: str
    a: tuple[int, ...]
    b: tuple[int, ...]


@dataclass(frozen=True)
class IntensityDef:
    """One statistic of the pixels inside a landmark polygon.

    An empty ``polygon`` means the convex hull of all 76 landmarks.
    """

    name: str
    polygon: tuple[int, ...]
    stat: str


@dataclass(frozen=True)
class MeasurementSpec:
    spatial_defs: tuple[SpatialDef, ...]
    intensity_defs: tuple[IntensityDef, ...]

    def __post_init__(self):
        if len(self.spatial_defs) != N_SPATIAL:
            raise SchemaViolation(
                "spatial_defs", "spec", f"need exactly {N_SPATIAL}, got {len(self.spatial_defs)}"
            )
        if len(self.intensity_defs) != N_INTENSITY:
            raise SchemaViolation(
                "intensity_defs", "spec", f"need exactly {N_INTENSITY}, got {len(self.intensity_defs)}"
            )
        for d in self.spatial_defs:
            for grp in (d.a, d.b):
                if not grp or any(not (0 <= i < N_LANDMARKS) for i in grp):
                    raise SchemaViolation("spatial_defs", d.name, "landmark index out of range")
        for d in self.intensity_defs:
            if d.stat not in STATS:
                raise SchemaViolation("intensity_defs", d.name, f"stat must be one of {STATS}")
            if any(not (0 <= i < N_LANDMARKS) for i in d.polygon):
                raise SchemaViolation("intensity_defs", d.name, "landmark index out of range")
            if d.polygon and len(d.polygon) < 3:
                raise SchemaViolation("intensity_defs", d.name, "polygon needs >= 3 vertices")


def _sd(name, a, b):
    a = (a,) if isinstance(a, int) else tuple(a)
    b = (b,) if isinstance(b, int) else tuple(b)
    return SpatialDef(name, a, b)


_SPATIAL_DEFAULTS = (
    _sd("inter_pupil", 8, 17),
    _sd("inter_eye_inner", 0, 9),
    _sd("inter_eye_outer", 4, 13),
    _sd("left_eye_width", 0, 4),
    _sd("right_eye_width", 9, 13),
    _sd("left_eye_height", 2, 6),
    _sd("right_eye_height", 11, 15),
    _sd("nose_length", 18, 27),
    _sd("nose_width", 23, 24),
    _sd("nose_tip_to_base", 28, 27),
    _sd("mouth_width", 30, 36),
    _sd("mouth_height", 33, 39),
    _sd("upper_lip_thickness", 33, (43, 44)),
    _sd("lower_lip_thickness", 39, (46, 47)),
    _sd("philtrum_length", 27, 33),
    _sd("chin_to_mouth", 39, 55),
    _sd("face_width_upper", 50, 60),
    _sd("face_width_lower", 52, 58),
    _sd("face_height", (65, 70), 55),
    _sd("left_brow_to_eye", 65, 8),
    _sd("right_brow_to_eye", 70, 17),
    _sd("inter_brow", 67, 68),
    _sd("eye_to_mouth", (8, 17), 33),
)

_PATCH_POLYGONS = (
    ("glabella", (67, 18, 68)),
    ("left_cheek", (49, 51, 23, 2)),
    ("right_cheek", (61, 59, 24, 11)),
    ("nose_bridge", (19, 20, 22, 21)),
    ("nose_tip", (23, 27, 24)),
    ("mouth_region", (30, 33, 36, 39)),
    ("chin_band", (54, 73, 75, 56)),
    ("left_eye_region", (4, 6, 0, 2)),
    ("right_eye_region", (13, 15, 9, 11)),
)

_INTENSITY_DEFAULTS = tuple(
    IntensityDef(f"{name}_{stat}", poly, stat)
    for name, poly in _PATCH_POLYGONS
    for stat in STATS
) + (
    IntensityDef("philtrum_patch_mean", (25, 26, 44, 43), "mean"),
    IntensityDef("left_temple_mean", (48, 63, 4), "mean"),
    IntensityDef("right_temple_mean", (62, 72, 13), "mean"),
    IntensityDef("face_hull_mean", (), "mean"),
)


def default_measurement_spec() -> MeasurementSpec:
    return MeasurementSpec(_SPATIAL_DEFAULTS, _INTENSITY_DEFAULTS)


def spec_to_json(spec: MeasurementSpec) -> str:
    return json.dumps(
        {
            "spatial": [
                {"name": d.name, "a": list(d.a), "b": list(d.b)} for d in spec.spatial_defs
            ],
            "intensity": [
                {"name": d.name, "polygon": list(d.polygon), "stat": d.stat}
                for d in spec.intensity_defs
            ],
        },
        indent=1,
    )


def spec_from_json(text: str) -> MeasurementSpec:
    doc = json.loads(text)
    return MeasurementSpec(
        tuple(
            SpatialDef(d["name"], tuple(d["a"]), tuple(d["b"])) for d in doc["spatial"]
        ),
        tuple(
            IntensityDef(d["name"], tuple(d["polygon"]), d["stat"])
            for d in doc["intensity"]
        ),
    )


def extract_spatial(landmarks: LandmarkSet, spec: MeasurementSpec | None = None) -> FeatureVector:
    """The 23 named centroid-to-centroid distances, in spec order, pixels."""
    spec = spec or default_measurement_spec()
    pts = landmarks.points
    vals = np.empty(N_SPATIAL)
    for i, d in enumerate(spec.spatial_defs):
        ca = pts[list(d.a)].mean(axis=0)
        cb = pts[list(d.b)].mean(axis=0)
        vals[i] = float(np.hypot(*(ca - cb)))
    return FeatureVector("S", vals, tuple(d.name for d in spec.spatial_defs))


def patch_statistic(pixels: np.ndarray, stat: str) -> float:
    if stat == "mean":
        return float(pixels.mean())
    if stat == "min":
        return float(pixels.min())
    return float(pixels.max())


def extract_intensity(image: np.ndarray, landmarks: LandmarkSet,
                      spec: MeasurementSpec | None = None) -> FeatureVector:
    """The 31 named patch statistics; values inherit the image's 0-255 range."""
    spec = spec or default_measurement_spec()
    img = np.asarray(image)
    vals = np.empty(N_INTENSITY)
    for i, d in enumerate(spec.intensity_defs):
        if d.polygon:
            mask = polygon_mask(img.shape, landmarks.points[list(d.polygon)])
        else:
            mask = hull_mask(img.shape, landmarks.points)
        px = img[mask]
        if px.size == 0:
            raise EmptyPatch(f"{d.name}: polygon rasterized to zero pixels")
        vals[i] = patch_statistic(px, d.stat)
    return FeatureVector("I", vals, tuple(d.name for d in spec.intensity_defs))


def extract_si(image: np.ndarray, landmarks: LandmarkSet,
               spec: MeasurementSpec | None = None) -> FeatureVector:
    """Spatial then intensity measurements concatenated (23 + 31 = 54)."""
    spec = spec or default_measurement_spec()
    s = extract_spatial(landmarks, spec)
    i = extract_intensity(image, landmarks, spec)
    return FeatureVector("SI", np.concatenate([s.values, i.values]), s.names + i.names)
