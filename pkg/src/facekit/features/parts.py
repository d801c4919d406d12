"""Part-based shape features: within-part pairwise distances and
centroid-to-centroid configural distances.
"""

from __future__ import annotations

from itertools import combinations

import numpy as np

from facekit.errors import SchemaViolation
from facekit.features.exhaustive import pairwise_distances
from facekit.features.vector import FeatureVector
from facekit.landmarks import LEFT_CONTOUR, RIGHT_CONTOUR, LandmarkSet

PART_FAMILIES = ("E", "N", "M", "C")
_PART_SOURCES = {"N": ("nose",), "M": ("mouth",), "C": ("contour",)}

IP_REGIONS = (
    "left_eye", "right_eye", "nose", "mouth",
    "left_contour", "right_contour", "chin",
)


def _within_part_distances(landmarks: LandmarkSet, part: str) -> tuple[np.ndarray, tuple[str, ...]]:
    idx = landmarks.part_map[part]
    vals = pairwise_distances(landmarks.points[list(idx)])
    names = tuple(f"{part}_{idx[i]}_{idx[j]}" for i, j in combinations(range(len(idx)), 2))
    return vals, names


def extract_part(landmarks: LandmarkSet, family: str) -> FeatureVector:
    """All pairwise distances within one part's landmarks.

    E concatenates the two eyes' within-eye distances (36 + 36 = 72); N, M, C
    cover nose (66), mouth (153), and contour (105).
    """
    if family not in PART_FAMILIES:
        raise SchemaViolation("family", family, f"must be one of {PART_FAMILIES}")
    if family == "E":
        lv, ln = _within_part_distances(landmarks, "left_eye")
        rv, rn = _within_part_distances(landmarks, "right_eye")
        return FeatureVector("E", np.concatenate([lv, rv]), ln + rn)
    (part,) = _PART_SOURCES[family]
    vals, names = _within_part_distances(landmarks, part)
    return FeatureVector(family, vals, names)


def region_centroids(landmarks: LandmarkSet) -> np.ndarray:
    """Centroids of the 7 configural regions, in IP_REGIONS order."""
    pts = landmarks.points
    out = np.empty((len(IP_REGIONS), 2))
    for i, region in enumerate(IP_REGIONS):
        if region == "left_contour":
            out[i] = pts[list(LEFT_CONTOUR)].mean(axis=0)
        elif region == "right_contour":
            out[i] = pts[list(RIGHT_CONTOUR)].mean(axis=0)
        else:
            out[i] = landmarks.centroid(region)
    return out


def extract_interpart(landmarks: LandmarkSet) -> FeatureVector:
    """The 21 centroid-to-centroid distances between the 7 regions."""
    cents = region_centroids(landmarks)
    vals = pairwise_distances(cents)
    names = tuple(
        f"{IP_REGIONS[i]}__{IP_REGIONS[j]}"
        for i, j in combinations(range(len(IP_REGIONS)), 2)
    )
    return FeatureVector("IP", vals, names)


def extract_enmc(landmarks: LandmarkSet) -> FeatureVector:
    """E, N, M, C concatenated in that order (72 + 66 + 153 + 105 = 396)."""
    parts = [extract_part(landmarks, f) for f in PART_FAMILIES]
    return FeatureVector(
        "ENMC",
        np.concatenate([p.values for p in parts]),
        tuple(n for p in parts for n in p.names),
    )
