"""Single entry point mapping a family name to its extractor."""

from __future__ import annotations

import numpy as np

from facekit.errors import SchemaViolation
from facekit.features.exhaustive import extract_siex
from facekit.features.hog import extract_hog
from facekit.features.lbp import extract_lbp
from facekit.features.measurements import (
    MeasurementSpec,
    extract_intensity,
    extract_si,
    extract_spatial,
)
from facekit.features.moments import extract_moments
from facekit.features.parts import extract_enmc, extract_interpart, extract_part
from facekit.features.vector import FeatureVector
from facekit.landmarks import DELAUNAY_SUBSET, LandmarkSet

EXTRACTABLE = ("S", "I", "SI", "SIex", "Mom", "LBP", "HOG", "E", "N", "M", "C", "IP", "ENMC")


def extract_family(family: str, image: np.ndarray, landmarks: LandmarkSet,
                   spec: MeasurementSpec | None = None,
                   subset: tuple[int, ...] = DELAUNAY_SUBSET,
                   hog_cells: int = 2) -> FeatureVector:
    """Extract one feature family from a normalized face.

    CNN families are ingested from files, not extracted; asking for one here
    is an error.
    """
    if family == "S":
        return extract_spatial(landmarks, spec)
    if family == "I":
        return extract_intensity(image, landmarks, spec)
    if family == "SI":
        return extract_si(image, landmarks, spec)
    if family == "SIex":
        return extract_siex(image, landmarks, subset)
    if family == "Mom":
        return extract_moments(image, landmarks)
    if family == "LBP":
        return extract_lbp(image)
    if family == "HOG":
        return extract_hog(image, hog_cells)
    if family in ("E", "N", "M", "C"):
        return extract_part(landmarks, family)
    if family == "IP":
        return extract_interpart(landmarks)
    if family == "ENMC":
        return extract_enmc(landmarks)
    raise SchemaViolation("family", family, f"not extractable; choose from {EXTRACTABLE}")
