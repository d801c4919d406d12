"""Global intensity-distribution moments of the face region."""

from __future__ import annotations

import warnings

import numpy as np

from facekit.errors import EmptyImage
from facekit.features.vector import FeatureVector
from facekit.landmarks import LandmarkSet
from facekit.raster import hull_mask

MOMENT_NAMES = ("mean", "sd", "skewness", "kurtosis", "m5", "m6")


def extract_moments(image: np.ndarray, landmarks: LandmarkSet | None = None) -> FeatureVector:
    """First six moments of the pixel intensity distribution.

    Values: mean, standard deviation, then standardized central moments of
    order 3-6 (so a Gaussian gives skewness 0, kurtosis 3, m5 0, m6 15).
    Restricted to the landmark hull when landmarks are given.  A constant
    region has undefined standardized moments; they are emitted as 0 with a
    warning.
    """
    img = np.asarray(image, dtype=float)
    if img.size == 0:
        raise EmptyImage("empty image")
    if landmarks is not None:
        mask = hull_mask(img.shape, landmarks.points)
        px = img[mask]
        if px.size == 0:
            raise EmptyImage("landmark hull contains no pixels")
    else:
        px = img.ravel()
    mean = float(px.mean())
    sd = float(px.std())
    if sd == 0.0:
        warnings.warn("constant intensity region: standardized moments set to 0")
        vals = [mean, 0.0, 0.0, 0.0, 0.0, 0.0]
    else:
        z = (px - mean) / sd
        vals = [mean, sd] + [float(np.mean(z**k)) for k in (3, 4, 5, 6)]
    return FeatureVector("Mom", np.array(vals), MOMENT_NAMES)
