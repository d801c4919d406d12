"""Geometric and intensity normalization of face images.

Every face is mapped into a canonical frame: inter-eye axis horizontal, one
isotropic scale chosen so the chin-to-eyebrow vertical span is 250 px, and the
eye midpoint moved to a fixed canvas position.  Intensity is then matched to a
reference face by monotone histogram specification computed over the face
hull, with the background filled black.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from facekit.errors import DegenerateLandmarks, EmptyImage
from facekit.landmarks import (
    CANVAS_SIZE,
    CANONICAL_EYE_MIDPOINT,
    CHIN_BROW_SPAN,
    INNER_BROWS,
    LandmarkSet,
)
from facekit.raster import hull_mask


@dataclass(frozen=True)
class SimilarityTransform:
    """p' = scale * R(rotation) @ p + translation, coordinates in (x, y)."""

    rotation: float
    scale: float
    translation: tuple[float, float]

    def __post_init__(self):
        if not (self.scale > 0):
            raise ValueError(f"scale must be positive, got {self.scale}")

    @property
    def matrix(self) -> np.ndarray:
        c, s = math.cos(self.rotation), math.sin(self.rotation)
        return self.scale * np.array([[c, -s], [s, c]])

    def apply(self, points: np.ndarray) -> np.ndarray:
        pts = np.asarray(points, dtype=float)
        return pts @ self.matrix.T + np.asarray(self.translation)

    def inverse(self) -> "SimilarityTransform":
        inv_scale = 1.0 / self.scale
        c, s = math.cos(-self.rotation), math.sin(-self.rotation)
        m = inv_scale * np.array([[c, -s], [s, c]])
        t = -m @ np.asarray(self.translation)
        return SimilarityTransform(-self.rotation, inv_scale, (float(t[0]), float(t[1])))

    @staticmethod
    def identity() -> "SimilarityTransform":
        return SimilarityTransform(0.0, 1.0, (0.0, 0.0))


@dataclass(frozen=True)
class NormalizedFace:
    image: np.ndarray  # uint8, CANVAS_SIZE
    landmarks: LandmarkSet
    transform: SimilarityTransform


def bilinear_sample(image: np.ndarray, x: np.ndarray, y: np.ndarray) -> np.ndarray:
    """Sample ``image`` at float coordinates with edge clamping."""
    img = np.asarray(image, dtype=float)
    h, w = img.shape
    x = np.clip(x, 0.0, w - 1.0)
    y = np.clip(y, 0.0, h - 1.0)
    x0 = np.floor(x).astype(int)
    y0 = np.floor(y).astype(int)
    x1 = np.minimum(x0 + 1, w - 1)
    y1 = np.minimum(y0 + 1, h - 1)
    fx = x - x0
    fy = y - y0
    top = img[y0, x0] * (1 - fx) + img[y0, x1] * fx
    bot = img[y1, x0] * (1 - fx) + img[y1, x1] * fx
    return top * (1 - fy) + bot * fy


def warp_image(image: np.ndarray, transform: SimilarityTransform,
               out_shape: tuple[int, int] = CANVAS_SIZE) -> np.ndarray:
    """Resample ``image`` under ``transform`` into a canvas of ``out_shape``."""
    h, w = out_shape
    inv = transform.inverse()
    xs, ys = np.meshgrid(np.arange(w, dtype=float), np.arange(h, dtype=float))
    src = inv.apply(np.stack([xs.ravel(), ys.ravel()], axis=1))
    vals = bilinear_sample(image, src[:, 0].reshape(h, w), src[:, 1].reshape(h, w))
    return np.clip(np.rint(vals), 0, 255).astype(np.uint8)


def _solve_transform(landmarks: LandmarkSet) -> SimilarityTransform:
    left = landmarks.centroid("left_eye")
    right = landmarks.centroid("right_eye")
    axis = right - left
    if np.hypot(*axis) < 1e-9:
        raise DegenerateLandmarks("eye centroids coincide")
    rotation = -math.atan2(axis[1], axis[0])
    c, s = math.cos(rotation), math.sin(rotation)
    rot = np.array([[c, -s], [s, c]])
    pts = landmarks.points @ rot.T

    contour = pts[list(landmarks.part_map["contour"])]
    chin_y = float(np.max(contour[:, 1]))
    brow_y = float(np.mean(pts[list(INNER_BROWS), 1]))
    span = chin_y - brow_y
    if span <= 1e-9:
        raise DegenerateLandmarks(f"chin-eyebrow span {span:.3g} px")
    scale = CHIN_BROW_SPAN / span

    midpoint = scale * rot @ ((left + right) / 2.0)
    target = np.array(CANONICAL_EYE_MIDPOINT)
    t = target - midpoint
    return SimilarityTransform(rotation, scale, (float(t[0]), float(t[1])))


def normalize_geometry(image: np.ndarray, landmarks: LandmarkSet) -> NormalizedFace:
    """Map a face into the canonical frame.

    The inter-eye axis becomes horizontal, one isotropic scale factor sets the
    chin-to-eyebrow vertical span to 250 px, and the eye midpoint lands on the
    canonical canvas position.  The image is resampled bilinearly with edge
    clamping; landmarks carry the same transform.
    """
    if image is None or np.asarray(image).size == 0:
        raise EmptyImage("empty input image")
    transform = _solve_transform(landmarks)
    warped = warp_image(np.asarray(image), transform)
    moved = landmarks.transformed(transform.apply)
    return NormalizedFace(image=warped, landmarks=moved, transform=transform)


def _mid_cdf(hist: np.ndarray) -> np.ndarray:
    """Midpoint cumulative distribution: position of each level's mass center."""
    total = hist.sum()
    cum = np.cumsum(hist)
    return (cum - 0.5 * hist) / total


def histogram_specification_lut(image: np.ndarray, reference: np.ndarray,
                                mask: np.ndarray | None = None,
                                reference_mask: np.ndarray | None = None) -> np.ndarray:
    """256-entry lookup table matching ``image``'s histogram to ``reference``'s.

    Each input level's midpoint-CDF position is matched to the reference level
    whose own midpoint-CDF position is nearest, ties to the lower level.  The
    mapping is monotone non-decreasing, and a level maps to itself when the
    reference equals the input, so re-application is idempotent.
    """
    img = np.asarray(image)
    ref = np.asarray(reference)
    img_vals = img[mask] if mask is not None else img.ravel()
    ref_vals = ref[reference_mask] if reference_mask is not None else ref.ravel()
    if img_vals.size == 0 or ref_vals.size == 0:
        raise EmptyImage("histogram specification over zero pixels")
    h_in = np.bincount(img_vals.astype(np.uint8).ravel(), minlength=256).astype(float)
    h_ref = np.bincount(ref_vals.astype(np.uint8).ravel(), minlength=256).astype(float)
    u_in = _mid_cdf(h_in)
    u_ref = _mid_cdf(h_ref)
    present = np.flatnonzero(h_ref > 0)
    # nearest present reference level by midpoint position; ties to lower level
    pos = u_ref[present]
    lut = np.empty(256, dtype=np.uint8)
    idx = np.searchsorted(pos, u_in)
    for g in range(256):
        i = idx[g]
        if i == 0:
            lut[g] = present[0]
        elif i >= present.size:
            lut[g] = present[-1]
        else:
            lo, hi = present[i - 1], present[i]
            lut[g] = lo if u_in[g] - pos[i - 1] <= pos[i] - u_in[g] else hi
    return lut


def equalize_to_reference(image: np.ndarray, reference: np.ndarray,
                          mask: np.ndarray | None = None,
                          reference_mask: np.ndarray | None = None) -> np.ndarray:
    """Match ``image``'s intensity distribution to ``reference``'s.

    Statistics come from the masked regions when masks are given; the mapping
    is applied to the whole image.  Output shape equals input shape.
    """
    img = np.asarray(image)
    if img.size == 0 or np.asarray(reference).size == 0:
        raise EmptyImage("empty image")
    lut = histogram_specification_lut(image, reference, mask, reference_mask)
    return lut[img.astype(np.uint8)]


def equalize_face(face: NormalizedFace, reference: NormalizedFace) -> NormalizedFace:
    """Hull-restricted histogram match of ``face`` to ``reference``.

    Matching statistics are computed inside each face's landmark hull so the
    black background does not dominate the distributions; outside the hull the
    output is filled black.
    """
    m = hull_mask(face.image.shape, face.landmarks.points)
    rm = hull_mask(reference.image.shape, reference.landmarks.points)
    out = equalize_to_reference(face.image, reference.image, m, rm)
    out[~m] = 0
    return NormalizedFace(image=out, landmarks=face.landmarks, transform=face.transform)
