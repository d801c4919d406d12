"""Local binary pattern texture descriptor.

The 4-neighbor variant: each pixel compares its north, east, south, and west
neighbors against itself (>= counts as set, so ties set the bit), giving a
4-bit code with N as the most significant bit, then E, S, W.  16 possible
codes; image borders replicate.  Codes are computed once over the whole image
and histogrammed per patch over the 83-patch tiling, each histogram
normalized to sum 1, for 83 x 16 = 1328 dimensions.
"""

from __future__ import annotations

import numpy as np

from facekit.features.tiling import patch_bounds
from facekit.features.vector import FeatureVector

N_CODES = 16


def lbp_codes(image: np.ndarray) -> np.ndarray:
    """Per-pixel 4-neighbor codes, same shape as the input, values 0-15."""
    img = np.asarray(image, dtype=float)
    p = np.pad(img, 1, mode="edge")
    north = p[:-2, 1:-1]
    south = p[2:, 1:-1]
    west = p[1:-1, :-2]
    east = p[1:-1, 2:]
    return (
        (north >= img).astype(np.uint8) * 8
        + (east >= img).astype(np.uint8) * 4
        + (south >= img).astype(np.uint8) * 2
        + (west >= img).astype(np.uint8)
    )


def extract_lbp(image: np.ndarray) -> FeatureVector:
    """83 patch-wise normalized 16-bin code histograms, concatenated."""
    img = np.asarray(image)
    codes = lbp_codes(img)
    bounds = patch_bounds(*img.shape, min_side=3)
    vals = np.empty(len(bounds) * N_CODES)
    for p, (r0, r1, c0, c1) in enumerate(bounds):
        hist = np.bincount(codes[r0:r1, c0:c1].ravel(), minlength=N_CODES).astype(float)
        vals[p * N_CODES:(p + 1) * N_CODES] = hist / hist.sum()
    names = tuple(
        f"p{p}_code{c}" for p in range(len(bounds)) for c in range(N_CODES)
    )
    return FeatureVector("LBP", vals, names)
