"""Histogram-of-oriented-gradients descriptor over the face patch tiling.

Gradients are central differences with replicated borders.  Orientations are
unsigned (folded into [0, pi)) and hard-assigned to 8 bins weighted by
gradient magnitude.  Each of the 83 patches is divided into a grid of cells
(default 2x2); the patch's cell histograms form one block, L2-normalized
together.  The default layout yields 83 x 4 x 8 = 2656 dimensions; the cell
grid is configurable and the resulting dimensionality follows from it.
"""

from __future__ import annotations

import numpy as np

from facekit.features.tiling import grid_bounds, patch_bounds
from facekit.features.vector import FeatureVector

N_ORIENTATIONS = 8
_EPS = 1e-12


def gradients(image: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Central-difference (gx, gy) with replicated borders."""
    img = np.asarray(image, dtype=float)
    p = np.pad(img, 1, mode="edge")
    gx = (p[1:-1, 2:] - p[1:-1, :-2]) / 2.0
    gy = (p[2:, 1:-1] - p[:-2, 1:-1]) / 2.0
    return gx, gy


def orientation_bins(gx: np.ndarray, gy: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """(bin index, magnitude) per pixel; unsigned orientation, 8 hard bins."""
    mag = np.hypot(gx, gy)
    theta = np.mod(np.arctan2(gy, gx), np.pi)
    bins = np.minimum((theta / np.pi * N_ORIENTATIONS).astype(int), N_ORIENTATIONS - 1)
    return bins, mag


def cell_histograms(image: np.ndarray, cells_per_side: int = 2) -> np.ndarray:
    """Unnormalized per-cell histograms, shape (83, cells^2, 8).

    Each cell's histogram mass equals the total gradient magnitude inside the
    cell (hard binning partitions the pixels).
    """
    img = np.asarray(image)
    bins, mag = orientation_bins(*gradients(img))
    patches = patch_bounds(*img.shape, min_side=cells_per_side)
    out = np.zeros((len(patches), cells_per_side**2, N_ORIENTATIONS))
    for p, (r0, r1, c0, c1) in enumerate(patches):
        cells = grid_bounds(r1 - r0, c1 - c0, cells_per_side)
        for ci, (cr0, cr1, cc0, cc1) in enumerate(cells):
            b = bins[r0 + cr0:r0 + cr1, c0 + cc0:c0 + cc1].ravel()
            m = mag[r0 + cr0:r0 + cr1, c0 + cc0:c0 + cc1].ravel()
            out[p, ci] = np.bincount(b, weights=m, minlength=N_ORIENTATIONS)
    return out


def extract_hog(image: np.ndarray, cells_per_side: int = 2) -> FeatureVector:
    """Block-normalized HOG over the 83 patches; one block per patch."""
    hists = cell_histograms(image, cells_per_side)
    blocks = hists.reshape(hists.shape[0], -1)
    norms = np.sqrt(np.sum(blocks**2, axis=1, keepdims=True) + _EPS**2)
    normed = blocks / norms  # zero blocks stay exactly zero
    names = tuple(
        f"p{p}_c{c}_o{o}"
        for p in range(hists.shape[0])
        for c in range(cells_per_side**2)
        for o in range(N_ORIENTATIONS)
    )
    return FeatureVector("HOG", normed.ravel(), names)
