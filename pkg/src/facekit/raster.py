"""Polygon rasterization helpers.

Masks are boolean arrays over pixel centers: pixel (r, c) has center
(x, y) = (c, r).  Inclusion uses the even-odd (crossing number) rule with a
half-open convention on edges so adjacent polygons tile without overlap.
"""

from __future__ import annotations

import numpy as np

from facekit.landmarks import convex_hull_indices


def polygon_mask(shape: tuple[int, int], polygon: np.ndarray) -> np.ndarray:
    """Boolean mask of pixels whose centers lie inside ``polygon``.

    ``polygon`` is (k, 2) in (x, y) order, vertices in either winding,
    not necessarily closed.  Degenerate (zero-area) polygons give an empty
    mask rather than raising.
    """
    h, w = shape
    poly = np.asarray(polygon, dtype=float)
    if poly.ndim != 2 or poly.shape[1] != 2 or poly.shape[0] < 3:
        return np.zeros((h, w), dtype=bool)

    r0 = max(0, int(np.floor(poly[:, 1].min())))
    r1 = min(h - 1, int(np.ceil(poly[:, 1].max())))
    c0 = max(0, int(np.floor(poly[:, 0].min())))
    c1 = min(w - 1, int(np.ceil(poly[:, 0].max())))
    mask = np.zeros((h, w), dtype=bool)
    if r1 < r0 or c1 < c0:
        return mask

    ys = np.arange(r0, r1 + 1, dtype=float)[:, None]
    xs = np.arange(c0, c1 + 1, dtype=float)[None, :]
    inside = np.zeros((r1 - r0 + 1, c1 - c0 + 1), dtype=bool)
    k = poly.shape[0]
    for i in range(k):
        x1, y1 = poly[i]
        x2, y2 = poly[(i + 1) % k]
        if y1 == y2:
            continue
        crosses = (y1 > ys) != (y2 > ys)
        with np.errstate(invalid="ignore"):
            xint = x1 + (ys - y1) * (x2 - x1) / (y2 - y1)
        inside ^= crosses & (xs < xint)
    mask[r0:r1 + 1, c0:c1 + 1] = inside
    return mask


def hull_mask(shape: tuple[int, int], points: np.ndarray) -> np.ndarray:
    """Mask of the convex hull of ``points`` ((n, 2), (x, y) order)."""
    pts = np.asarray(points, dtype=float)
    idx = convex_hull_indices(pts)
    return polygon_mask(shape, pts[list(idx)])
