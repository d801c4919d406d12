"""Exhaustive landmark-subset features: all pairwise distances over the
26-landmark triangulation subset plus intensity statistics on its 43 patches.

Patch identity is fixed: the triangulation is computed once on the canonical
template and its triangles are applied to every face by landmark index, so a
given patch covers the same anatomical region on every face.
"""

from __future__ import annotations

from functools import lru_cache
from itertools import combinations

import numpy as np

from facekit.errors import EmptyPatch
from facekit.features.delaunay import delaunay
from facekit.features.measurements import patch_statistic
from facekit.features.vector import FeatureVector
from facekit.landmarks import CANONICAL_TEMPLATE, DELAUNAY_SUBSET, LandmarkSet
from facekit.raster import polygon_mask

STATS = ("mean", "min", "max")


@lru_cache(maxsize=8)
def subset_triangles(subset: tuple[int, ...] = DELAUNAY_SUBSET) -> tuple[tuple[int, int, int], ...]:
    """Triangles of the canonical template over ``subset``, as triples of
    positions within the subset list."""
    return delaunay(CANONICAL_TEMPLATE[list(subset)]).triangles


def pairwise_distances(points: np.ndarray) -> np.ndarray:
    """Euclidean distances for all index pairs i < j, in lexicographic order."""
    pts = np.asarray(points, dtype=float)
    n = pts.shape[0]
    iu, ju = np.triu_indices(n, k=1)
    return np.hypot(pts[iu, 0] - pts[ju, 0], pts[iu, 1] - pts[ju, 1])


def extract_siex(image: np.ndarray, landmarks: LandmarkSet,
                 subset: tuple[int, ...] = DELAUNAY_SUBSET) -> FeatureVector:
    """325 pairwise subset distances + 43 patches x 3 stats = 454 values.

    Distance block first (pairs in lexicographic subset order), then per
    patch mean, min, max in fixed triangle order.
    """
    subset = tuple(subset)
    pts = landmarks.points[list(subset)]
    dists = pairwise_distances(pts)

    img = np.asarray(image)
    tris = subset_triangles(subset)
    stats = np.empty(len(tris) * len(STATS))
    for t, (a, b, c) in enumerate(tris):
        mask = polygon_mask(img.shape, pts[[a, b, c]])
        px = img[mask]
        if px.size == 0:
            raise EmptyPatch(f"patch {t} (subset triple {a},{b},{c}) has zero pixels")
        for s, stat in enumerate(STATS):
            stats[t * len(STATS) + s] = patch_statistic(px, stat)

    names = tuple(
        f"d_{subset[i]}_{subset[j]}" for i, j in combinations(range(len(subset)), 2)
    ) + tuple(f"patch{t}_{stat}" for t in range(len(tris)) for stat in STATS)
    return FeatureVector("SIex", np.concatenate([dists, stats]), names)
