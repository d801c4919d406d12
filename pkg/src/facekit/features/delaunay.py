"""Incremental Delaunay triangulation with adaptive-precision predicates.

Bowyer-Watson insertion over a large enclosing triangle.  Predicates are
evaluated in float64 and re-evaluated with exact rational arithmetic when the
determinant falls inside a guard band, so near-cocircular configurations are
resolved deterministically instead of by rounding luck.  Points exactly on a
circumcircle count as outside (the cavity is not grown), which breaks exact
ties by insertion order; points are inserted in lexicographic order.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

import numpy as np

from facekit.errors import DegenerateInput
from facekit.landmarks import CANONICAL_TEMPLATE, DELAUNAY_SUBSET, convex_hull_indices

_GUARD = 1e-12  # float64 guard band on normalized (unit-scale) coordinates


def _orient2d(ax, ay, bx, by, cx, cy) -> float:
    """Twice the signed area of triangle abc; exact sign near zero."""
    det = (ax - cx) * (by - cy) - (ay - cy) * (bx - cx)
    if abs(det) > _GUARD:
        return det
    fa = [Fraction(v) for v in (ax, ay, bx, by, cx, cy)]
    exact = (fa[0] - fa[4]) * (fa[3] - fa[5]) - (fa[1] - fa[5]) * (fa[2] - fa[4])
    return float(np.sign(exact))


def _incircle(ax, ay, bx, by, cx, cy, dx, dy) -> float:
    """Positive iff d lies strictly inside the circumcircle of ccw abc."""
    adx, ady = ax - dx, ay - dy
    bdx, bdy = bx - dx, by - dy
    cdx, cdy = cx - dx, cy - dy
    det = (
        (adx * adx + ady * ady) * (bdx * cdy - cdx * bdy)
        + (bdx * bdx + bdy * bdy) * (cdx * ady - adx * cdy)
        + (cdx * cdx + cdy * cdy) * (adx * bdy - bdx * ady)
    )
    if abs(det) > _GUARD:
        return det
    fr = [Fraction(v) for v in (ax, ay, bx, by, cx, cy, dx, dy)]
    fadx, fady = fr[0] - fr[6], fr[1] - fr[7]
    fbdx, fbdy = fr[2] - fr[6], fr[3] - fr[7]
    fcdx, fcdy = fr[4] - fr[6], fr[5] - fr[7]
    exact = (
        (fadx * fadx + fady * fady) * (fbdx * fcdy - fcdx * fbdy)
        + (fbdx * fbdx + fbdy * fbdy) * (fcdx * fady - fadx * fcdy)
        + (fcdx * fcdx + fcdy * fcdy) * (fadx * fbdy - fbdx * fady)
    )
    return float(np.sign(exact))


@dataclass(frozen=True)
class Triangulation:
    """Triangulation of a 2-d point set.

    ``triangles`` holds sorted index triples in lexicographic order, so two
    triangulations of the same point set compare equal structurally.  The
    triangles double as the face patches used for exhaustive intensity
    sampling.
    """

    vertices: np.ndarray
    triangles: tuple[tuple[int, int, int], ...]
    hull: tuple[int, ...]

    @property
    def n_patches(self) -> int:
        return len(self.triangles)


def delaunay(points: np.ndarray) -> Triangulation:
    """Delaunay-triangulate ``points`` ((n, 2), n >= 3).

    Raises DegenerateInput for coincident points or a fully collinear set.
    For points in general position the result satisfies the empty-circumcircle
    property and has 2n - 2 - h triangles, h the number of hull vertices.
    """
    pts = np.asarray(points, dtype=float)
    if pts.ndim != 2 or pts.shape[1] != 2 or pts.shape[0] < 3:
        raise DegenerateInput(f"need at least 3 points of dimension 2, got shape {pts.shape}")
    if not np.all(np.isfinite(pts)):
        raise DegenerateInput("non-finite coordinates")
    n = pts.shape[0]

    # normalize to unit scale so the predicate guard band is meaningful
    lo = pts.min(axis=0)
    span = float(np.max(pts.max(axis=0) - lo))
    if span <= 0.0:
        raise DegenerateInput("all points coincident")
    norm = (pts - lo) / span

    diffs = norm[:, None, :] - norm[None, :, :]
    dist2 = np.einsum("ijk,ijk->ij", diffs, diffs)
    np.fill_diagonal(dist2, np.inf)
    if np.min(dist2) < 1e-18:
        i, j = np.unravel_index(int(np.argmin(dist2)), dist2.shape)
        raise DegenerateInput(f"points {i} and {j} coincide")

    order = sorted(range(n), key=lambda i: (norm[i, 0], norm[i, 1]))
    p0, p1 = norm[order[0]], norm[order[-1]]
    cross = (norm[:, 0] - p0[0]) * (p1[1] - p0[1]) - (norm[:, 1] - p0[1]) * (p1[0] - p0[0])
    if np.max(np.abs(cross)) < 1e-12:
        raise DegenerateInput("all points collinear")

    # enclosing triangle, far enough out that no empty circumcircle of the
    # final triangulation can reach its vertices at desk scales
    big = 1e4
    verts = np.vstack([norm, np.array([[-big, -big], [big, -big], [0.0, big]])])
    sa, sb, sc = n, n + 1, n + 2
    triangles: set[tuple[int, int, int]] = {(sa, sb, sc)}

    def ccw(t):
        a, b, c = t
        if _orient2d(*verts[a], *verts[b], *verts[c]) < 0:
            return (a, c, b)
        return (a, b, c)

    for i in order:
        px, py = verts[i]
        bad = []
        for t in triangles:
            a, b, c = ccw(t)
            if _incircle(*verts[a], *verts[b], *verts[c], px, py) > 0:
                bad.append(t)
        if not bad:
            raise DegenerateInput("insertion fell outside the enclosing triangle")
        edge_count: Counter[tuple[int, int]] = Counter()
        for t in bad:
            for e in ((t[0], t[1]), (t[1], t[2]), (t[0], t[2])):
                edge_count[tuple(sorted(e))] += 1
        triangles.difference_update(bad)
        for (u, v), cnt in edge_count.items():
            if cnt == 1:
                triangles.add(tuple(sorted((u, v, i))))

    final = sorted(t for t in triangles if max(t) < n)
    if not final:
        raise DegenerateInput("all points collinear")
    hull = tuple(convex_hull_indices(pts))
    return Triangulation(vertices=pts, triangles=tuple(final), hull=hull)


@lru_cache(maxsize=1)
def template_triangulation() -> Triangulation:
    """Triangulation of the canonical template's 26-landmark subset.

    Computed once; its 43 triangles define the face patches used for
    exhaustive intensity sampling, applied to every face by landmark index so
    each patch covers the same anatomical region across faces.
    """
    return delaunay(CANONICAL_TEMPLATE[list(DELAUNAY_SUBSET)])


def template_patches() -> tuple[tuple[int, int, int], ...]:
    """Patch triangles as triples of indices into the 26-landmark subset."""
    return template_triangulation().triangles
