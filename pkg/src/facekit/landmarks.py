"""76-point landmark model: part index map, canonical template, Delaunay subset.

The landmark semantics are shipped configuration, not something a fitter
dictates: any fitter that produces 76 points in this index order works.
Index layout:

    0-8    left eye    (8 outline points + center)
    9-17   right eye   (8 outline points + center)
    18-29  nose        (root, sides, alae, nostrils, base, tip, columella)
    30-47  mouth       (12 outer lip + 6 inner lip)
    48-62  face contour (left temple -> chin tip (55) -> right temple)
    63-67  left eyebrow  (outer -> inner)
    68-72  right eyebrow (inner -> outer)
    73-75  chin region

"Left"/"right" are in image coordinates (left = smaller x), with x growing
rightwards and y growing downwards.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence

import numpy as np

from facekit.errors import SchemaViolation

N_LANDMARKS = 76

PART_INDEX_MAP: dict[str, tuple[int, ...]] = {
    "left_eye": tuple(range(0, 9)),
    "right_eye": tuple(range(9, 18)),
    "nose": tuple(range(18, 30)),
    "mouth": tuple(range(30, 48)),
    "contour": tuple(range(48, 63)),
    "left_brow": tuple(range(63, 68)),
    "right_brow": tuple(range(68, 73)),
    "chin": tuple(range(73, 76)),
}

# Contour split used for configural (inter-part) distances; the chin tip
# (index 55) is deliberately in neither half.
LEFT_CONTOUR = tuple(range(48, 55))
RIGHT_CONTOUR = tuple(range(56, 63))

# Inner eyebrow landmarks define the "eyebrow" vertical reference for
# geometric normalization; the chin reference is the lowest contour point.
INNER_BROWS = (67, 68)

# The 26 landmarks fed to Delaunay triangulation.  Chosen so that on the
# canonical template the convex hull has exactly 7 vertices, which makes the
# triangulation contain 2*26 - 2 - 7 = 43 triangles (the face patches).
DELAUNAY_SUBSET: tuple[int, ...] = (
    0, 4, 8, 9, 13, 17, 18, 19, 23, 24, 27, 28,
    30, 33, 36, 39, 48, 52, 55, 58, 62, 65, 67, 68, 70, 74,
)

# Canonical frame: canvas 320 x 400, eye midpoint pinned here, chin-to-brow
# vertical span normalized to this many pixels.
CANVAS_SIZE = (400, 320)  # (height, width)
CANONICAL_EYE_MIDPOINT = (160.0, 135.0)
CHIN_BROW_SPAN = 250.0


def _ellipse(cx: float, cy: float, a: float, b: float, degrees: Sequence[float]) -> list[tuple[float, float]]:
    rad = np.deg2rad(np.asarray(degrees, dtype=float))
    return [(cx + a * float(np.cos(t)), cy + b * float(np.sin(t))) for t in rad]


def _build_template() -> np.ndarray:
    pts: list[tuple[float, float]] = []
    # left eye: outline clockwise from the inner corner, then center
    pts += _ellipse(115.0, 135.0, 22.0, 10.0, [0, 45, 90, 135, 180, 225, 270, 315])
    pts.append((115.0, 135.0))
    # right eye: mirror of the left about x = 160
    pts += [(320.0 - x, y) for x, y in pts[:9]]
    # nose
    pts += [
        (160.0, 152.0),               # 18 root
        (153.0, 168.0), (167.0, 168.0),   # 19, 20 upper sides
        (150.0, 186.0), (170.0, 186.0),   # 21, 22 mid sides
        (144.0, 205.0), (176.0, 205.0),   # 23, 24 alae
        (152.0, 215.0), (168.0, 215.0),   # 25, 26 nostril rims
        (160.0, 219.0),               # 27 base
        (160.0, 201.0),               # 28 tip
        (160.0, 210.0),               # 29 columella
    ]
    # mouth: 12 outer lip points starting at the left corner, then 6 inner
    pts += _ellipse(160.0, 268.0, 32.0, 13.0, [180, 210, 240, 270, 300, 330, 0, 30, 60, 90, 120, 150])
    pts += _ellipse(160.0, 268.0, 20.0, 5.0, [180, 240, 300, 0, 60, 120])
    # face contour, left temple to right temple through the chin tip (55)
    pts += [
        (55.0, 135.0), (58.0, 175.0), (66.0, 215.0), (80.0, 255.0),
        (98.0, 292.0), (118.0, 320.0), (140.0, 338.0),
        (160.0, 345.0),
        (180.0, 338.0), (202.0, 320.0), (222.0, 292.0),
        (240.0, 255.0), (254.0, 215.0), (262.0, 175.0), (265.0, 135.0),
    ]
    # eyebrows; inner points (67, 68) sit at y = 95 so the template's
    # chin-to-brow span is exactly 250
    pts += [(88.0, 90.0), (100.0, 87.0), (114.0, 85.0), (128.0, 89.0), (142.0, 95.0)]
    pts += [(178.0, 95.0), (192.0, 89.0), (206.0, 85.0), (220.0, 87.0), (232.0, 90.0)]
    # chin region
    pts += [(145.0, 331.0), (160.0, 337.0), (175.0, 331.0)]

    arr = np.asarray(pts, dtype=float)
    assert arr.shape == (N_LANDMARKS, 2)
    # Sub-pixel deterministic jitter: real faces are not exactly symmetric,
    # and exact symmetry creates cocircular point sets that make Delaunay
    # triangulation degenerate.
    rng = np.random.default_rng(1618033)
    arr = arr + rng.uniform(-0.3, 0.3, size=arr.shape)
    return arr


CANONICAL_TEMPLATE: np.ndarray = _build_template()
CANONICAL_TEMPLATE.setflags(write=False)


@dataclass(frozen=True)
class LandmarkSet:
    """Ordered set of 76 (x, y) landmark coordinates in pixels."""

    points: np.ndarray
    part_map: Mapping[str, tuple[int, ...]] = field(default_factory=lambda: PART_INDEX_MAP)

    def __post_init__(self):
        pts = np.asarray(self.points, dtype=float)
        if pts.shape != (N_LANDMARKS, 2):
            raise SchemaViolation("landmarks", "points", f"expected shape (76, 2), got {pts.shape}")
        if not np.all(np.isfinite(pts)):
            raise SchemaViolation("landmarks", "points", "non-finite coordinate")
        seen: set[int] = set()
        for name, idx in self.part_map.items():
            if any(i in seen for i in idx):
                raise SchemaViolation("part_map", name, "part index sets overlap")
            if any(not (0 <= i < N_LANDMARKS) for i in idx):
                raise SchemaViolation("part_map", name, "index out of range")
            seen.update(idx)
        object.__setattr__(self, "points", pts)

    def part(self, name: str) -> np.ndarray:
        return self.points[list(self.part_map[name])]

    def centroid(self, name: str) -> np.ndarray:
        return self.part(name).mean(axis=0)

    def subset(self, indices: Iterable[int]) -> np.ndarray:
        return self.points[list(indices)]

    def transformed(self, fn) -> "LandmarkSet":
        return LandmarkSet(fn(self.points), self.part_map)


def convex_hull_indices(points: np.ndarray) -> list[int]:
    """Indices of the convex hull of a point set, via Andrew's monotone chain.

    Returned in counter-clockwise order (for y growing downwards this walks
    clockwise on screen).  Collinear boundary points are dropped.
    """
    pts = np.asarray(points, dtype=float)
    order = np.lexsort((pts[:, 1], pts[:, 0]))

    def cross(o, a, b):
        return (pts[a, 0] - pts[o, 0]) * (pts[b, 1] - pts[o, 1]) - (
            pts[a, 1] - pts[o, 1]
        ) * (pts[b, 0] - pts[o, 0])

    lower: list[int] = []
    for i in order:
        while len(lower) >= 2 and cross(lower[-2], lower[-1], i) <= 0:
            lower.pop()
        lower.append(int(i))
    upper: list[int] = []
    for i in order[::-1]:
        while len(upper) >= 2 and cross(upper[-2], upper[-1], i) <= 0:
            upper.pop()
        upper.append(int(i))
    return lower[:-1] + upper[:-1]
