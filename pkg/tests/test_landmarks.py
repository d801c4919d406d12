import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from facekit.errors import SchemaViolation
from facekit.landmarks import (
    CANONICAL_TEMPLATE,
    DELAUNAY_SUBSET,
    INNER_BROWS,
    LEFT_CONTOUR,
    N_LANDMARKS,
    PART_INDEX_MAP,
    RIGHT_CONTOUR,
    LandmarkSet,
    convex_hull_indices,
)


def test_part_map_is_a_partition():
    seen = []
    for idx in PART_INDEX_MAP.values():
        seen.extend(idx)
    assert sorted(seen) == list(range(N_LANDMARKS))


def test_part_sizes():
    sizes = {name: len(idx) for name, idx in PART_INDEX_MAP.items()}
    assert sizes == {
        "left_eye": 9, "right_eye": 9, "nose": 12, "mouth": 18,
        "contour": 15, "left_brow": 5, "right_brow": 5, "chin": 3,
    }


def test_contour_split_and_inner_brows():
    assert LEFT_CONTOUR == tuple(range(48, 55))
    assert RIGHT_CONTOUR == tuple(range(56, 63))
    assert set(LEFT_CONTOUR) | set(RIGHT_CONTOUR) | {55} == set(PART_INDEX_MAP["contour"])
    assert INNER_BROWS == (67, 68)


def test_template_shape_and_symmetry(template):
    pts = CANONICAL_TEMPLATE
    assert pts.shape == (76, 2)
    # eye centers land mirrored about the vertical midline x=160
    le = template.points[8]
    re = template.points[17]
    assert le[1] == pytest.approx(re[1], abs=1.0)
    assert (le[0] + re[0]) / 2 == pytest.approx(160.0, abs=1.0)
    # chin tip is the lowest contour point and sits near the midline
    contour = template.part("contour")
    chin = contour[contour[:, 1].argmax()]
    assert chin[0] == pytest.approx(160.0, abs=1.0)


def test_template_is_readonly():
    with pytest.raises(ValueError):
        CANONICAL_TEMPLATE[0, 0] = -1.0


def test_delaunay_subset_hull_has_seven_vertices():
    pts = CANONICAL_TEMPLATE[list(DELAUNAY_SUBSET)]
    hull = convex_hull_indices(pts)
    assert len(hull) == 7


def test_landmark_set_validation():
    with pytest.raises(SchemaViolation):
        LandmarkSet(np.zeros((75, 2)))
    bad = CANONICAL_TEMPLATE.copy()
    bad[3, 0] = np.nan
    with pytest.raises(SchemaViolation):
        LandmarkSet(bad)


def test_part_accessors(template):
    mouth = template.part("mouth")
    assert mouth.shape == (18, 2)
    np.testing.assert_allclose(template.centroid("mouth"), mouth.mean(axis=0))
    sub = template.subset([0, 17, 55])
    assert sub.shape == (3, 2)
    flipped = template.transformed(lambda p: p * [1, -1])
    assert flipped.points[5, 1] == -template.points[5, 1]


def _hull_oracle_ok(points, hull_idx):
    # every input point lies on the inner side (or boundary) of each hull edge
    h = points[hull_idx]
    n = len(hull_idx)
    for i in range(n):
        a, b = h[i], h[(i + 1) % n]
        cross = (b[0] - a[0]) * (points[:, 1] - a[1]) - (b[1] - a[1]) * (points[:, 0] - a[0])
        if not (cross >= -1e-9).all():
            return False
    return True


@given(arrays(np.float64, (12, 2), elements=st.floats(-100, 100, width=32)))
def test_convex_hull_contains_all_points(pts):
    # collapse to a segment or point -> hull under 3 vertices, skip
    idx = convex_hull_indices(pts)
    if len(idx) < 3:
        return
    assert _hull_oracle_ok(pts, idx)


def test_convex_hull_square_with_interior_point():
    pts = np.array([[0, 0], [10, 0], [10, 10], [0, 10], [5, 5], [5, 0]], dtype=float)
    idx = convex_hull_indices(pts)
    # collinear midpoint (5,0) and interior (5,5) are dropped
    assert sorted(idx) == [0, 1, 2, 3]
