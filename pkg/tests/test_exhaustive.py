from itertools import combinations

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from hypothesis.extra import numpy as hnp

from facekit.features.exhaustive import extract_siex, pairwise_distances, subset_triangles
from facekit.landmarks import CANONICAL_TEMPLATE, DELAUNAY_SUBSET


def test_subset_has_26_landmarks():
    assert len(DELAUNAY_SUBSET) == 26
    assert len(set(DELAUNAY_SUBSET)) == 26


def test_pairwise_count_and_order():
    pts = np.array([[0.0, 0.0], [3.0, 4.0], [0.0, 12.0]])
    d = pairwise_distances(pts)
    # lexicographic (i, j) order: (0,1), (0,2), (1,2)
    np.testing.assert_allclose(d, [5.0, 12.0, np.hypot(3, 8)])


@given(
    hnp.arrays(
        float,
        (26, 2),
        elements=st.floats(-100, 100, allow_nan=False, width=32),
    )
)
def test_pairwise_matches_naive(pts):
    d = pairwise_distances(pts)
    naive = [np.linalg.norm(pts[i] - pts[j]) for i, j in combinations(range(26), 2)]
    np.testing.assert_allclose(d, naive, atol=1e-9)


def test_template_triangle_count():
    assert len(subset_triangles()) == 43


def test_triangles_are_subset_positions():
    tris = subset_triangles()
    flat = {v for t in tris for v in t}
    assert flat <= set(range(26))


def test_siex_dim_and_layout(normalized_face):
    v = extract_siex(normalized_face.image, normalized_face.landmarks)
    assert v.family == "SIex"
    assert v.dim == 454
    assert v.names[0].startswith("d_")
    assert v.names[324].startswith("d_")
    assert v.names[325] == "patch0_mean"
    assert v.names[-1] == "patch42_max"


def test_siex_distance_block_is_pairwise(normalized_face):
    v = extract_siex(normalized_face.image, normalized_face.landmarks)
    pts = normalized_face.landmarks.points[list(DELAUNAY_SUBSET)]
    np.testing.assert_allclose(v.values[:325], pairwise_distances(pts), atol=1e-12)


def test_siex_stat_block_constant_image(normalized_face):
    img = np.full(normalized_face.image.shape, 42, dtype=np.uint8)
    v = extract_siex(img, normalized_face.landmarks)
    np.testing.assert_array_equal(v.values[325:], np.full(129, 42.0))


def test_patch_identity_fixed_by_template():
    # triangulating a different geometry must not change which landmark
    # triples define the patches: identity comes from the template
    tris_a = subset_triangles()
    tris_b = subset_triangles(DELAUNAY_SUBSET)
    assert tris_a == tris_b
    tmpl_pts = CANONICAL_TEMPLATE[list(DELAUNAY_SUBSET)]
    assert tmpl_pts.shape == (26, 2)
