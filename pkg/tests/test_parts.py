import numpy as np
import pytest

from facekit.errors import SchemaViolation
from facekit.features.parts import (
    IP_REGIONS,
    extract_enmc,
    extract_interpart,
    extract_part,
    region_centroids,
)
from facekit.landmarks import LEFT_CONTOUR, RIGHT_CONTOUR


@pytest.mark.parametrize(
    "family,dim", [("E", 72), ("N", 66), ("M", 153), ("C", 105)]
)
def test_part_dims(template, family, dim):
    v = extract_part(template, family)
    assert v.family == family
    assert v.dim == dim


def test_part_dims_are_pair_counts(template):
    # 9 eye landmarks -> C(9,2)=36 per eye; 12 nose -> 66; 18 mouth -> 153;
    # 15 contour -> 105
    assert extract_part(template, "E").dim == 2 * (9 * 8 // 2)
    assert extract_part(template, "N").dim == 12 * 11 // 2
    assert extract_part(template, "M").dim == 18 * 17 // 2
    assert extract_part(template, "C").dim == 15 * 14 // 2


def test_unknown_family_rejected(template):
    with pytest.raises(SchemaViolation):
        extract_part(template, "X")


def test_e_is_left_then_right(template):
    v = extract_part(template, "E")
    assert v.names[0].startswith("left_eye_")
    assert v.names[35].startswith("left_eye_")
    assert v.names[36].startswith("right_eye_")


def test_part_values_hand_checked(template):
    v = extract_part(template, "N")
    pts = template.points
    by = dict(zip(v.names, v.values))
    assert by["nose_18_19"] == pytest.approx(np.linalg.norm(pts[18] - pts[19]))
    assert by["nose_28_29"] == pytest.approx(np.linalg.norm(pts[28] - pts[29]))


def test_region_centroids_shape_and_values(template):
    cents = region_centroids(template)
    assert cents.shape == (7, 2)
    pts = template.points
    i_left = IP_REGIONS.index("left_contour")
    np.testing.assert_allclose(cents[i_left], pts[list(LEFT_CONTOUR)].mean(axis=0))
    i_right = IP_REGIONS.index("right_contour")
    np.testing.assert_allclose(cents[i_right], pts[list(RIGHT_CONTOUR)].mean(axis=0))
    i_chin = IP_REGIONS.index("chin")
    np.testing.assert_allclose(cents[i_chin], pts[73:76].mean(axis=0))


def test_interpart_dim_and_one_value(template):
    v = extract_interpart(template)
    assert v.family == "IP"
    assert v.dim == 21
    cents = region_centroids(template)
    by = dict(zip(v.names, v.values))
    want = np.linalg.norm(cents[0] - cents[1])
    assert by["left_eye__right_eye"] == pytest.approx(want)


def test_enmc_is_concatenation(template):
    v = extract_enmc(template)
    assert v.family == "ENMC"
    assert v.dim == 396
    e = extract_part(template, "E")
    n = extract_part(template, "N")
    m = extract_part(template, "M")
    c = extract_part(template, "C")
    np.testing.assert_array_equal(v.values[:72], e.values)
    np.testing.assert_array_equal(v.values[72:138], n.values)
    np.testing.assert_array_equal(v.values[138:291], m.values)
    np.testing.assert_array_equal(v.values[291:], c.values)


def test_rotation_invariance(template):
    th = 0.3
    rot = np.array([[np.cos(th), -np.sin(th)], [np.sin(th), np.cos(th)]])
    turned = template.transformed(lambda p: p @ rot.T + 5.0)
    for fam in ("E", "N", "M", "C"):
        np.testing.assert_allclose(
            extract_part(turned, fam).values,
            extract_part(template, fam).values,
            atol=1e-9,
        )
    np.testing.assert_allclose(
        extract_interpart(turned).values, extract_interpart(template).values, atol=1e-9
    )
