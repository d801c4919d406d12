import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra import numpy as hnp

from facekit.features.lbp import extract_lbp, lbp_codes


def oracle_codes(img):
    """Literal nested-loop transcription of the code definition."""
    img = np.asarray(img, dtype=float)
    h, w = img.shape
    out = np.zeros((h, w), dtype=np.uint8)
    for r in range(h):
        for c in range(w):
            # replicated borders: clamp the neighbor coordinate
            n = img[max(r - 1, 0), c]
            s = img[min(r + 1, h - 1), c]
            w_ = img[r, max(c - 1, 0)]
            e = img[r, min(c + 1, w - 1)]
            v = img[r, c]
            code = 0
            if n >= v:
                code += 8
            if e >= v:
                code += 4
            if s >= v:
                code += 2
            if w_ >= v:
                code += 1
            out[r, c] = code
    return out


@given(
    hnp.arrays(
        np.uint8,
        st.tuples(st.integers(2, 12), st.integers(2, 12)),
        elements=st.integers(0, 255),
    )
)
def test_codes_match_nested_loop(img):
    np.testing.assert_array_equal(lbp_codes(img), oracle_codes(img))


def test_constant_image_all_fifteen():
    img = np.full((9, 9), 50, dtype=np.uint8)
    assert (lbp_codes(img) == 15).all()


def test_single_bright_pixel():
    img = np.zeros((5, 5), dtype=np.uint8)
    img[2, 2] = 200
    codes = lbp_codes(img)
    # the bright pixel sees four darker neighbors: no bits set
    assert codes[2, 2] == 0
    # every other pixel ties with or is exceeded by all neighbors (ties set
    # the bit), so the rest of the map is all-ones
    rest = codes.copy()
    rest[2, 2] = 15
    assert (rest == 15).all()


def test_extract_dim_and_normalization():
    rng = np.random.default_rng(3)
    img = rng.integers(0, 256, (320, 400)).astype(np.uint8)
    v = extract_lbp(img)
    assert v.family == "LBP"
    assert v.dim == 1328
    sums = v.values.reshape(83, 16).sum(axis=1)
    np.testing.assert_allclose(sums, 1.0, atol=1e-12)
    assert (v.values >= 0).all()


def test_extract_constant_image_histograms():
    img = np.full((320, 400), 7, dtype=np.uint8)
    v = extract_lbp(img)
    h = v.values.reshape(83, 16)
    np.testing.assert_array_equal(h[:, 15], np.ones(83))
    np.testing.assert_array_equal(h[:, :15], np.zeros((83, 15)))
