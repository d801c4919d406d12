import numpy as np
import pytest

from facekit.errors import ImageTooSmall
from facekit.features.tiling import GRID_SIZES, N_PATCHES, grid_bounds, patch_bounds


def test_patch_count():
    assert N_PATCHES == sum(g * g for g in GRID_SIZES) == 83


def test_grids_partition_every_pixel():
    h, w = 61, 47
    for g in GRID_SIZES:
        cover = np.zeros((h, w), dtype=int)
        for r0, r1, c0, c1 in grid_bounds(h, w, g):
            cover[r0:r1, c0:c1] += 1
        assert (cover == 1).all()


def test_floor_boundaries():
    # bounds are floor(size*i/g), so a 10-row 3-grid splits 3/3/4
    rows = [(r0, r1) for r0, r1, _, _ in grid_bounds(10, 10, 3)][:3]
    assert [r1 - r0 for r0, r1 in rows[:1]] == [3]
    starts = sorted({r0 for r0, _, _, _ in grid_bounds(10, 10, 3)})
    assert starts == [0, 3, 6]


def test_patch_bounds_order_and_count():
    bounds = patch_bounds(64, 64)
    assert len(bounds) == 83
    # 3x3 grid first: its first patch starts at the origin and spans ~1/3
    r0, r1, c0, c1 = bounds[0]
    assert (r0, c0) == (0, 0)
    assert r1 == 21  # floor(64/3)
    # 7x7 grid last: final patch ends at the image corner
    assert bounds[-1][1] == 64 and bounds[-1][3] == 64


def test_too_small_raises():
    with pytest.raises(ImageTooSmall):
        patch_bounds(6, 64)
    with pytest.raises(ImageTooSmall):
        patch_bounds(64, 6)
    # 7 rows is the smallest workable height for the 7-grid
    assert len(patch_bounds(7, 7)) == 83


def test_min_side_guard():
    # every patch keeps at least min_side pixels per axis when requested
    for r0, r1, c0, c1 in patch_bounds(21, 21, min_side=3):
        assert r1 - r0 >= 3 and c1 - c0 >= 3
    with pytest.raises(ImageTooSmall):
        patch_bounds(20, 20, min_side=3)
