"""Rectangular patch tilings shared by the texture descriptors.

The face canvas is tiled three times, into 3x3, 5x5, and 7x7 grids, giving
9 + 25 + 49 = 83 patches.  Patch order is fixed: coarse grid first, row-major
within each grid.  Tile boundaries use floor(i * extent / g) so tiles differ
by at most one pixel in size and cover the image exactly.
"""

from __future__ import annotations

from facekit.errors import ImageTooSmall

GRID_SIZES = (3, 5, 7)
N_PATCHES = sum(g * g for g in GRID_SIZES)  # 83


def grid_bounds(h: int, w: int, g: int) -> list[tuple[int, int, int, int]]:
    """Row-major (r0, r1, c0, c1) half-open spans of a g x g tiling."""
    rows = [h * i // g for i in range(g + 1)]
    cols = [w * i // g for i in range(g + 1)]
    return [
        (rows[i], rows[i + 1], cols[j], cols[j + 1])
        for i in range(g)
        for j in range(g)
    ]


def patch_bounds(h: int, w: int, min_side: int = 1) -> list[tuple[int, int, int, int]]:
    """Bounds of all 83 patches; every tile must be at least min_side wide."""
    out = []
    for g in GRID_SIZES:
        tiles = grid_bounds(h, w, g)
        for r0, r1, c0, c1 in tiles:
            if r1 - r0 < min_side or c1 - c0 < min_side:
                raise ImageTooSmall(
                    f"{h}x{w} image: {g}x{g} tiling makes a tile smaller than "
                    f"{min_side}x{min_side}"
                )
        out.extend(tiles)
    return out
