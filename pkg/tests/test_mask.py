import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from nodulekit import (
    BinaryMask,
    EmptyMask,
    InvalidScale,
    MalformedFile,
    centroid,
    largest_component,
    load_mask,
    scaled_extent,
    trace_contour,
    write_mask,
)
from shapegen import disk_mask, ellipse_mask, mask_from_rows, pgm_p2, pgm_p5

small_grids = arrays(np.bool_, st.tuples(st.integers(1, 12), st.integers(1, 12)))
nonempty_grids = small_grids.filter(lambda g: g.any())


class TestLoadMask:
    def test_all_foreground(self):
        mask = load_mask(pgm_p5(4, 4, b"\xff" * 16), 1.0, 1.0)
        assert mask.foreground_count() == 16
        assert (mask.width, mask.height) == (4, 4)

    def test_all_background(self):
        mask = load_mask(pgm_p5(4, 4, b"\x00" * 16))
        assert mask.foreground_count() == 0

    def test_any_nonzero_value_is_foreground(self):
        mask = load_mask(pgm_p5(3, 1, bytes([0, 1, 200])))
        assert mask.grid.tolist() == [[False, True, True]]

    def test_p2_ascii(self):
        mask = load_mask(pgm_p2(3, 2, [0, 255, 0, 7, 0, 255]))
        assert mask.grid.tolist() == [[False, True, False], [True, False, True]]

    def test_header_comments_are_skipped(self):
        data = b"P5\n# a comment\n2 2\n# another\n255\n" + b"\xff\x00\x00\xff"
        mask = load_mask(data)
        assert mask.grid.tolist() == [[True, False], [False, True]]

    @pytest.mark.parametrize(
        "data",
        [
            b"",
            b"P6\n2 2\n255\n" + b"\x00" * 12,
            b"P5\n2 2\n255\n\xff\xff",          # truncated raster
            b"P5\n2 2\n300\n" + b"\x00" * 4,    # maxval beyond 8 bit
            b"P5\n2 x\n255\n" + b"\x00" * 4,    # non-numeric header
            b"P2\n2 2\n255\n1 2 3",             # missing sample
        ],
    )
    def test_malformed_files(self, data):
        with pytest.raises(MalformedFile):
            load_mask(data)

    @pytest.mark.parametrize("sx,sy", [(0.0, 1.0), (-1.0, 1.0), (1.0, 0.0)])
    def test_invalid_scale(self, sx, sy):
        with pytest.raises(InvalidScale):
            load_mask(pgm_p5(1, 1, b"\xff"), sx, sy)

    def test_round_trip_reproduces_pixel_bytes(self):
        pixels = bytes([255, 0, 0, 255, 255, 255])
        data = pgm_p5(3, 2, pixels)
        assert write_mask(load_mask(data))[-6:] == pixels

    @given(grid=small_grids)
    def test_round_trip_lossless_on_grid(self, grid):
        mask = BinaryMask(grid)
        again = load_mask(write_mask(mask))
        assert np.array_equal(again.grid, mask.grid)


class TestLargestComponent:
    def test_keeps_biggest_blob(self):
        mask = mask_from_rows([
            "XXX.....",
            "XXX...XX",
            "XXX...XX",
            "......X.",
        ])
        kept = largest_component(mask)
        assert kept.foreground_count() == 9
        assert kept.grid[0, 0] and not kept.grid[1, 6]

    def test_single_pixel_identity(self):
        mask = mask_from_rows(["...", ".X.", "..."])
        assert np.array_equal(largest_component(mask).grid, mask.grid)

    def test_tie_breaks_to_first_row_major_pixel(self):
        grid = np.zeros((14, 14), dtype=bool)
        grid[0:2, 0:2] = True
        grid[10:12, 10:12] = True
        kept = largest_component(BinaryMask(grid))
        assert kept.grid[0, 0] and not kept.grid[10, 10]

    def test_empty_mask_raises(self):
        with pytest.raises(EmptyMask):
            largest_component(BinaryMask(np.zeros((3, 3), dtype=bool)))

    def test_preserves_scales(self):
        mask = BinaryMask(np.ones((2, 2), dtype=bool), scale_x=2.0, scale_y=3.0)
        kept = largest_component(mask)
        assert (kept.scale_x, kept.scale_y) == (2.0, 3.0)

    @given(grid=nonempty_grids)
    def test_idempotent(self, grid):
        once = largest_component(BinaryMask(grid))
        twice = largest_component(once)
        assert np.array_equal(once.grid, twice.grid)


class TestTraceContour:
    def test_single_pixel(self):
        poly = trace_contour(mask_from_rows(["...", ".X.", "..."]))
        assert [(p.x, p.y) for p in poly.vertices] == [(1.0, 1.0)]

    def test_three_by_three_square_ring(self):
        # hand-traced Moore walk: around the perimeter, counterclockwise
        poly = trace_contour(mask_from_rows([".....", ".XXX.", ".XXX.", ".XXX.", "....."]))
        assert [(p.x, p.y) for p in poly.vertices] == [
            (1.0, 1.0), (2.0, 1.0), (3.0, 1.0), (3.0, 2.0),
            (3.0, 3.0), (2.0, 3.0), (1.0, 3.0), (1.0, 2.0),
        ]
        assert poly.signed_area() > 0

    def test_two_pixel_bar(self):
        poly = trace_contour(mask_from_rows(["....", ".XX.", "...."]))
        assert [(p.x, p.y) for p in poly.vertices] == [(1.0, 1.0), (2.0, 1.0)]

    def test_empty_raises(self):
        with pytest.raises(EmptyMask):
            trace_contour(BinaryMask(np.zeros((2, 2), dtype=bool)))

    def test_covers_all_boundary_pixels_of_simple_shapes(self):
        rng = np.random.default_rng(5)
        for _ in range(10):
            size = 48
            mask = ellipse_mask(size, 24 + rng.uniform(-4, 4), 24 + rng.uniform(-4, 4),
                                rng.uniform(6, 18), rng.uniform(6, 18), rng.uniform(0, np.pi))
            traced = {(p.x, p.y) for p in trace_contour(mask).vertices}
            grid = mask.grid
            padded = np.pad(grid, 1)
            boundary = grid & ~(
                padded[:-2, 1:-1] & padded[2:, 1:-1] & padded[1:-1, :-2] & padded[1:-1, 2:]
            )
            expected = {(float(c), float(r)) for r, c in zip(*np.nonzero(boundary))}
            assert traced == expected


class TestCentroid:
    def test_filled_rectangle(self):
        grid = np.zeros((10, 20), dtype=bool)
        grid[:, :] = True
        assert centroid(BinaryMask(grid)) == (9.5, 4.5)

    def test_single_pixel(self):
        grid = np.zeros((10, 10), dtype=bool)
        grid[7, 3] = True
        assert centroid(BinaryMask(grid)) == (3.0, 7.0)

    def test_two_pixel_midpoint(self):
        grid = np.zeros((4, 4), dtype=bool)
        grid[0, 0] = grid[0, 2] = True
        assert centroid(BinaryMask(grid)) == (1.0, 0.0)

    def test_empty_raises(self):
        with pytest.raises(EmptyMask):
            centroid(BinaryMask(np.zeros((2, 2), dtype=bool)))

    @given(grid=nonempty_grids, dr=st.integers(0, 5), dc=st.integers(0, 5))
    def test_translation_equivariance(self, grid, dr, dc):
        base = centroid(BinaryMask(grid))
        h, w = grid.shape
        shifted = np.zeros((h + dr, w + dc), dtype=bool)
        shifted[dr:, dc:] = grid
        moved = centroid(BinaryMask(shifted))
        assert moved.x == pytest.approx(base.x + dc) and moved.y == pytest.approx(base.y + dr)


class TestScaledExtent:
    def test_rectangle_counts_inclusive(self):
        grid = np.zeros((64, 64), dtype=bool)
        grid[10:50, 20:40] = True
        assert scaled_extent(BinaryMask(grid)) == (40.0, 20.0)

    def test_scale_multiplies(self):
        grid = np.zeros((64, 64), dtype=bool)
        grid[10:50, 20:40] = True
        assert scaled_extent(BinaryMask(grid, scale_x=1.0, scale_y=2.0)) == (80.0, 20.0)

    def test_single_pixel(self):
        grid = np.zeros((5, 5), dtype=bool)
        grid[2, 2] = True
        assert scaled_extent(BinaryMask(grid)) == (1.0, 1.0)

    @given(grid=nonempty_grids)
    def test_positive_for_nonempty(self, grid):
        h, w = scaled_extent(BinaryMask(grid))
        assert h > 0 and w > 0


def test_contains_point_pixel_ownership():
    mask = disk_mask(16, 8, 8, 3)
    assert mask.contains_point(8.0, 8.0)
    assert mask.contains_point(8.49, 8.49)
    assert not mask.contains_point(-1.0, 8.0)
    assert not mask.contains_point(8.0, 16.2)


def test_grid_is_read_only():
    mask = BinaryMask(np.ones((2, 2), dtype=bool))
    with pytest.raises(ValueError):
        mask.grid[0, 0] = False
