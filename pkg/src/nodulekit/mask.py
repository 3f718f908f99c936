"""Binary mask representation, PGM I/O, components, contour tracing, extents.

Coordinate convention: pixel (row r, col c) has center (x=c, y=r) and y grows
downward, matching the raster order of the file format. A continuous point
(x, y) belongs to the pixel (floor(y+0.5), floor(x+0.5)).
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple, Sequence

import numpy as np
from scipy import ndimage

from .errors import EmptyMask, InvalidScale, MalformedFile


class PlanarPoint(NamedTuple):
    """Continuous pixel coordinate."""

    x: float
    y: float


@dataclass(frozen=True)
class Polygon:
    """Ordered planar vertex list, implicitly closed (last connects to first)."""

    vertices: tuple[PlanarPoint, ...]

    def __init__(self, vertices: Sequence[PlanarPoint]):
        verts = tuple(PlanarPoint(float(p[0]), float(p[1])) for p in vertices)
        if len(verts) < 1:
            raise ValueError("polygon needs at least one vertex")
        for p in verts:
            if not (math.isfinite(p.x) and math.isfinite(p.y)):
                raise ValueError("polygon vertices must be finite")
        object.__setattr__(self, "vertices", verts)

    def __len__(self) -> int:
        return len(self.vertices)

    def signed_area(self) -> float:
        """Shoelace area; positive for counterclockwise order (in x,y terms)."""
        verts = self.vertices
        total = 0.0
        for i, a in enumerate(verts):
            b = verts[(i + 1) % len(verts)]
            total += a.x * b.y - b.x * a.y
        return 0.5 * total


@dataclass
class BinaryMask:
    """Rasterized foreground grid with the original-image scale ratios attached.

    grid is a read-only boolean array of shape (height, width), True meaning
    foreground. scale_x and scale_y are original/resized size ratios and let
    scaled_extent recover original-unit dimensions.
    """

    grid: np.ndarray
    scale_x: float = 1.0
    scale_y: float = 1.0

    def __post_init__(self):
        grid = np.array(self.grid, dtype=bool)
        if grid.ndim != 2 or grid.shape[0] < 1 or grid.shape[1] < 1:
            raise ValueError("grid must be 2-D with at least one pixel")
        sx, sy = float(self.scale_x), float(self.scale_y)
        if not (math.isfinite(sx) and sx > 0 and math.isfinite(sy) and sy > 0):
            raise InvalidScale(f"scale ratios must be finite and > 0, got ({self.scale_x}, {self.scale_y})")
        grid.setflags(write=False)
        self.grid = grid
        self.scale_x = sx
        self.scale_y = sy

    @property
    def height(self) -> int:
        return self.grid.shape[0]

    @property
    def width(self) -> int:
        return self.grid.shape[1]

    def foreground_count(self) -> int:
        return int(self.grid.sum())

    def contains_point(self, x: float, y: float) -> bool:
        """True if the continuous point (x, y) falls on a foreground pixel."""
        c = math.floor(x + 0.5)
        r = math.floor(y + 0.5)
        if r < 0 or c < 0 or r >= self.grid.shape[0] or c >= self.grid.shape[1]:
            return False
        return bool(self.grid[r, c])


def _read_header_token(data: bytes, pos: int) -> tuple[bytes, int]:
    """Next whitespace-delimited header token, skipping '#' comment lines."""
    n = len(data)
    while pos < n:
        ch = data[pos:pos + 1]
        if ch.isspace():
            pos += 1
        elif ch == b"#":
            while pos < n and data[pos:pos + 1] not in (b"\n", b"\r"):
                pos += 1
        else:
            break
    if pos >= n:
        raise MalformedFile("truncated PGM header")
    start = pos
    while pos < n and not data[pos:pos + 1].isspace() and data[pos:pos + 1] != b"#":
        pos += 1
    return data[start:pos], pos


def load_mask(file_bytes: bytes, scale_x: float = 1.0, scale_y: float = 1.0) -> BinaryMask:
    """Parse a P5 (binary) or P2 (ASCII) PGM into a BinaryMask.

    Any pixel value > 0 is foreground. maxval must be at most 255.
    """
    if not (scale_x > 0 and scale_y > 0):
        raise InvalidScale(f"scale ratios must be > 0, got ({scale_x}, {scale_y})")
    if len(file_bytes) < 2:
        raise MalformedFile("empty or truncated file")
    magic = file_bytes[:2]
    if magic not in (b"P5", b"P2"):
        raise MalformedFile(f"unsupported magic {magic!r}, expected P5 or P2")
    pos = 2
    try:
        fields = []
        for _ in range(3):
            token, pos = _read_header_token(file_bytes, pos)
            fields.append(int(token))
    except ValueError as exc:
        raise MalformedFile(f"non-numeric PGM header field: {exc}") from exc
    width, height, maxval = fields
    if width < 1 or height < 1:
        raise MalformedFile(f"bad dimensions {width}x{height}")
    if not 1 <= maxval <= 255:
        raise MalformedFile(f"maxval {maxval} outside 8-bit range")

    count = width * height
    if magic == b"P5":
        pos += 1  # exactly one whitespace byte after maxval
        raster = file_bytes[pos:pos + count]
        if len(raster) < count:
            raise MalformedFile(f"truncated raster: expected {count} bytes, got {len(raster)}")
        values = np.frombuffer(raster, dtype=np.uint8, count=count)
    else:
        try:
            tokens = file_bytes[pos:].split()
            values = np.array([int(t) for t in tokens[:count]], dtype=np.int64)
        except ValueError as exc:
            raise MalformedFile(f"non-numeric P2 sample: {exc}") from exc
        if values.size < count:
            raise MalformedFile(f"truncated raster: expected {count} samples, got {values.size}")
    grid = (values > 0).reshape(height, width)
    return BinaryMask(grid, scale_x, scale_y)


def write_mask(mask: BinaryMask) -> bytes:
    """Serialize as binary P5, maxval 255, foreground=255, background=0."""
    header = f"P5\n{mask.width} {mask.height}\n255\n".encode("ascii")
    return header + (mask.grid.astype(np.uint8) * 255).tobytes()


_EIGHT_CONNECTED = np.ones((3, 3), dtype=bool)


def largest_component(mask: BinaryMask) -> BinaryMask:
    """Keep only the largest 8-connected foreground component.

    Ties are broken in favor of the component whose first pixel comes
    earliest in row-major order.
    """
    labels, count = ndimage.label(mask.grid, structure=_EIGHT_CONNECTED)
    if count == 0:
        raise EmptyMask("mask has no foreground pixels")
    sizes = np.bincount(labels.ravel())
    sizes[0] = 0
    best = sizes.max()
    candidates = np.flatnonzero(sizes == best)
    if len(candidates) == 1:
        chosen = candidates[0]
    else:
        flat = labels.ravel()
        first = np.flatnonzero(np.isin(flat, candidates))[0]
        chosen = flat[first]
    return BinaryMask(labels == chosen, mask.scale_x, mask.scale_y)


# Moore neighborhood in clockwise order starting from the west neighbor,
# as (dr, dc) offsets: W, NW, N, NE, E, SE, S, SW.
_MOORE = ((0, -1), (-1, -1), (-1, 0), (-1, 1), (0, 1), (1, 1), (1, 0), (1, -1))
_MOORE_INDEX = {off: i for i, off in enumerate(_MOORE)}


def trace_contour(mask: BinaryMask) -> Polygon:
    """Ordered closed boundary of a connected component's pixel centers.

    Moore-neighbor tracing starting at the row-major-first foreground pixel,
    entering from the west. Terminates on re-entering the start pixel from
    the starting direction (Jacob's criterion), with a repeated-state check
    as a safety net for 1- and 2-pixel-wide shapes. The output has positive
    signed area (counterclockwise in the x,y frame used here).
    """
    grid = mask.grid
    h, w = grid.shape
    flat = np.flatnonzero(grid.ravel())
    if flat.size == 0:
        raise EmptyMask("mask has no foreground pixels")
    start = (int(flat[0]) // w, int(flat[0]) % w)

    def is_fg(r: int, c: int) -> bool:
        return 0 <= r < h and 0 <= c < w and bool(grid[r, c])

    def next_step(p: tuple[int, int], back_idx: int) -> tuple[tuple[int, int], int] | None:
        """Scan the Moore ring clockwise from the backtrack position."""
        for k in range(1, 9):
            idx = (back_idx + k) % 8
            dr, dc = _MOORE[idx]
            cand = (p[0] + dr, p[1] + dc)
            if is_fg(*cand):
                prev_idx = (back_idx + k - 1) % 8
                prev = (p[0] + _MOORE[prev_idx][0], p[1] + _MOORE[prev_idx][1])
                delta = (prev[0] - cand[0], prev[1] - cand[1])
                return cand, _MOORE_INDEX[delta]
        return None

    start_back = 0  # entered from the west during the row-major scan
    step = next_step(start, start_back)
    if step is None:
        return Polygon([PlanarPoint(start[1], start[0])])

    trail = [start]
    seen = {(start, start_back)}
    p, back = step
    while True:
        if p == start and back == start_back:
            break
        if (p, back) in seen:
            break
        trail.append(p)
        seen.add((p, back))
        p, back = next_step(p, back)  # always finds the previous pixel at least

    while len(trail) > 1 and trail[-1] == trail[0]:
        trail.pop()
    return Polygon([PlanarPoint(c, r) for r, c in trail])


def centroid(mask: BinaryMask) -> PlanarPoint:
    """Arithmetic mean of foreground pixel-center coordinates."""
    rows, cols = np.nonzero(mask.grid)
    if rows.size == 0:
        raise EmptyMask("mask has no foreground pixels")
    return PlanarPoint(float(cols.mean()), float(rows.mean()))


def scaled_extent(mask: BinaryMask) -> tuple[float, float]:
    """Bounding-box (height, width) of the foreground in original units.

    Extents are inclusive pixel counts multiplied by the recorded scale
    ratios, so a single pixel with unit scales has extent (1, 1).
    """
    rows, cols = np.nonzero(mask.grid)
    if rows.size == 0:
        raise EmptyMask("mask has no foreground pixels")
    h = float(rows.max() - rows.min() + 1) * mask.scale_y
    w = float(cols.max() - cols.min() + 1) * mask.scale_x
    return h, w
