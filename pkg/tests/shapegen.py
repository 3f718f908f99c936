"""Synthetic masks and polygons used across the test modules."""
from __future__ import annotations

import math

import numpy as np

from nodulekit import BinaryMask, PlanarPoint, Polygon


def grid_coords(size: int) -> tuple[np.ndarray, np.ndarray]:
    yy, xx = np.mgrid[0:size, 0:size].astype(float)
    return xx, yy


def disk_mask(size: int, cx: float, cy: float, radius: float, **scales) -> BinaryMask:
    xx, yy = grid_coords(size)
    return BinaryMask((xx - cx) ** 2 + (yy - cy) ** 2 <= radius * radius, **scales)


def ellipse_mask(size: int, cx: float, cy: float, a: float, b: float, theta: float = 0.0) -> BinaryMask:
    xx, yy = grid_coords(size)
    ct, st = math.cos(theta), math.sin(theta)
    u = (xx - cx) * ct + (yy - cy) * st
    v = -(xx - cx) * st + (yy - cy) * ct
    return BinaryMask((u / a) ** 2 + (v / b) ** 2 <= 1.0)


def rect_mask(size: int, cx: float, cy: float, half_w: float, half_h: float, theta: float = 0.0) -> BinaryMask:
    xx, yy = grid_coords(size)
    ct, st = math.cos(theta), math.sin(theta)
    u = (xx - cx) * ct + (yy - cy) * st
    v = -(xx - cx) * st + (yy - cy) * ct
    return BinaryMask((np.abs(u) <= half_w) & (np.abs(v) <= half_h))


def blob_mask(size: int, rng: np.random.Generator, r0_range=(90.0, 170.0), jitter: float = 20.0) -> BinaryMask:
    """Smooth star-shaped blob: radius r0 * (1 + low-order trig series).

    The series is normalized so |rho'| / rho stays well below 1, which keeps
    the rasterized boundary single-crossing along any center radial.
    """
    r0 = rng.uniform(*r0_range)
    orders = np.array([2, 3, 4])
    amps = rng.uniform(0.0, 1.0, orders.size)
    amps = amps / (amps * orders).sum() * rng.uniform(0.15, 0.45)
    phases = rng.uniform(0.0, 2.0 * math.pi, orders.size)
    cx = size / 2 + rng.uniform(-jitter, jitter)
    cy = size / 2 + rng.uniform(-jitter, jitter)
    xx, yy = grid_coords(size)
    theta = np.arctan2(yy - cy, xx - cx)
    rho = r0 * (1.0 + sum(a * np.cos(k * theta + p) for k, a, p in zip(orders, amps, phases)))
    return BinaryMask(np.hypot(xx - cx, yy - cy) <= rho)


def star_polygon(cx: float, cy: float, outer: float, inner: float, points: int = 5) -> Polygon:
    """Classic star: alternating outer/inner vertices, first tip pointing up."""
    verts = []
    for k in range(2 * points):
        radius = outer if k % 2 == 0 else inner
        angle = -math.pi / 2 + k * math.pi / points
        verts.append(PlanarPoint(cx + radius * math.cos(angle), cy + radius * math.sin(angle)))
    return Polygon(verts)


def mask_from_rows(rows: list[str], **scales) -> BinaryMask:
    """Build a small mask from strings; any non '.' and non ' ' character is foreground."""
    grid = np.array([[ch not in ". " for ch in row] for row in rows], dtype=bool)
    return BinaryMask(grid, **scales)


def pgm_p5(width: int, height: int, pixels: bytes, maxval: int = 255) -> bytes:
    return f"P5\n{width} {height}\n{maxval}\n".encode() + pixels


def pgm_p2(width: int, height: int, values, maxval: int = 255) -> bytes:
    body = " ".join(str(v) for v in values)
    return f"P2\n{width} {height}\n{maxval}\n{body}\n".encode()
