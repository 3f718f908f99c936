"""Convex hulls and radial distance profiles.

A profile measures, for n evenly spaced directions from a center point, the
distance to the mask contour (first exit from foreground) and the distance to
the convex hull boundary. The gap between the two is what the irregularity
measure consumes.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import CenterNotInterior, CenterOutsideMask, DegenerateHull
from .mask import BinaryMask, PlanarPoint, Polygon, centroid, trace_contour

# Marching step for contour rays; bisection refines to RAY_TOLERANCE.
RAY_STEP = 0.25
RAY_TOLERANCE = 1e-3


@dataclass(frozen=True)
class RadialProfile:
    """Distances along n center radials: contour_dist r_i and hull_dist R_i.

    angles[i] = 2*pi*i/n. After construction by radial_profile, r_i has been
    clamped so that r_i <= R_i for every ray.
    """

    center: PlanarPoint
    angles: np.ndarray
    contour_dist: np.ndarray
    hull_dist: np.ndarray

    def __post_init__(self):
        angles = np.asarray(self.angles, dtype=float)
        contour = np.asarray(self.contour_dist, dtype=float)
        hull = np.asarray(self.hull_dist, dtype=float)
        if not (angles.shape == contour.shape == hull.shape) or angles.ndim != 1 or angles.size < 1:
            raise ValueError("angles, contour_dist and hull_dist must be 1-D and equally long")
        for arr, name in ((angles, "angles"), (contour, "contour_dist"), (hull, "hull_dist")):
            if not np.all(np.isfinite(arr)):
                raise ValueError(f"{name} must be finite")
            arr.setflags(write=False)
        object.__setattr__(self, "angles", angles)
        object.__setattr__(self, "contour_dist", contour)
        object.__setattr__(self, "hull_dist", hull)

    @property
    def n(self) -> int:
        return self.angles.size


def _cross(o: tuple[float, float], a: tuple[float, float], b: tuple[float, float]) -> float:
    return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])


def convex_hull(points) -> Polygon:
    """Strictly convex hull of the points, counterclockwise, by monotone chain.

    Collinear boundary points are dropped. One or two distinct input points
    yield a degenerate 1- or 2-vertex polygon; an all-collinear input yields
    the 2 extreme points.
    """
    unique = sorted({(float(p[0]), float(p[1])) for p in points})
    if not unique:
        raise ValueError("convex_hull needs at least one point")
    if len(unique) == 1:
        return Polygon([PlanarPoint(*unique[0])])
    if len(unique) == 2:
        return Polygon([PlanarPoint(*p) for p in unique])

    lower: list[tuple[float, float]] = []
    for p in unique:
        while len(lower) >= 2 and _cross(lower[-2], lower[-1], p) <= 0:
            lower.pop()
        lower.append(p)
    upper: list[tuple[float, float]] = []
    for p in reversed(unique):
        while len(upper) >= 2 and _cross(upper[-2], upper[-1], p) <= 0:
            upper.pop()
        upper.append(p)
    hull = lower[:-1] + upper[:-1]
    return Polygon([PlanarPoint(*p) for p in hull])


def ray_contour_distance(
    mask: BinaryMask,
    center: PlanarPoint,
    angle: float,
    step: float = RAY_STEP,
    tolerance: float = RAY_TOLERANCE,
) -> float:
    """Distance from center to the first foreground-to-background transition.

    Marches along (cos angle, sin angle) in `step` increments, then bisects
    the bracketing interval down to `tolerance`. First-exit semantics: a ray
    that leaves the foreground inside a concave notch stops there, even if
    foreground resumes further out.
    """
    if not mask.contains_point(center.x, center.y):
        raise CenterOutsideMask(f"center ({center.x}, {center.y}) is not on a foreground pixel")
    dx, dy = math.cos(angle), math.sin(angle)
    limit = math.hypot(mask.width, mask.height) + 1.0

    lo = 0.0
    t = step
    while t <= limit and mask.contains_point(center.x + t * dx, center.y + t * dy):
        lo = t
        t += step
    hi = t  # first sampled background point (beyond the border counts as background)
    while hi - lo > tolerance:
        mid = 0.5 * (lo + hi)
        if mask.contains_point(center.x + mid * dx, center.y + mid * dy):
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def ray_hull_distance(hull: Polygon, center: PlanarPoint, angle: float) -> float:
    """Exact distance from an interior point to the hull boundary along a ray.

    The hull must be counterclockwise with >=3 vertices and the center must be
    strictly inside, which makes the intersection unique.
    """
    verts = hull.vertices
    if len(verts) < 3:
        raise DegenerateHull(f"hull has {len(verts)} vertices, need at least 3")
    ox, oy = center.x, center.y
    for i, a in enumerate(verts):
        b = verts[(i + 1) % len(verts)]
        if (b.x - a.x) * (oy - a.y) - (b.y - a.y) * (ox - a.x) <= 0:
            raise CenterNotInterior(f"({ox}, {oy}) is not strictly inside the hull")

    dx, dy = math.cos(angle), math.sin(angle)
    best = math.inf
    for i, a in enumerate(verts):
        b = verts[(i + 1) % len(verts)]
        ux, uy = b.x - a.x, b.y - a.y
        denom = dx * uy - dy * ux
        if abs(denom) < 1e-15:
            continue  # ray parallel to this edge; neighbors cover the hit
        wx, wy = a.x - ox, a.y - oy
        t = (wx * uy - wy * ux) / denom
        s = (wx * dy - wy * dx) / denom
        if t > 0 and -1e-12 <= s <= 1 + 1e-12:
            best = min(best, t)
    if not math.isfinite(best):
        raise CenterNotInterior(f"ray from ({ox}, {oy}) does not meet the hull")
    return best


def radial_profile(mask: BinaryMask, n: int) -> RadialProfile:
    """Build the n-ray profile of a single-component mask around its centroid.

    The hull is taken over the traced contour vertices. Contour distances are
    clamped to the hull distance per ray: the continuum guarantees r <= R and
    up to half a pixel of rasterization jitter must not produce negative
    irregularity terms.
    """
    if n < 3:
        raise ValueError(f"need at least 3 radials, got {n}")
    center = centroid(mask)
    if not mask.contains_point(center.x, center.y):
        raise CenterOutsideMask(f"centroid ({center.x}, {center.y}) is not on a foreground pixel")
    contour = trace_contour(mask)
    hull = convex_hull(contour.vertices)
    if len(hull) < 3:
        raise DegenerateHull("contour has fewer than 3 distinct non-collinear points")

    angles = 2.0 * math.pi * np.arange(n) / n
    hull_dist = np.empty(n)
    contour_dist = np.empty(n)
    for i, angle in enumerate(angles):
        big_r = ray_hull_distance(hull, center, float(angle))
        small_r = ray_contour_distance(mask, center, float(angle))
        hull_dist[i] = big_r
        contour_dist[i] = min(small_r, big_r)
    return RadialProfile(center=center, angles=angles, contour_dist=contour_dist, hull_dist=hull_dist)
