"""Shape and margin quantities for nodule masks: AR, shape index, irregularity.

Aspect ratio uses original-image units recovered through the mask's scale
ratios; the radial quantities are computed on the pixel grid as stored.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DegenerateHull, EmptyMask, ZeroRadii
from .geometry import RadialProfile, radial_profile
from .mask import BinaryMask, largest_component, scaled_extent

# 10-degree spacing; dense enough to catch clinically sized lobulations at 512^2.
DEFAULT_RADIAL_COUNT = 36


@dataclass(frozen=True)
class ShapeMarginReport:
    """Assessment of one mask: aspect ratio, shape index, irregularity.

    ar is h/w exactly, h and w being the original-unit bounding-box extents.
    n records the radial count the radial quantities were measured with.
    """

    ar: float
    bcsi: float
    ir: float
    n: int
    h: float
    w: float


def aspect_ratio(mask: BinaryMask) -> float:
    """Bounding-box height over width in original units; >1 means taller than wide."""
    h, w = scaled_extent(mask)
    return h / w


def bcsi(profile: RadialProfile) -> float:
    """Shape index: sum of |r_i / sum(r) - 1/n| over the contour radials.

    Zero for equal radii, invariant to uniform scaling of all radii.
    """
    r = profile.contour_dist
    total = float(r.sum())
    if total <= 0.0:
        raise ZeroRadii("all contour radial distances are zero")
    return float(np.abs(r / total - 1.0 / profile.n).sum())


def irregularity(profile: RadialProfile) -> float:
    """tanh of the summed relative gaps (R_i - r_i) / R_i; in [0, 1).

    Zero exactly when the contour meets the hull on every ray (convex shape),
    saturating toward 1 as depressions deepen or multiply.
    """
    big_r = profile.hull_dist
    if np.any(big_r <= 0.0):
        raise DegenerateHull("hull distances must be strictly positive")
    return math.tanh(float(((big_r - profile.contour_dist) / big_r).sum()))


def assess(mask: BinaryMask, n: int = DEFAULT_RADIAL_COUNT) -> ShapeMarginReport:
    """Full shape-margin assessment of the largest foreground component.

    Isolates the largest 8-connected component, then measures aspect ratio
    from its scaled bounding box and the radial quantities from an n-ray
    profile around its centroid. Raises EmptyMask, CenterOutsideMask or
    DegenerateHull when the mask cannot be assessed.
    """
    if mask.foreground_count() == 0:
        raise EmptyMask("mask has no foreground pixels")
    component = largest_component(mask)
    h, w = scaled_extent(component)
    profile = radial_profile(component, n)
    return ShapeMarginReport(
        ar=h / w,
        bcsi=bcsi(profile),
        ir=irregularity(profile),
        n=n,
        h=h,
        w=w,
    )
