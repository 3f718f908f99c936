"""Annotation parsing, polygon rasterization, and the canonical resize.

The supported XML schema is a small annotation subset: a document holds
<case> elements, each with an <id>, an optional <diagnosis> (benign or
malignant, case-insensitive) and zero or more <roi> elements whose text is a
semicolon-separated list of comma pairs, e.g. "10,10; 30,10; 30,30".
"""
from __future__ import annotations

import math
import warnings
import xml.etree.ElementTree as ET
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .errors import DegeneratePolygon, MalformedPointList, MalformedXML, UnknownLabelWarning
from .mask import BinaryMask, PlanarPoint, Polygon

CANONICAL_SIDE = 512

_LABELS = {"benign": 0, "malignant": 1}
_LABEL_NAMES = {0: "benign", 1: "malignant"}

# Pixel centers within this distance of a polygon edge count as boundary.
_BOUNDARY_TOLERANCE = 1e-9


@dataclass(frozen=True)
class AnnotationRecord:
    """One annotated case: identifier, ROI polygons, optional 0/1 label."""

    image_id: str
    rois: tuple[Polygon, ...]
    label: Optional[int] = None

    def __post_init__(self):
        object.__setattr__(self, "rois", tuple(self.rois))
        if self.label is not None and self.label not in (0, 1):
            raise ValueError(f"label must be 0, 1 or None, got {self.label}")
        for roi in self.rois:
            if len(roi) < 3:
                raise MalformedPointList(f"ROI of case {self.image_id!r} has {len(roi)} points, need >= 3")


def _parse_point_list(text: str, image_id: str) -> Polygon:
    points = []
    for chunk in (text or "").split(";"):
        chunk = chunk.strip()
        if not chunk:
            continue
        parts = chunk.split(",")
        if len(parts) != 2:
            raise MalformedPointList(f"case {image_id!r}: expected 'x,y', got {chunk!r}")
        try:
            points.append(PlanarPoint(float(parts[0]), float(parts[1])))
        except ValueError as exc:
            raise MalformedPointList(f"case {image_id!r}: non-numeric coordinate in {chunk!r}") from exc
    if len(points) < 3:
        raise MalformedPointList(f"case {image_id!r}: ROI has {len(points)} points, need >= 3")
    return Polygon(points)


def parse_annotation_xml(document: str) -> list[AnnotationRecord]:
    """Parse an annotation document into records, in document order.

    A diagnosis that maps to neither benign nor malignant leaves the label
    absent and emits an UnknownLabelWarning.
    """
    try:
        root = ET.fromstring(document)
    except ET.ParseError as exc:
        raise MalformedXML(f"not well-formed: {exc}") from exc
    cases = [root] if root.tag == "case" else list(root.iter("case"))
    if not cases:
        raise MalformedXML("document contains no <case> element")

    records = []
    for case in cases:
        id_el = case.find("id")
        if id_el is None or not (id_el.text or "").strip():
            raise MalformedXML("case is missing a nonempty <id> element")
        image_id = id_el.text.strip()

        label: Optional[int] = None
        diag_el = case.find("diagnosis")
        if diag_el is not None and (diag_el.text or "").strip():
            diag = diag_el.text.strip().lower()
            if diag in _LABELS:
                label = _LABELS[diag]
            else:
                warnings.warn(
                    f"case {image_id!r}: diagnosis {diag_el.text.strip()!r} is not benign/malignant",
                    UnknownLabelWarning,
                    stacklevel=2,
                )
        rois = tuple(_parse_point_list(roi.text or "", image_id) for roi in case.findall("roi"))
        records.append(AnnotationRecord(image_id=image_id, rois=rois, label=label))
    return records


def serialize_annotation_xml(records: list[AnnotationRecord]) -> str:
    """Write records back to the supported schema; parse(serialize(parse(x))) is stable."""
    root = ET.Element("annotations")
    for record in records:
        case = ET.SubElement(root, "case")
        ET.SubElement(case, "id").text = record.image_id
        if record.label is not None:
            ET.SubElement(case, "diagnosis").text = _LABEL_NAMES[record.label]
        for roi in record.rois:
            ET.SubElement(case, "roi").text = ";".join(f"{p.x!r},{p.y!r}" for p in roi.vertices)
    return ET.tostring(root, encoding="unicode")


def rasterize_polygon(poly: Polygon, width: int, height: int) -> BinaryMask:
    """Fill a polygon onto a width x height grid with unit scales.

    A pixel is foreground iff its center is inside the polygon by the
    even-odd rule or lies on its boundary. The polygon is assumed simple.
    """
    if len(poly) < 3:
        raise DegeneratePolygon(f"polygon has {len(poly)} vertices, need >= 3")
    if width < 1 or height < 1:
        raise ValueError(f"canvas must be at least 1x1, got {width}x{height}")

    vx = np.array([p.x for p in poly.vertices])
    vy = np.array([p.y for p in poly.vertices])
    grid = np.zeros((height, width), dtype=bool)

    c_lo = max(0, int(math.floor(vx.min())) - 1)
    c_hi = min(width - 1, int(math.ceil(vx.max())) + 1)
    r_lo = max(0, int(math.floor(vy.min())) - 1)
    r_hi = min(height - 1, int(math.ceil(vy.max())) + 1)
    if c_lo > c_hi or r_lo > r_hi:
        return BinaryMask(grid)

    xs = np.arange(c_lo, c_hi + 1, dtype=float)
    ys = np.arange(r_lo, r_hi + 1, dtype=float)
    px, py = np.meshgrid(xs, ys)

    inside = np.zeros(px.shape, dtype=bool)
    on_edge = np.zeros(px.shape, dtype=bool)
    n = len(poly)
    for i in range(n):
        x1, y1 = vx[i], vy[i]
        x2, y2 = vx[(i + 1) % n], vy[(i + 1) % n]

        crosses = (y1 > py) != (y2 > py)
        if crosses.any():
            with np.errstate(divide="ignore", invalid="ignore"):
                x_at = x1 + (py - y1) * (x2 - x1) / (y2 - y1)
            inside ^= crosses & (px < x_at)

        ux, uy = x2 - x1, y2 - y1
        seg_len2 = ux * ux + uy * uy
        if seg_len2 == 0.0:
            dist2 = (px - x1) ** 2 + (py - y1) ** 2
        else:
            t = np.clip(((px - x1) * ux + (py - y1) * uy) / seg_len2, 0.0, 1.0)
            dist2 = (px - (x1 + t * ux)) ** 2 + (py - (y1 + t * uy)) ** 2
        on_edge |= dist2 <= _BOUNDARY_TOLERANCE**2

    grid[r_lo:r_hi + 1, c_lo:c_hi + 1] = inside | on_edge
    return BinaryMask(grid)


def resize_to_canonical(mask: BinaryMask, side: int = CANONICAL_SIDE) -> BinaryMask:
    """Nearest-neighbor resample to side x side, recording the scale ratios.

    Output scales compose with any existing ones, so scaled_extent on the
    result still reports original units.
    """
    if side < 1:
        raise ValueError(f"side must be >= 1, got {side}")
    src = mask.grid
    src_h, src_w = src.shape
    rows = np.minimum(((np.arange(side) + 0.5) * (src_h / side)).astype(int), src_h - 1)
    cols = np.minimum(((np.arange(side) + 0.5) * (src_w / side)).astype(int), src_w - 1)
    grid = src[np.ix_(rows, cols)]
    return BinaryMask(grid, scale_x=src_w * mask.scale_x / side, scale_y=src_h * mask.scale_y / side)
