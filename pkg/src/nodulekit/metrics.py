"""Diagnosis and segmentation evaluation metrics."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, NamedTuple, Optional

from .errors import DimensionMismatch, EmptyBatch
from .mask import BinaryMask


@dataclass(frozen=True)
class ConfusionCounts:
    """tp/fp/tn/fn tallies; malignant is the positive class."""

    tp: int
    fp: int
    tn: int
    fn: int

    def __post_init__(self):
        for name, value in (("tp", self.tp), ("fp", self.fp), ("tn", self.tn), ("fn", self.fn)):
            if value < 0:
                raise ValueError(f"{name} must be nonnegative, got {value}")

    @property
    def total(self) -> int:
        return self.tp + self.fp + self.tn + self.fn


class ClassificationMetrics(NamedTuple):
    accuracy: float
    specificity: Optional[float]
    sensitivity: Optional[float]
    f1: Optional[float]


class OverlapScores(NamedTuple):
    iou: float
    dice: float


def confusion(samples: Iterable[tuple[int, float]], threshold: float = 0.5) -> ConfusionCounts:
    """Count (label, probability) pairs; p >= threshold predicts malignant."""
    if not 0.0 < threshold < 1.0:
        raise ValueError(f"threshold must be in (0, 1), got {threshold}")
    tp = fp = tn = fn = 0
    for y, p in samples:
        if y not in (0, 1):
            raise ValueError(f"label must be 0 or 1, got {y}")
        predicted = p >= threshold
        if y == 1:
            tp, fn = tp + predicted, fn + (not predicted)
        else:
            fp, tn = fp + predicted, tn + (not predicted)
    if tp + fp + tn + fn == 0:
        raise EmptyBatch("confusion needs at least one sample")
    return ConfusionCounts(tp=tp, fp=fp, tn=tn, fn=fn)


def classification_metrics(c: ConfusionCounts) -> ClassificationMetrics:
    """Accuracy, specificity, sensitivity and F1 from confusion counts.

    Ratios with a zero denominator are reported as None, never coerced to 0,
    so aggregation cannot silently bias.
    """
    if c.total == 0:
        raise EmptyBatch("metrics need at least one counted sample")
    accuracy = (c.tp + c.tn) / c.total
    specificity = c.tn / (c.tn + c.fp) if c.tn + c.fp > 0 else None
    sensitivity = c.tp / (c.tp + c.fn) if c.tp + c.fn > 0 else None
    precision = c.tp / (c.tp + c.fp) if c.tp + c.fp > 0 else None
    if precision is None or sensitivity is None or precision + sensitivity == 0:
        f1 = None
    else:
        f1 = 2.0 * precision * sensitivity / (precision + sensitivity)
    return ClassificationMetrics(accuracy, specificity, sensitivity, f1)


def iou_dice(s: BinaryMask, t: BinaryMask) -> OverlapScores:
    """Intersection-over-union and dice overlap of two same-sized masks.

    Two empty masks agree perfectly and score (1, 1).
    """
    if s.grid.shape != t.grid.shape:
        raise DimensionMismatch(f"mask shapes differ: {s.grid.shape} vs {t.grid.shape}")
    intersection = int((s.grid & t.grid).sum())
    union = int((s.grid | t.grid).sum())
    if union == 0:
        return OverlapScores(1.0, 1.0)
    size_sum = int(s.grid.sum()) + int(t.grid.sum())
    return OverlapScores(intersection / union, 2.0 * intersection / size_sum)
