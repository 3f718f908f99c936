"""Knowledge-augmented multi-task objective.

Combines a segmentation loss (dice plus cross-entropy), a classification
cross-entropy, and a constraint penalty that charges each sample for
disagreement between its predicted malignancy probability and the shape
evidence (aspect ratio, irregularity) of its predicted mask. A two-phase
schedule moves weight from segmentation to classification once the
segmentation loss settles.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass, replace
from typing import Iterable, Optional, Sequence

import numpy as np

from .errors import DimensionMismatch, EmptyBatch, NonPositiveAR
from .mask import BinaryMask
from .shape_margin import DEFAULT_RADIAL_COUNT, assess

PROBABILITY_CLAMP = 1e-7
DICE_SMOOTHING = 1e-6
OSCILLATION_THRESHOLD = 0.02
OSCILLATION_WINDOW = 2


@dataclass(frozen=True)
class LossWeights:
    """Weights for the weighted-sum objective: alpha*seg + beta*cls + lam*penalty."""

    alpha: float
    beta: float
    lam: float

    def __post_init__(self):
        for name, value in (("alpha", self.alpha), ("beta", self.beta), ("lam", self.lam)):
            if not (math.isfinite(value) and value >= 0):
                raise ValueError(f"{name} must be finite and nonnegative, got {value}")


INITIAL_WEIGHTS = LossWeights(alpha=1.0, beta=0.2, lam=0.1)
SWITCHED_WEIGHTS = LossWeights(alpha=0.01, beta=2.0, lam=1.0)


class Phase(enum.Enum):
    INITIAL = "initial"
    SWITCHED = "switched"


@dataclass(frozen=True)
class ScheduleState:
    """Weight-schedule state; value-passed, transitions Initial->Switched once."""

    phase: Phase = Phase.INITIAL
    epoch_seg_losses: tuple[float, ...] = ()
    threshold: float = OSCILLATION_THRESHOLD
    window: int = OSCILLATION_WINDOW


@dataclass(frozen=True)
class SampleRecord:
    """One training sample as seen by the objective.

    p is the predicted malignancy probability, y the optional 0/1 label,
    pred_mask the hard mask used for shape evidence, soft_mask the optional
    per-pixel foreground probability grid, gt_mask the optional ground truth.
    """

    p: float
    pred_mask: BinaryMask
    y: Optional[int] = None
    soft_mask: Optional[np.ndarray] = None
    gt_mask: Optional[BinaryMask] = None

    def __post_init__(self):
        if not 0.0 <= self.p <= 1.0:
            raise ValueError(f"probability must be in [0, 1], got {self.p}")
        if self.y is not None and self.y not in (0, 1):
            raise ValueError(f"label must be 0 or 1, got {self.y}")
        if self.soft_mask is not None:
            soft = np.asarray(self.soft_mask, dtype=float)
            if soft.min() < 0.0 or soft.max() > 1.0:
                raise ValueError("soft_mask entries must be in [0, 1]")
            object.__setattr__(self, "soft_mask", soft)
            if self.gt_mask is not None and soft.shape != self.gt_mask.grid.shape:
                raise DimensionMismatch(
                    f"soft_mask {soft.shape} vs gt_mask {self.gt_mask.grid.shape}"
                )


def ar_penalties(ar: float) -> tuple[float, float]:
    """Penalty pair (p_ar, n_ar) charged against malignant / benign predictions.

    p_ar = 1 - ar when ar < 1 (too wide for a malignant call), else 0.
    n_ar = ar - 1 when ar >= 1 (too tall for a benign call), else 0.
    """
    if not (math.isfinite(ar) and ar > 0):
        raise NonPositiveAR(f"aspect ratio must be finite and > 0, got {ar}")
    if ar < 1.0:
        return 1.0 - ar, 0.0
    return 0.0, ar - 1.0


def constraint_penalty(samples: Iterable[tuple[float, float, float]]) -> float:
    """Mean inconsistency penalty over (p, ar, ir) triples.

    Each sample contributes p*(p_ar + 1 - ir) + (1-p)*(n_ar + ir): confident
    malignant calls are charged for wide, regular masks, confident benign
    calls for tall, irregular ones.
    """
    total = 0.0
    count = 0
    for p, ar, ir in samples:
        if not 0.0 <= p <= 1.0:
            raise ValueError(f"probability must be in [0, 1], got {p}")
        if not 0.0 <= ir <= 1.0:
            raise ValueError(f"irregularity must be in [0, 1], got {ir}")
        p_ar, n_ar = ar_penalties(ar)
        total += p * (p_ar + 1.0 - ir) + (1.0 - p) * (n_ar + ir)
        count += 1
    if count == 0:
        raise EmptyBatch("constraint_penalty needs at least one sample")
    return total / count


def constraint_penalty_from_masks(
    records: Sequence[SampleRecord], n: int = DEFAULT_RADIAL_COUNT
) -> float:
    """Convenience wrapper: assess each record's pred_mask, then apply the penalty."""
    if len(records) == 0:
        raise EmptyBatch("constraint_penalty_from_masks needs at least one record")
    triples = []
    for record in records:
        report = assess(record.pred_mask, n)
        triples.append((record.p, report.ar, report.ir))
    return constraint_penalty(triples)


def classification_loss(pairs: Iterable[tuple[int, float]]) -> float:
    """Mean binary cross-entropy over (label, probability) pairs."""
    total = 0.0
    count = 0
    for y, p in pairs:
        if y not in (0, 1):
            raise ValueError(f"label must be 0 or 1, got {y}")
        clamped = min(max(p, PROBABILITY_CLAMP), 1.0 - PROBABILITY_CLAMP)
        total += -(y * math.log(clamped) + (1 - y) * math.log(1.0 - clamped))
        count += 1
    if count == 0:
        raise EmptyBatch("classification_loss needs at least one pair")
    return total / count


def segmentation_loss(soft: np.ndarray, gt: BinaryMask) -> float:
    """Half of (dice term + pixel-mean cross-entropy) over two classes.

    soft holds per-pixel foreground probabilities; background probability is
    its complement. The dice term is 1 - 2*sum(g*s)/(sum(g^2)+sum(s^2)) over
    both classes and all pixels; probabilities are clamped only inside the
    logarithms. The denominator cannot vanish for one-hot ground truth, so
    the smoothing constant only guards the (unreachable) all-zero case.
    """
    soft = np.asarray(soft, dtype=float)
    if soft.shape != gt.grid.shape:
        raise DimensionMismatch(f"soft grid {soft.shape} vs ground truth {gt.grid.shape}")
    if soft.size == 0:
        raise EmptyBatch("segmentation_loss needs at least one pixel")
    if float(soft.min()) < 0.0 or float(soft.max()) > 1.0:
        raise ValueError("soft probabilities must lie in [0, 1]")

    g_fg = gt.grid.astype(float)
    g_bg = 1.0 - g_fg
    s_fg = soft
    s_bg = 1.0 - soft

    overlap = float((g_fg * s_fg + g_bg * s_bg).sum())
    denom = float((g_fg * g_fg + g_bg * g_bg).sum() + (s_fg * s_fg + s_bg * s_bg).sum())
    if denom <= 0.0:
        denom = DICE_SMOOTHING
    dice_term = 1.0 - 2.0 * overlap / denom

    clamped_fg = np.clip(s_fg, PROBABILITY_CLAMP, 1.0 - PROBABILITY_CLAMP)
    clamped_bg = np.clip(s_bg, PROBABILITY_CLAMP, 1.0 - PROBABILITY_CLAMP)
    cross_entropy = float(-(g_fg * np.log(clamped_fg) + g_bg * np.log(clamped_bg)).mean())
    return 0.5 * (dice_term + cross_entropy)


def overall_loss(l_seg: float, l_cls: float, phi: float, weights: LossWeights) -> float:
    """Weighted sum alpha*l_seg + beta*l_cls + lam*phi."""
    for name, value in (("l_seg", l_seg), ("l_cls", l_cls), ("phi", phi)):
        if not math.isfinite(value):
            raise ValueError(f"{name} must be finite, got {value}")
    return weights.alpha * l_seg + weights.beta * l_cls + weights.lam * phi


def update_schedule(state: ScheduleState, epoch_seg_loss: float) -> tuple[ScheduleState, LossWeights]:
    """Record an epoch's mean segmentation loss and return the new weights.

    While in the initial phase, the mean of the last `window` absolute
    adjacent-epoch differences is compared against the threshold; once it
    drops below, the schedule switches permanently to the late-phase weights.
    """
    if not math.isfinite(epoch_seg_loss):
        raise ValueError(f"epoch_seg_loss must be finite, got {epoch_seg_loss}")
    losses = state.epoch_seg_losses + (float(epoch_seg_loss),)
    phase = state.phase
    if phase is Phase.INITIAL and len(losses) >= 2:
        diffs = [abs(b - a) for a, b in zip(losses, losses[1:])][-state.window:]
        if sum(diffs) / len(diffs) < state.threshold:
            phase = Phase.SWITCHED
    new_state = replace(state, phase=phase, epoch_seg_losses=losses)
    weights = SWITCHED_WEIGHTS if phase is Phase.SWITCHED else INITIAL_WEIGHTS
    return new_state, weights
