"""Forward math of the exponential feature mixture.

An attention map built from patch/class embeddings is exponentiated and
multiplied into a channel-squeezed feature grid, then expanded back to C
channels through a sigmoid excitation. All operations are deterministic
forward computations on supplied values; no training happens here.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import expit

from .errors import DimensionMismatch

# Reference configuration: 16x16 patches with 64-dim embeddings over feature
# grids of H/16 x W/16, which makes the attention upsample an identity.
# Non-default geometries are fully supported; these are documentation values.
DEFAULT_PATCH_SIZE = 16
DEFAULT_EMBED_DIM = 64


@dataclass(frozen=True)
class FeatureGrid:
    """Dense H x W x C grid of finite real values.

    A 2-D array is accepted and treated as a single-channel grid.
    """

    values: np.ndarray

    def __init__(self, values: np.ndarray):
        arr = np.asarray(values, dtype=float)
        if arr.ndim == 2:
            arr = arr[:, :, np.newaxis]
        if arr.ndim != 3 or arr.shape[0] < 1 or arr.shape[1] < 1 or arr.shape[2] < 1:
            raise ValueError(f"grid must be H x W x C with all dims >= 1, got shape {arr.shape}")
        if not np.all(np.isfinite(arr)):
            raise ValueError("grid values must be finite")
        arr = arr.copy()
        arr.setflags(write=False)
        object.__setattr__(self, "values", arr)

    @property
    def height(self) -> int:
        return self.values.shape[0]

    @property
    def width(self) -> int:
        return self.values.shape[1]

    @property
    def channels(self) -> int:
        return self.values.shape[2]


@dataclass(frozen=True)
class EmbeddingSet:
    """Patch embeddings (N x D0) plus the two class tokens (background, nodule).

    N must equal grid_rows * grid_cols; row r*grid_cols + c of the patch
    matrix corresponds to grid cell (r, c).
    """

    patch_embeddings: np.ndarray
    class_embeddings: np.ndarray
    grid_rows: int
    grid_cols: int

    def __post_init__(self):
        patch = np.asarray(self.patch_embeddings, dtype=float)
        cls = np.asarray(self.class_embeddings, dtype=float)
        if patch.ndim != 2:
            raise ValueError(f"patch embeddings must be N x D0, got shape {patch.shape}")
        if cls.shape != (2, patch.shape[1]):
            raise ValueError(f"class embeddings must be 2 x {patch.shape[1]}, got shape {cls.shape}")
        if self.grid_rows < 1 or self.grid_cols < 1:
            raise ValueError("grid_rows and grid_cols must be >= 1")
        if patch.shape[0] != self.grid_rows * self.grid_cols:
            raise DimensionMismatch(
                f"{patch.shape[0]} patch embeddings cannot fill a "
                f"{self.grid_rows} x {self.grid_cols} grid"
            )
        if not (np.all(np.isfinite(patch)) and np.all(np.isfinite(cls))):
            raise ValueError("embeddings must be finite")
        object.__setattr__(self, "patch_embeddings", patch)
        object.__setattr__(self, "class_embeddings", cls)


@dataclass(frozen=True)
class MixParams:
    """Squeeze weights (w1, b1) and excitation weights (w2, b2).

    w1 has one entry per input channel; w2 and b2 one entry per output channel.
    """

    w1: np.ndarray
    b1: float
    w2: np.ndarray
    b2: np.ndarray

    def __post_init__(self):
        w1 = np.asarray(self.w1, dtype=float)
        w2 = np.asarray(self.w2, dtype=float)
        b2 = np.asarray(self.b2, dtype=float)
        if w1.ndim != 1 or w2.ndim != 1 or b2.ndim != 1:
            raise ValueError("w1, w2 and b2 must be 1-D vectors")
        if w2.shape != b2.shape:
            raise DimensionMismatch(f"w2 length {w2.size} vs b2 length {b2.size}")
        if not (np.all(np.isfinite(w1)) and math.isfinite(self.b1) and np.all(np.isfinite(w2)) and np.all(np.isfinite(b2))):
            raise ValueError("parameters must be finite")
        object.__setattr__(self, "w1", w1)
        object.__setattr__(self, "b1", float(self.b1))
        object.__setattr__(self, "w2", w2)
        object.__setattr__(self, "b2", b2)


def bilinear_upsample(grid: FeatureGrid, target_h: int, target_w: int) -> FeatureGrid:
    """Resample a single-channel grid with half-pixel-center bilinear weights.

    Source coordinate for target index t is (t + 0.5) * src/dst - 0.5,
    clamped to the source extent (edge values extend outward).
    """
    if grid.channels != 1:
        raise DimensionMismatch(f"upsampling expects a single channel, got {grid.channels}")
    if target_h < 1 or target_w < 1:
        raise ValueError("target dimensions must be >= 1")
    src = grid.values[:, :, 0]
    src_h, src_w = src.shape

    ys = np.clip((np.arange(target_h) + 0.5) * (src_h / target_h) - 0.5, 0.0, src_h - 1.0)
    xs = np.clip((np.arange(target_w) + 0.5) * (src_w / target_w) - 0.5, 0.0, src_w - 1.0)
    y0 = np.floor(ys).astype(int)
    x0 = np.floor(xs).astype(int)
    y1 = np.minimum(y0 + 1, src_h - 1)
    x1 = np.minimum(x0 + 1, src_w - 1)
    fy = (ys - y0)[:, np.newaxis]
    fx = (xs - x0)[np.newaxis, :]

    top = src[np.ix_(y0, x0)] * (1.0 - fx) + src[np.ix_(y0, x1)] * fx
    bottom = src[np.ix_(y1, x0)] * (1.0 - fx) + src[np.ix_(y1, x1)] * fx
    return FeatureGrid(top * (1.0 - fy) + bottom * fy)


def attention_map(emb: EmbeddingSet, target_h: int, target_w: int) -> FeatureGrid:
    """Nodule-token attention scores reshaped to the patch grid and upsampled.

    Cell (r, c) holds the dot product of patch embedding r*grid_cols + c with
    the nodule class token; the map is then bilinearly resized to the target.
    """
    scores = emb.patch_embeddings @ emb.class_embeddings[1]
    source = FeatureGrid(scores.reshape(emb.grid_rows, emb.grid_cols))
    return bilinear_upsample(source, target_h, target_w)


def squeeze(x_conv: FeatureGrid, params: MixParams) -> FeatureGrid:
    """Collapse channels to one descriptor per cell: relu(w1 . channels + b1)."""
    if params.w1.size != x_conv.channels:
        raise DimensionMismatch(f"w1 length {params.w1.size} vs {x_conv.channels} channels")
    projected = x_conv.values @ params.w1 + params.b1
    return FeatureGrid(np.maximum(projected, 0.0))


def exp_mix(attn: FeatureGrid, squeezed: FeatureGrid) -> FeatureGrid:
    """Per cell, e^attention * squeezed value.

    The multiplier is strictly positive, so attention rescales features
    without ever zeroing them.
    """
    if attn.values.shape != squeezed.values.shape or attn.channels != 1:
        raise DimensionMismatch(
            f"attention {attn.values.shape} vs squeezed {squeezed.values.shape}; both must be H x W x 1"
        )
    return FeatureGrid(np.exp(attn.values) * squeezed.values)


def excite(mixed: FeatureGrid, params: MixParams) -> FeatureGrid:
    """Expand back to C channels: sigmoid(value * w2[k] + b2[k]) per cell and k."""
    if mixed.channels != 1:
        raise DimensionMismatch(f"excitation expects a single channel, got {mixed.channels}")
    return FeatureGrid(expit(mixed.values * params.w2 + params.b2))


def exponential_mixture(x_conv: FeatureGrid, emb: EmbeddingSet, params: MixParams) -> FeatureGrid:
    """Full forward pass: attention, squeeze, exponential mix, excitation.

    Output has the same H x W as x_conv and one channel per entry of w2.
    """
    attn = attention_map(emb, x_conv.height, x_conv.width)
    squeezed = squeeze(x_conv, params)
    return excite(exp_mix(attn, squeezed), params)
