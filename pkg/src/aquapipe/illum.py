"""Contrast and illumination compensation.

Histogram equalization and CLAHE work on 256-level quantized intensities and
return continuous values; the adaptive gamma and the hybrid global/local
model act per RGB channel with the exponent derived from the luminance mean.
"""

import enum
import math
from dataclasses import dataclass

import numpy as np

from .errors import DegenerateInputError, PreconditionError
from .filt import _gaussian_array
from .imgcore import ColorSpace, ImageBuffer, convert, luminance, quantize_u8


@dataclass
class ClaheParams:
    """Clip threshold is a fraction of tile pixels: a bin is clipped at
    clip_threshold * tile_pixels / 256 counts."""

    clip_threshold: float = 2.0
    tile_grid: tuple = (8, 8)

    def validate(self):
        if self.clip_threshold <= 0:
            raise PreconditionError("clip_threshold must be positive")
        rows, cols = self.tile_grid
        if rows < 1 or cols < 1:
            raise PreconditionError("tile_grid must be at least 1x1")


@dataclass
class MsrParams:
    """Multi-scale Retinex scales (Gaussian sigmas) and their weights."""

    sigmas: tuple = (15.0, 80.0, 250.0)
    weights: tuple | None = None  # equal weights when None
    epsilon: float = 1.0 / 255.0

    def resolved_weights(self):
        if self.weights is None:
            return np.full(len(self.sigmas), 1.0 / len(self.sigmas))
        return np.asarray(self.weights, dtype=np.float64)

    def validate(self):
        if not self.sigmas or any(s <= 0 for s in self.sigmas):
            raise PreconditionError("sigmas must be positive")
        w = self.resolved_weights()
        if len(w) != len(self.sigmas):
            raise PreconditionError("weights and sigmas must have the same length")
        if abs(float(w.sum()) - 1.0) > 1e-9:
            raise PreconditionError("weights must sum to 1")
        if self.epsilon <= 0:
            raise PreconditionError("epsilon must be positive")


class AlphaMode(enum.Enum):
    AUTO = "auto"
    FIXED = "fixed"


@dataclass
class HybridIllumParams:
    alpha_mode: AlphaMode = AlphaMode.AUTO
    alpha_fixed: float = 0.5
    alpha_min: float = 0.2
    alpha_max: float = 0.8
    local_sigmas: tuple = (5.0, 20.0, 60.0)
    local_weights: tuple | None = None  # equal weights when None
    gamma_override: float | None = None
    gamma_invert: bool = False

    def resolved_weights(self):
        if self.local_weights is None:
            return np.full(len(self.local_sigmas), 1.0 / len(self.local_sigmas))
        return np.asarray(self.local_weights, dtype=np.float64)

    def validate(self):
        if not 0.0 <= self.alpha_fixed <= 1.0:
            raise PreconditionError("fixed alpha must be in [0, 1]")
        if not 0.0 <= self.alpha_min <= self.alpha_max <= 1.0:
            raise PreconditionError("need 0 <= alpha_min <= alpha_max <= 1")
        if not self.local_sigmas or any(s <= 0 for s in self.local_sigmas):
            raise PreconditionError("local sigmas must be positive")
        w = self.resolved_weights()
        if len(w) != len(self.local_sigmas):
            raise PreconditionError("local weights and sigmas must have the same length")
        if abs(float(w.sum()) - 1.0) > 1e-9:
            raise PreconditionError("local weights must sum to 1")


# ---------------------------------------------------------------------------
# Histogram equalization
# ---------------------------------------------------------------------------

def _equalize_plane(plane: np.ndarray) -> np.ndarray:
    levels = quantize_u8(plane)
    counts = np.bincount(levels.ravel(), minlength=256)
    cdf = np.cumsum(counts) / plane.size
    return cdf[levels]


def hist_equalize(img: ImageBuffer) -> ImageBuffer:
    """Map each quantized level to its cumulative probability, per channel.

    The mapping is monotone non-decreasing and sends the top occupied level
    to exactly 1.
    """
    if img.channels == 1:
        out = _equalize_plane(img.data)
    else:
        out = np.stack([_equalize_plane(img.data[:, :, c]) for c in range(3)], axis=-1)
    return ImageBuffer(out, img.space)


# ---------------------------------------------------------------------------
# CLAHE
# ---------------------------------------------------------------------------

def _tile_luts(levels: np.ndarray, edges_y, edges_x, clip_threshold: float) -> np.ndarray:
    rows = len(edges_y) - 1
    cols = len(edges_x) - 1
    luts = np.empty((rows, cols, 256), dtype=np.float64)
    for i in range(rows):
        for j in range(cols):
            tile = levels[edges_y[i] : edges_y[i + 1], edges_x[j] : edges_x[j + 1]]
            n = tile.size
            counts = np.bincount(tile.ravel(), minlength=256).astype(np.float64)
            clip = clip_threshold * n / 256.0
            clipped = np.minimum(counts, clip)
            excess = n - clipped.sum()
            luts[i, j] = np.cumsum(clipped + excess / 256.0) / n
    return luts


def _interp_axis(length: int, edges: np.ndarray):
    """Bracketing tile indices and blend weight for every pixel coordinate."""
    centers = (edges[:-1] + edges[1:] - 1) / 2.0
    pos = np.arange(length, dtype=np.float64)
    right = np.searchsorted(centers, pos, side="right")
    i1 = np.clip(right, 0, len(centers) - 1)
    i0 = np.clip(right - 1, 0, len(centers) - 1)
    span = centers[i1] - centers[i0]
    t = np.where(span > 0, (pos - centers[i0]) / np.where(span > 0, span, 1.0), 0.0)
    return i0, i1, np.clip(t, 0.0, 1.0)


def _clahe_plane(plane: np.ndarray, params: ClaheParams) -> np.ndarray:
    h, w = plane.shape
    rows, cols = params.tile_grid
    if rows > h or cols > w:
        raise PreconditionError(f"tile grid {rows}x{cols} exceeds image size {w}x{h}")
    edges_y = (np.arange(rows + 1) * h) // rows
    edges_x = (np.arange(cols + 1) * w) // cols
    levels = quantize_u8(plane)
    luts = _tile_luts(levels, edges_y, edges_x, params.clip_threshold)

    iy0, iy1, ty = _interp_axis(h, edges_y)
    ix0, ix1, tx = _interp_axis(w, edges_x)
    ty = ty[:, None]
    tx = tx[None, :]
    v00 = luts[iy0[:, None], ix0[None, :], levels]
    v01 = luts[iy0[:, None], ix1[None, :], levels]
    v10 = luts[iy1[:, None], ix0[None, :], levels]
    v11 = luts[iy1[:, None], ix1[None, :], levels]
    return (1 - ty) * ((1 - tx) * v00 + tx * v01) + ty * ((1 - tx) * v10 + tx * v11)


def clahe(img: ImageBuffer, params: ClaheParams) -> ImageBuffer:
    """Tile-wise clipped equalization with bilinear blending between tiles.

    Color images are equalized on the HSV value channel only, which avoids
    hue shifts.
    """
    params.validate()
    if img.channels == 1:
        return ImageBuffer(_clahe_plane(img.data, params), img.space)
    hsv = convert(img, ColorSpace.HSV)
    data = hsv.data.copy()
    data[:, :, 2] = _clahe_plane(data[:, :, 2], params)
    return convert(ImageBuffer(data, ColorSpace.HSV), img.space)


# ---------------------------------------------------------------------------
# Adaptive gamma
# ---------------------------------------------------------------------------

def _gamma_from_mean(mean: float, invert: bool) -> float:
    if mean <= 0.0 or mean >= 1.0:
        raise DegenerateInputError(f"luminance mean {mean} outside (0, 1)")
    if invert:
        return math.log(0.5) / math.log(mean)
    return math.log(mean) / math.log(0.5)


def adaptive_gamma(img: ImageBuffer, invert: bool = False):
    """Exponent correction with gamma = log(mean)/log(0.5), applied per channel.

    As printed, dark images (mean < 0.5) get gamma > 1 and darken further;
    ``invert=True`` flips the ratio so the correction brightens instead.
    Returns (buffer, gamma).
    """
    gamma = _gamma_from_mean(float(luminance(img).mean()), invert)
    return ImageBuffer(img.data**gamma, img.space), gamma


# ---------------------------------------------------------------------------
# Multi-scale Retinex
# ---------------------------------------------------------------------------

def _msr_plane(plane, params: MsrParams, weights):
    log_i = np.log(plane + params.epsilon)
    out = np.zeros_like(plane)
    for sigma, w in zip(params.sigmas, weights):
        out += w * (log_i - np.log(_gaussian_array(plane, sigma) + params.epsilon))
    return out


def msr(img: ImageBuffer, params: MsrParams, normalize: bool = True) -> ImageBuffer:
    """Multi-scale log-ratio reflectance; optionally min-max rescaled to [0, 1].

    The raw reflectance is unbounded, so the normalized form is the usable
    output; zero-range planes normalize to zero.
    """
    params.validate()
    weights = params.resolved_weights()
    if img.channels == 1:
        out = _msr_plane(img.data, params, weights)
    else:
        out = np.stack(
            [_msr_plane(img.data[:, :, c], params, weights) for c in range(3)], axis=-1
        )
    if not normalize:
        return ImageBuffer(out, img.space)
    if img.channels == 1:
        out = _minmax(out)
    else:
        out = np.stack([_minmax(out[:, :, c]) for c in range(3)], axis=-1)
    return ImageBuffer(out, img.space)


def _minmax(plane):
    lo, hi = plane.min(), plane.max()
    if hi - lo < 1e-12:
        return np.zeros_like(plane)
    return (plane - lo) / (hi - lo)


# ---------------------------------------------------------------------------
# Hybrid global/local illumination
# ---------------------------------------------------------------------------

def hybrid_illumination(img: ImageBuffer, params: HybridIllumParams):
    """Blend of gamma-corrected and multi-scale-blurred images, per channel.

    The exponent comes from the luminance mean; auto alpha decreases with
    luminance spread so low-contrast images get more global correction.
    Returns (buffer, alpha, gamma).
    """
    if img.channels != 3:
        raise PreconditionError("hybrid illumination requires a 3-channel image")
    params.validate()

    lum = luminance(img)
    if params.alpha_mode == AlphaMode.FIXED:
        alpha = params.alpha_fixed
    else:
        alpha = float(np.clip(1.0 - 2.0 * lum.std(), params.alpha_min, params.alpha_max))

    if params.gamma_override is not None:
        gamma = params.gamma_override
    else:
        gamma = _gamma_from_mean(float(lum.mean()), params.gamma_invert)

    global_part = img.data**gamma
    weights = params.resolved_weights()
    local_part = np.zeros_like(img.data)
    for sigma, w in zip(params.local_sigmas, weights):
        for c in range(3):
            local_part[:, :, c] += w * _gaussian_array(img.data[:, :, c], sigma)

    out = alpha * global_part + (1.0 - alpha) * local_part
    return ImageBuffer(np.clip(out, 0.0, 1.0), img.space), alpha, gamma
