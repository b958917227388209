"""Dehazing priors: dark channel, airlight, transmission, scene restoration,
the multi-scale dark channel variant, and red-channel compensation."""

from dataclasses import dataclass

import numpy as np
from scipy import ndimage

from .errors import PreconditionError
from .imgcore import ColorSpace, ImageBuffer, channel_stats


@dataclass
class DcpParams:
    patch_radius: int = 7
    omega: float = 0.95
    t_floor: float = 0.1
    airlight_percentile: float = 0.001
    multiscale_radii: tuple = (3, 7, 15)
    multiscale_weights: tuple | None = None  # equal weights when None

    def resolved_multiscale_weights(self):
        if self.multiscale_weights is None:
            return np.full(len(self.multiscale_radii), 1.0 / len(self.multiscale_radii))
        return np.asarray(self.multiscale_weights, dtype=np.float64)

    def validate(self):
        if self.patch_radius < 0:
            raise PreconditionError("patch_radius must be >= 0")
        if not 0.0 < self.omega <= 1.0:
            raise PreconditionError("omega must be in (0, 1]")
        if not 0.0 < self.t_floor < 1.0:
            raise PreconditionError("t_floor must be in (0, 1)")
        if not 0.0 < self.airlight_percentile <= 0.05:
            raise PreconditionError("airlight_percentile must be in (0, 0.05]")
        w = self.resolved_multiscale_weights()
        if len(w) != len(self.multiscale_radii):
            raise PreconditionError("multiscale weights and radii must have the same length")
        if abs(float(w.sum()) - 1.0) > 1e-9:
            raise PreconditionError("multiscale weights must sum to 1")
        if any(r < 0 for r in self.multiscale_radii):
            raise PreconditionError("multiscale radii must be >= 0")


@dataclass
class TransmissionMap:
    """Per-pixel transmission, clamped into [floor, 1]."""

    values: np.ndarray
    floor: float


@dataclass
class AtmosphericLight:
    """One backscatter estimate per channel, each in [0, 1]."""

    values: np.ndarray


def dark_channel(img: ImageBuffer, radius: int) -> ImageBuffer:
    """Channel-wise minimum followed by a patch minimum (reflect borders)."""
    if img.channels != 3:
        raise PreconditionError("dark channel requires a 3-channel image")
    if radius < 0:
        raise PreconditionError(f"radius must be >= 0, got {radius}")
    per_pixel = img.data.min(axis=2)
    if radius == 0:
        return ImageBuffer(per_pixel, ColorSpace.GRAY)
    dark = ndimage.minimum_filter(per_pixel, size=2 * radius + 1, mode="reflect")
    return ImageBuffer(dark, ColorSpace.GRAY)


def estimate_airlight(img: ImageBuffer, dark: ImageBuffer, percentile: float) -> AtmosphericLight:
    """Mean color of the pixels with the brightest dark-channel values.

    The pixel count is max(1, floor(percentile * N)); ties are broken by flat
    scan order.
    """
    if not 0.0 < percentile <= 0.05:
        raise PreconditionError(f"percentile must be in (0, 0.05], got {percentile}")
    if (dark.height, dark.width) != (img.height, img.width):
        raise PreconditionError("dark channel dimensions do not match image")
    n = img.height * img.width
    k = max(1, int(percentile * n))
    order = np.argsort(-dark.data.ravel(), kind="stable")[:k]
    pixels = img.data.reshape(n, 3)[order]
    return AtmosphericLight(values=pixels.mean(axis=0))


def transmission(dark: ImageBuffer, omega: float, t_floor: float = 0.1) -> TransmissionMap:
    """t = 1 - omega * dark, clamped into [t_floor, 1]."""
    if not 0.0 < omega <= 1.0:
        raise PreconditionError(f"omega must be in (0, 1], got {omega}")
    if not 0.0 < t_floor < 1.0:
        raise PreconditionError(f"t_floor must be in (0, 1), got {t_floor}")
    values = np.clip(1.0 - omega * dark.data, t_floor, 1.0)
    return TransmissionMap(values=values, floor=t_floor)


def restore(img: ImageBuffer, t: TransmissionMap, light: AtmosphericLight) -> ImageBuffer:
    """Invert the haze model per channel: J = (I - A) / t + A, clamped."""
    if img.channels != 3:
        raise PreconditionError("restore requires a 3-channel image")
    if t.values.shape != (img.height, img.width):
        raise PreconditionError("transmission dimensions do not match image")
    a = np.asarray(light.values, dtype=np.float64).reshape(1, 1, 3)
    out = (img.data - a) / t.values[:, :, None] + a
    return ImageBuffer(np.clip(out, 0.0, 1.0), img.space)


def multiscale_dark_channel(img: ImageBuffer, radii, weights=None) -> ImageBuffer:
    """Weighted mean of dark channels computed at several patch radii."""
    radii = tuple(radii)
    if not radii:
        raise PreconditionError("need at least one radius")
    if weights is None:
        weights = np.full(len(radii), 1.0 / len(radii))
    else:
        weights = np.asarray(weights, dtype=np.float64)
    if len(weights) != len(radii):
        raise PreconditionError("weights and radii must have the same length")
    if abs(float(weights.sum()) - 1.0) > 1e-9:
        raise PreconditionError("weights must sum to 1")
    out = np.zeros((img.height, img.width), dtype=np.float64)
    for radius, w in zip(radii, weights):
        out += w * dark_channel(img, radius).data
    return ImageBuffer(out, ColorSpace.GRAY)


def compensate_red(img: ImageBuffer, strength: float | None = None) -> ImageBuffer:
    """Red-channel correction R' = R + strength * (G - B); G and B untouched.

    When strength is None it adapts to the red deficit:
    clamp(1 - mean_R / max(mean_G, mean_B), 0, 1), zero for a black image.
    """
    if img.channels != 3:
        raise PreconditionError("red compensation requires a 3-channel image")
    if strength is None:
        mean = channel_stats(img).mean
        denom = max(mean[1], mean[2])
        strength = float(np.clip(1.0 - mean[0] / denom, 0.0, 1.0)) if denom > 0 else 0.0
    out = img.data.copy()
    out[:, :, 0] = np.clip(
        img.data[:, :, 0] + strength * (img.data[:, :, 1] - img.data[:, :, 2]), 0.0, 1.0
    )
    return ImageBuffer(out, img.space)


def dehaze_dcp(img: ImageBuffer, params: DcpParams) -> ImageBuffer:
    """Full single-scale chain: dark channel, airlight, transmission, restore."""
    params.validate()
    dark = dark_channel(img, params.patch_radius)
    light = estimate_airlight(img, dark, params.airlight_percentile)
    t = transmission(dark, params.omega, params.t_floor)
    return restore(img, t, light)


def dehaze_multiscale(img: ImageBuffer, params: DcpParams) -> ImageBuffer:
    """Restoration driven by the multi-scale dark channel, own airlight."""
    params.validate()
    dark = multiscale_dark_channel(
        img, params.multiscale_radii, params.resolved_multiscale_weights()
    )
    light = estimate_airlight(img, dark, params.airlight_percentile)
    t = transmission(dark, params.omega, params.t_floor)
    return restore(img, t, light)
