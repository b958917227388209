"""Spectral-attenuation color compensation and perceptual color balance.

The compensation path estimates per-channel attenuation ratios, matches them
against a table of water-type signatures, and blends red-channel, dark-channel,
and multi-scale dark-channel restorations with the matched weights. The
balance path nudges the image's CIELAB mean toward a reference color until the
Euclidean distance hits a target.
"""

from dataclasses import dataclass, field

import numpy as np

from .errors import DegenerateInputError, PreconditionError
from .imgcore import (
    ColorSpace,
    ImageBuffer,
    channel_stats,
    compute_histogram,
    convert,
    quantize_u8,
)
from .priors import DcpParams, compensate_red, dehaze_dcp, dehaze_multiscale


@dataclass
class AttenuationProfile:
    """Normalized channel-mean triple; components sum to 1."""

    red: float
    green: float
    blue: float

    def as_array(self):
        return np.array([self.red, self.green, self.blue])

    def validate(self):
        arr = self.as_array()
        if (arr < 0).any():
            raise PreconditionError("attenuation ratios must be non-negative")
        if abs(float(arr.sum()) - 1.0) > 1e-9:
            raise PreconditionError("attenuation ratios must sum to 1")


@dataclass
class WaterTypeProfile:
    """Named attenuation signature plus fusion weights (red, dcp, multiscale)."""

    name: str
    attenuation: tuple
    weights: tuple

    def validate(self):
        if not self.name:
            raise PreconditionError("water type needs a name")
        att = np.asarray(self.attenuation, dtype=np.float64)
        wts = np.asarray(self.weights, dtype=np.float64)
        if att.shape != (3,) or wts.shape != (3,):
            raise PreconditionError(f"profile {self.name}: triples required")
        if (att < 0).any() or abs(float(att.sum()) - 1.0) > 1e-9:
            raise PreconditionError(f"profile {self.name}: attenuation must be a unit-sum triple")
        if (wts < 0).any() or abs(float(wts.sum()) - 1.0) > 1e-9:
            raise PreconditionError(f"profile {self.name}: weights must be a unit-sum triple")


@dataclass
class WaterTypeTable:
    profiles: list = field(default_factory=list)

    def validate(self):
        if not self.profiles:
            raise PreconditionError("water type table must not be empty")
        names = [p.name for p in self.profiles]
        if len(set(names)) != len(names):
            raise PreconditionError("water type names must be unique")
        for p in self.profiles:
            p.validate()

    def get(self, name: str) -> WaterTypeProfile:
        for p in self.profiles:
            if p.name == name:
                return p
        raise PreconditionError(f"unknown water type {name!r}")

    @classmethod
    def default(cls) -> "WaterTypeTable":
        return cls(
            profiles=[
                WaterTypeProfile("clear", (0.33, 0.34, 0.33), (0.2, 0.4, 0.4)),
                WaterTypeProfile("green-coastal", (0.20, 0.45, 0.35), (0.5, 0.2, 0.3)),
                WaterTypeProfile("deep-blue", (0.15, 0.35, 0.50), (0.6, 0.1, 0.3)),
                WaterTypeProfile("turbid", (0.28, 0.40, 0.32), (0.3, 0.3, 0.4)),
            ]
        )


@dataclass
class BalanceParams:
    reference_lab: tuple = (60.0, 5.0, 10.0)
    delta_e_target: float = 10.0
    step: float = 0.5
    max_iters: int = 20

    def validate(self):
        if self.delta_e_target < 0:
            raise PreconditionError("delta_e_target must be >= 0")
        if not 0.0 < self.step <= 1.0:
            raise PreconditionError("step must be in (0, 1]")
        if self.max_iters < 1:
            raise PreconditionError("max_iters must be >= 1")
        if len(self.reference_lab) != 3:
            raise PreconditionError("reference_lab must be an (L, a, b) triple")


def estimate_attenuation(img: ImageBuffer) -> AttenuationProfile:
    """Channel means normalized to sum 1; invariant under global scaling."""
    if img.channels != 3:
        raise PreconditionError("attenuation estimation requires a 3-channel image")
    mean = channel_stats(img).mean
    total = float(mean.sum())
    if total <= 0.0:
        raise DegenerateInputError("all-black image has no attenuation signature")
    return AttenuationProfile(*(mean / total))


def classify_water_type(
    profile: AttenuationProfile, table: WaterTypeTable, literal_argmax: bool = False
) -> WaterTypeProfile:
    """Pick the signature with the smallest L1 distance (ties: table order).

    ``literal_argmax=True`` selects the farthest signature instead.
    """
    table.validate()
    eta = profile.as_array()
    dists = np.array(
        [np.abs(eta - np.asarray(p.attenuation)).sum() for p in table.profiles]
    )
    idx = int(np.argmax(dists)) if literal_argmax else int(np.argmin(dists))
    return table.profiles[idx]


def fuse_priors(
    img: ImageBuffer, profile: WaterTypeProfile, dcp_params: DcpParams
) -> ImageBuffer:
    """Blend red-compensated, dehazed, and multi-scale-dehazed restorations.

    Zero-weight branches are skipped, so a unit weight vector reproduces that
    branch exactly.
    """
    profile.validate()
    w_red, w_dcp, w_multi = profile.weights
    out = np.zeros_like(img.data)
    if w_red > 0:
        out += w_red * compensate_red(img).data
    if w_dcp > 0:
        out += w_dcp * dehaze_dcp(img, dcp_params).data
    if w_multi > 0:
        out += w_multi * dehaze_multiscale(img, dcp_params).data
    return ImageBuffer(np.clip(out, 0.0, 1.0), img.space)


def gray_world(img: ImageBuffer) -> ImageBuffer:
    """Scale each channel so the channel means equalize; clamps to [0, 1]."""
    if img.channels != 3:
        raise PreconditionError("gray world requires a 3-channel image")
    mean = channel_stats(img).mean
    if (mean <= 0).any():
        raise DegenerateInputError("gray world undefined for a zero channel")
    gains = mean.mean() / mean
    return ImageBuffer(np.clip(img.data * gains, 0.0, 1.0), img.space)


def histogram_match(img: ImageBuffer, ref: ImageBuffer) -> ImageBuffer:
    """Per-channel CDF matching at 256-level resolution.

    Each source level maps to the smallest reference level whose CDF reaches
    the source CDF; the mapping is monotone non-decreasing.
    """
    if img.channels != ref.channels:
        raise PreconditionError("histogram match requires equal channel counts")
    img_hist = compute_histogram(img).bins
    ref_hist = compute_histogram(ref).bins
    n_img = img.width * img.height
    n_ref = ref.width * ref.height
    levels = quantize_u8(img.data)
    out = np.empty_like(img.data)
    for c in range(img.channels):
        cdf_img = np.cumsum(img_hist[c]) / n_img
        cdf_ref = np.cumsum(ref_hist[c]) / n_ref
        mapping = np.minimum(np.searchsorted(cdf_ref, cdf_img, side="left"), 255)
        plane_levels = levels if img.channels == 1 else levels[:, :, c]
        mapped = mapping[plane_levels] / 255.0
        if img.channels == 1:
            out[:] = mapped
        else:
            out[:, :, c] = mapped
    return ImageBuffer(out, img.space)


def lab_mean(img: ImageBuffer) -> tuple:
    """Mean CIELAB triple of an image; handy for building reference colors."""
    lab = convert(img, ColorSpace.CIELAB).data
    mu = lab.reshape(-1, 3).mean(axis=0)
    return (float(mu[0]), float(mu[1]), float(mu[2]))


_CONVERGENCE_WINDOW = 0.5  # stop once |distance - target| falls inside


def perceptual_balance(img: ImageBuffer, params: BalanceParams) -> ImageBuffer:
    """Shift the CIELAB mean toward the reference color in damped steps.

    Each step moves the mean along the line to the reference by
    step * (distance - target), so the gap to the target distance shrinks
    by the factor (1 - step) per iteration.
    """
    if img.channels != 3:
        raise PreconditionError("perceptual balance requires a 3-channel image")
    params.validate()
    lab = convert(img, ColorSpace.CIELAB).data.copy()
    ref = np.asarray(params.reference_lab, dtype=np.float64)
    shifted = False
    for _ in range(params.max_iters):
        mu = lab.reshape(-1, 3).mean(axis=0)
        dist = float(np.linalg.norm(mu - ref))
        err = dist - params.delta_e_target
        if abs(err) <= _CONVERGENCE_WINDOW:
            break
        if dist > 1e-12:
            direction = (ref - mu) / dist
        else:
            direction = np.array([1.0, 0.0, 0.0])  # arbitrary but deterministic
        lab += params.step * err * direction
        shifted = True
    if not shifted:
        return img
    return convert(ImageBuffer(lab, ColorSpace.CIELAB), img.space)


def hsv_adjust(img: ImageBuffer, sat_gain: float, val_gain: float) -> ImageBuffer:
    """Scale saturation and value in HSV; hue is untouched."""
    if img.channels != 3:
        raise PreconditionError("HSV adjustment requires a 3-channel image")
    if sat_gain < 0 or val_gain < 0:
        raise PreconditionError("gains must be non-negative")
    hsv = convert(img, ColorSpace.HSV).data.copy()
    hsv[:, :, 1] = np.clip(hsv[:, :, 1] * sat_gain, 0.0, 1.0)
    hsv[:, :, 2] = np.clip(hsv[:, :, 2] * val_gain, 0.0, 1.0)
    return convert(ImageBuffer(hsv, ColorSpace.HSV), img.space)
