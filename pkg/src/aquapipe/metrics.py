"""No-reference underwater quality metrics plus SSIM and CIELAB distance.

Component conventions (trim fractions, block sizes, Sobel normalization) are
documented here and frozen by tests against an independent straight-line
oracle; the weighted sums are exactly linear in their coefficient vectors.
"""

import math
from dataclasses import dataclass

import numpy as np
from scipy import ndimage

from .errors import DegenerateInputError, PreconditionError
from .imgcore import ColorSpace, ImageBuffer, channel_stats, convert, luminance

UIQM_COEFFS = (0.0282, 0.2953, 3.5753)
UCIQE_COEFFS = (0.4680, 0.2745, 0.2576)

# colorfulness term weights and trim fraction
_UICM_MU_WEIGHT = -0.0268
_UICM_SIGMA_WEIGHT = 0.1586
_TRIM_ALPHA = 0.1

# sharpness term: Rec.601 channel weights, 8x8 blocks over full blocks only
_UISM_WEIGHTS = (0.299, 0.587, 0.114)
_BLOCK = 8

# PLIP operators run on the 8-bit scale with the classical gamma
_PLIP_GAMMA = 1026.0


@dataclass
class MetricReport:
    """Quality numbers for one image (or one image pair)."""

    uiqm: float
    uicm: float
    uism: float
    uiconm: float
    uciqe: float
    channel_proportions: tuple
    ssim: float | None = None
    delta_e76: float | None = None

    def to_dict(self) -> dict:
        return {
            "uiqm": self.uiqm,
            "uicm": self.uicm,
            "uism": self.uism,
            "uiconm": self.uiconm,
            "uciqe": self.uciqe,
            "channel_proportions": list(self.channel_proportions),
            "ssim": self.ssim,
            "delta_e76": self.delta_e76,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "MetricReport":
        return cls(
            uiqm=d["uiqm"],
            uicm=d["uicm"],
            uism=d["uism"],
            uiconm=d["uiconm"],
            uciqe=d["uciqe"],
            channel_proportions=tuple(d["channel_proportions"]),
            ssim=d.get("ssim"),
            delta_e76=d.get("delta_e76"),
        )


# ---------------------------------------------------------------------------
# UIQM components
# ---------------------------------------------------------------------------

def _trimmed_stats(values: np.ndarray, alpha: float = _TRIM_ALPHA):
    """Mean and variance of the samples left after trimming alpha each side."""
    s = np.sort(values.ravel())
    k = s.size
    lo = math.ceil(alpha * k)
    hi = k - math.floor(alpha * k)
    if lo >= hi:
        trimmed = s
    else:
        trimmed = s[lo:hi]
    mu = float(trimmed.mean())
    var = float(((trimmed - mu) ** 2).mean())
    return mu, var


def uicm(img: ImageBuffer) -> float:
    """Colorfulness from trimmed stats of the R-G and (R+G)/2-B planes.

    Like the other components, the planes are taken on the 8-bit scale the
    published coefficients were calibrated for.
    """
    if img.channels != 3:
        raise PreconditionError("UICM requires a 3-channel image")
    scaled = img.data * 255.0
    r, g, b = scaled[:, :, 0], scaled[:, :, 1], scaled[:, :, 2]
    rg = r - g
    yb = (r + g) / 2.0 - b
    mu_rg, var_rg = _trimmed_stats(rg)
    mu_yb, var_yb = _trimmed_stats(yb)
    return _UICM_MU_WEIGHT * math.hypot(mu_rg, mu_yb) + _UICM_SIGMA_WEIGHT * math.sqrt(
        var_rg + var_yb
    )


def _block_reduce(plane: np.ndarray, block: int):
    """Max and min over full blocks; partial edge blocks are dropped."""
    h, w = plane.shape
    k2, k1 = h // block, w // block
    if k1 == 0 or k2 == 0:
        return None, None
    cropped = plane[: k2 * block, : k1 * block].reshape(k2, block, k1, block)
    return cropped.max(axis=(1, 3)), cropped.min(axis=(1, 3))


def _eme(plane: np.ndarray, block: int = _BLOCK) -> float:
    """Log max/min contrast over blocks of an 8-bit-scale plane.

    Block extrema are floored at one intensity level, so near-flat blocks
    contribute about log(max) instead of blowing up or vanishing; an exactly
    flat plane yields 0.
    """
    bmax, bmin = _block_reduce(plane, block)
    if bmax is None:
        return 0.0
    hi = np.maximum(bmax, 1.0)
    lo = np.maximum(bmin, 1.0)
    return float(2.0 / bmax.size * np.log(hi / lo).sum())


def uism(img: ImageBuffer) -> float:
    """Sharpness: per-channel EME of the Sobel-magnitude-weighted plane."""
    if img.channels != 3:
        raise PreconditionError("UISM requires a 3-channel image")
    total = 0.0
    for c, weight in enumerate(_UISM_WEIGHTS):
        plane = img.data[:, :, c]
        gy = ndimage.sobel(plane, axis=0, mode="reflect")
        gx = ndimage.sobel(plane, axis=1, mode="reflect")
        edge = np.hypot(gx, gy) * plane * 255.0
        total += weight * _eme(edge)
    return total


def uiconm(img: ImageBuffer) -> float:
    """Contrast: PLIP log-Michelson measure on 8x8 luminance blocks."""
    if img.channels != 3:
        raise PreconditionError("UIConM requires a 3-channel image")
    gray = luminance(img) * 255.0
    bmax, bmin = _block_reduce(gray, _BLOCK)
    if bmax is None:
        return 0.0
    g = _PLIP_GAMMA
    top = g * (bmax - bmin) / (g - bmin)
    bottom = bmax + bmin - bmax * bmin / g
    with np.errstate(invalid="ignore", divide="ignore"):
        m = np.where(bottom != 0.0, top / np.where(bottom != 0.0, bottom, 1.0), 0.0)
        terms = np.where(m > 0.0, m * np.log(np.where(m > 0.0, m, 1.0)), 0.0)
    s = float(terms.sum())
    w = 1.0 / bmax.size
    return g - g * (1.0 - s / g) ** w


def uiqm(img: ImageBuffer, coeffs=UIQM_COEFFS) -> float:
    """Weighted sum of colorfulness, sharpness, and contrast components."""
    c1, c2, c3 = coeffs
    return c1 * uicm(img) + c2 * uism(img) + c3 * uiconm(img)


# ---------------------------------------------------------------------------
# SSIM, UCIQE, color distance
# ---------------------------------------------------------------------------

_SSIM_C1 = 0.01**2
_SSIM_C2 = 0.03**2
_SSIM_WINDOW = 8


def ssim(x: ImageBuffer, y: ImageBuffer) -> float:
    """Mean local SSIM over uniform 8x8 sliding windows (reflect borders)."""
    if x.channels != 1 or y.channels != 1:
        raise PreconditionError("SSIM requires single-channel buffers")
    if (x.height, x.width) != (y.height, y.width):
        raise PreconditionError("SSIM requires equal dimensions")

    def box(a):
        return ndimage.uniform_filter(a, size=_SSIM_WINDOW, mode="reflect")

    xd, yd = x.data, y.data
    mx, my = box(xd), box(yd)
    vx = box(xd * xd) - mx * mx
    vy = box(yd * yd) - my * my
    cxy = box(xd * yd) - mx * my
    num = (2.0 * mx * my + _SSIM_C1) * (2.0 * cxy + _SSIM_C2)
    den = (mx * mx + my * my + _SSIM_C1) * (vx + vy + _SSIM_C2)
    return float((num / den).mean())


def uciqe(img: ImageBuffer, coeffs=UCIQE_COEFFS) -> float:
    """CIELAB chroma spread, luminance percentile contrast, mean saturation.

    The contrast term is (P99 - P1) of L rescaled to unit range; saturation
    is chroma / sqrt(chroma^2 + L^2) with 0 at black pixels.
    """
    if img.channels != 3:
        raise PreconditionError("UCIQE requires a 3-channel image")
    lab = convert(img, ColorSpace.CIELAB).data
    lum, a, b = lab[:, :, 0], lab[:, :, 1], lab[:, :, 2]
    chroma = np.hypot(a, b)
    sigma_c = float(chroma.std())
    p1, p99 = np.percentile(lum, [1.0, 99.0])
    con_l = float(p99 - p1) / 100.0
    denom = np.sqrt(chroma * chroma + lum * lum)
    sat = np.where(denom > 0.0, chroma / np.where(denom > 0.0, denom, 1.0), 0.0)
    mu_s = float(sat.mean())
    c1, c2, c3 = coeffs
    return c1 * sigma_c + c2 * con_l + c3 * mu_s


def delta_e76(img: ImageBuffer, ref: ImageBuffer) -> float:
    """Mean Euclidean CIELAB distance between two images."""
    if img.channels != 3 or ref.channels != 3:
        raise PreconditionError("delta E requires 3-channel images")
    if (img.height, img.width) != (ref.height, ref.width):
        raise PreconditionError("delta E requires equal dimensions")
    lab_a = convert(img, ColorSpace.CIELAB).data
    lab_b = convert(ref, ColorSpace.CIELAB).data
    diff = lab_a - lab_b
    return float(np.sqrt((diff * diff).sum(axis=2)).mean())


def channel_proportions(img: ImageBuffer) -> tuple:
    """Channel means as percentages of their sum."""
    if img.channels != 3:
        raise PreconditionError("channel proportions require a 3-channel image")
    mean = channel_stats(img).mean
    total = float(mean.sum())
    if total <= 0.0:
        raise DegenerateInputError("all-black image has no channel proportions")
    props = 100.0 * mean / total
    return (float(props[0]), float(props[1]), float(props[2]))


def evaluate(
    img: ImageBuffer,
    ref: ImageBuffer | None = None,
    uiqm_coeffs=UIQM_COEFFS,
    uciqe_coeffs=UCIQE_COEFFS,
) -> MetricReport:
    """Full report for one image; SSIM and delta E appear only with a reference."""
    cm = uicm(img)
    sm = uism(img)
    conm = uiconm(img)
    c1, c2, c3 = uiqm_coeffs
    report = MetricReport(
        uiqm=c1 * cm + c2 * sm + c3 * conm,
        uicm=cm,
        uism=sm,
        uiconm=conm,
        uciqe=uciqe(img, uciqe_coeffs),
        channel_proportions=channel_proportions(img),
    )
    if ref is not None:
        gray_img = convert(img, ColorSpace.GRAY)
        gray_ref = convert(ref, ColorSpace.GRAY)
        report.ssim = ssim(gray_img, gray_ref)
        report.delta_e76 = delta_e76(img, ref)
    return report
