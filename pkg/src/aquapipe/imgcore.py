"""Image representation, codec I/O, color-space conversions, and basic statistics.

Samples are kept as float64 in [0, 1] (CIELAB planes excepted) and quantized to
8 bits only at the file boundary. Gray data has shape (H, W), color data
(H, W, 3). Buffers are immutable once constructed: the wrapped array is marked
read-only, so sharing across threads is safe.
"""

import enum
from dataclasses import dataclass

import numpy as np
from PIL import Image, UnidentifiedImageError

from .errors import ImageFormatError, ImageIOError, PreconditionError


class ColorSpace(enum.Enum):
    SRGB = "srgb"
    LINEAR_RGB = "linear_rgb"
    GRAY = "gray"
    HSV = "hsv"
    CIELAB = "cielab"


class ImageBuffer:
    """A raster of float64 samples plus a color-space tag.

    Construction checks only structure (shape, dtype, channel count); value
    ranges are checked by :meth:`validate`, so intermediate results are free
    to leave [0, 1] until they reach an operation that requires valid input.
    """

    __slots__ = ("data", "space")

    def __init__(self, data: np.ndarray, space: ColorSpace):
        arr = np.asarray(data, dtype=np.float64)
        if arr.ndim == 2:
            pass
        elif arr.ndim == 3 and arr.shape[2] == 3:
            pass
        else:
            raise PreconditionError(
                f"image data must have shape (H, W) or (H, W, 3), got {arr.shape}"
            )
        if arr.shape[0] < 1 or arr.shape[1] < 1:
            raise PreconditionError(f"image dimensions must be positive, got {arr.shape}")
        if not isinstance(space, ColorSpace):
            raise PreconditionError(f"unknown color space: {space!r}")
        if (arr.ndim == 2) != (space == ColorSpace.GRAY):
            raise PreconditionError(
                f"channel count does not match space {space.value}: shape {arr.shape}"
            )
        arr.flags.writeable = False
        self.data = arr
        self.space = space

    @property
    def height(self) -> int:
        return self.data.shape[0]

    @property
    def width(self) -> int:
        return self.data.shape[1]

    @property
    def channels(self) -> int:
        return 1 if self.data.ndim == 2 else 3

    def validate(self) -> None:
        """Raise PreconditionError unless every sample satisfies the space's range."""
        if not np.all(np.isfinite(self.data)):
            raise PreconditionError("image contains non-finite samples")
        if self.space == ColorSpace.CIELAB:
            L = self.data[..., 0]
            ab = self.data[..., 1:]
            if L.min() < 0.0 or L.max() > 100.0:
                raise PreconditionError("CIELAB L out of [0, 100]")
            if ab.min() < -128.0 or ab.max() > 127.0:
                raise PreconditionError("CIELAB a/b out of [-128, 127]")
        else:
            lo, hi = float(self.data.min()), float(self.data.max())
            if lo < 0.0 or hi > 1.0:
                raise PreconditionError(f"samples out of [0, 1]: min={lo}, max={hi}")

    def plane(self, index: int) -> np.ndarray:
        """Return one channel plane as a (H, W) view."""
        if self.data.ndim == 2:
            if index != 0:
                raise PreconditionError("gray image has a single plane")
            return self.data
        return self.data[:, :, index]

    def __repr__(self):
        return f"ImageBuffer({self.width}x{self.height}x{self.channels}, {self.space.value})"


@dataclass
class Histogram:
    """256-bin counts per channel; bins has shape (channels, 256)."""

    bins: np.ndarray
    total: int


@dataclass
class ChannelStats:
    """Per-channel mean, population variance, min, and max (1d arrays)."""

    mean: np.ndarray
    variance: np.ndarray
    minimum: np.ndarray
    maximum: np.ndarray


def quantize_u8(samples: np.ndarray) -> np.ndarray:
    """Map unit-interval samples to 8-bit levels, rounding half up."""
    return np.clip(np.floor(samples * 255.0 + 0.5), 0, 255).astype(np.int64)


# ---------------------------------------------------------------------------
# Codec I/O
# ---------------------------------------------------------------------------

def load_image(path) -> ImageBuffer:
    """Decode a PNG or JPEG file into a unit-interval sRGB (or gray) buffer.

    16-bit grayscale PNGs are down-converted to 8 bits with rounding. Alpha
    channels are dropped via Pillow's RGB conversion.
    """
    try:
        with Image.open(path) as im:
            if im.format not in ("PNG", "JPEG"):
                raise ImageFormatError(f"unsupported format {im.format!r}: {path}")
            im.load()
            mode = im.mode
            if mode in ("I", "I;16", "I;16B", "I;16L"):
                raw = np.asarray(im, dtype=np.float64)
                # 65535 = 255 * 257, so /257 rescales 16-bit to 8-bit range
                data = np.clip(np.floor(raw / 257.0 + 0.5), 0, 255) / 255.0
                return ImageBuffer(data, ColorSpace.GRAY)
            if mode == "1":
                im = im.convert("L")
                mode = "L"
            if mode == "L":
                data = np.asarray(im, dtype=np.float64) / 255.0
                return ImageBuffer(data, ColorSpace.GRAY)
            rgb = im.convert("RGB")
            data = np.asarray(rgb, dtype=np.float64) / 255.0
            return ImageBuffer(data, ColorSpace.SRGB)
    except (FileNotFoundError, IsADirectoryError, PermissionError) as exc:
        raise ImageIOError(f"cannot read {path}: {exc}") from exc
    except UnidentifiedImageError as exc:
        raise ImageFormatError(f"not a decodable image: {path}") from exc
    except (ImageFormatError, ImageIOError):
        raise
    except (OSError, ValueError, SyntaxError) as exc:
        # Pillow signals truncated/corrupt streams through these
        raise ImageFormatError(f"corrupt or unsupported image {path}: {exc}") from exc


def save_image(img: ImageBuffer, path) -> None:
    """Write an SRGB or GRAY buffer as an 8-bit PNG (half-up rounding).

    Buffers holding out-of-range samples are rejected rather than clamped.
    """
    if img.space not in (ColorSpace.SRGB, ColorSpace.GRAY):
        raise PreconditionError(f"cannot save color space {img.space.value}; convert first")
    img.validate()
    levels = quantize_u8(img.data).astype(np.uint8)
    pil = Image.fromarray(levels, mode="L" if img.channels == 1 else "RGB")
    try:
        pil.save(path, format="PNG")
    except OSError as exc:
        raise ImageIOError(f"cannot write {path}: {exc}") from exc


# ---------------------------------------------------------------------------
# Color-space conversions
# ---------------------------------------------------------------------------

# Rec.601 luma weights, applied to gamma-encoded sRGB samples.
_LUMA = np.array([0.299, 0.587, 0.114])

# sRGB -> XYZ (D65). The white point is taken from the row sums so that
# (1,1,1) maps exactly to L=100, a=b=0.
_RGB2XYZ = np.array(
    [
        [0.4124564, 0.3575761, 0.1804375],
        [0.2126729, 0.7151522, 0.0721750],
        [0.0193339, 0.1191920, 0.9503041],
    ]
)
_XYZ2RGB = np.linalg.inv(_RGB2XYZ)
_WHITE = _RGB2XYZ.sum(axis=1)


def srgb_to_linear(srgb: np.ndarray) -> np.ndarray:
    """IEC 61966-2-1 inverse transfer function."""
    srgb = np.asarray(srgb, dtype=np.float64)
    return np.where(srgb <= 0.04045, srgb / 12.92, ((srgb + 0.055) / 1.055) ** 2.4)


def linear_to_srgb(linear: np.ndarray) -> np.ndarray:
    """IEC 61966-2-1 transfer function; input is clipped to [0, 1] first."""
    linear = np.clip(np.asarray(linear, dtype=np.float64), 0.0, 1.0)
    return np.where(
        linear <= 0.0031308, linear * 12.92, 1.055 * linear ** (1.0 / 2.4) - 0.055
    )


def luminance(img: ImageBuffer) -> np.ndarray:
    """Rec.601 luma plane of an SRGB buffer (gray buffers pass through)."""
    if img.channels == 1:
        return img.data
    return img.data @ _LUMA


def _rgb_to_hsv(rgb: np.ndarray) -> np.ndarray:
    r, g, b = rgb[..., 0], rgb[..., 1], rgb[..., 2]
    v = rgb.max(axis=-1)
    c = v - rgb.min(axis=-1)
    s = np.where(v > 0, c / np.where(v > 0, v, 1.0), 0.0)
    with np.errstate(invalid="ignore", divide="ignore"):
        hr = ((g - b) / c) % 6.0
        hg = (b - r) / c + 2.0
        hb = (r - g) / c + 4.0
    h = np.select([c == 0, v == r, v == g], [0.0, hr, hg], default=hb) / 6.0
    return np.stack([h, s, v], axis=-1)


def _hsv_to_rgb(hsv: np.ndarray) -> np.ndarray:
    h, s, v = hsv[..., 0], hsv[..., 1], hsv[..., 2]
    h6 = (h % 1.0) * 6.0
    i = np.floor(h6).astype(np.int64) % 6
    f = h6 - np.floor(h6)
    p = v * (1.0 - s)
    q = v * (1.0 - s * f)
    t = v * (1.0 - s * (1.0 - f))
    r = np.choose(i, [v, q, p, p, t, v])
    g = np.choose(i, [t, v, v, q, p, p])
    b = np.choose(i, [p, p, t, v, v, q])
    return np.stack([r, g, b], axis=-1)


_LAB_DELTA = 6.0 / 29.0


def _lab_f(t: np.ndarray) -> np.ndarray:
    d3 = _LAB_DELTA**3
    return np.where(t > d3, np.cbrt(t), t / (3.0 * _LAB_DELTA**2) + 4.0 / 29.0)


def _lab_f_inv(t: np.ndarray) -> np.ndarray:
    return np.where(t > _LAB_DELTA, t**3, 3.0 * _LAB_DELTA**2 * (t - 4.0 / 29.0))


def _srgb_to_lab(rgb: np.ndarray) -> np.ndarray:
    xyz = srgb_to_linear(rgb) @ _RGB2XYZ.T
    fxyz = _lab_f(xyz / _WHITE)
    L = 116.0 * fxyz[..., 1] - 16.0
    a = 500.0 * (fxyz[..., 0] - fxyz[..., 1])
    b = 200.0 * (fxyz[..., 1] - fxyz[..., 2])
    return np.stack([L, a, b], axis=-1)


def _lab_to_srgb(lab: np.ndarray) -> np.ndarray:
    fy = (lab[..., 0] + 16.0) / 116.0
    fx = fy + lab[..., 1] / 500.0
    fz = fy - lab[..., 2] / 200.0
    xyz = np.stack([_lab_f_inv(fx), _lab_f_inv(fy), _lab_f_inv(fz)], axis=-1) * _WHITE
    # out-of-gamut colors clamp at the linear stage (linear_to_srgb clips)
    return linear_to_srgb(xyz @ _XYZ2RGB.T)


def _to_srgb(img: ImageBuffer) -> ImageBuffer:
    if img.space == ColorSpace.SRGB:
        return img
    if img.space == ColorSpace.LINEAR_RGB:
        return ImageBuffer(linear_to_srgb(img.data), ColorSpace.SRGB)
    if img.space == ColorSpace.GRAY:
        return ImageBuffer(np.repeat(img.data[:, :, None], 3, axis=2), ColorSpace.SRGB)
    if img.space == ColorSpace.HSV:
        return ImageBuffer(_hsv_to_rgb(img.data), ColorSpace.SRGB)
    if img.space == ColorSpace.CIELAB:
        return ImageBuffer(_lab_to_srgb(img.data), ColorSpace.SRGB)
    raise PreconditionError(f"unsupported source space {img.space!r}")


def _from_srgb(img: ImageBuffer, target: ColorSpace) -> ImageBuffer:
    if target == ColorSpace.SRGB:
        return img
    if target == ColorSpace.LINEAR_RGB:
        return ImageBuffer(srgb_to_linear(img.data), ColorSpace.LINEAR_RGB)
    if target == ColorSpace.GRAY:
        return ImageBuffer(luminance(img), ColorSpace.GRAY)
    if target == ColorSpace.HSV:
        return ImageBuffer(_rgb_to_hsv(img.data), ColorSpace.HSV)
    if target == ColorSpace.CIELAB:
        return ImageBuffer(_srgb_to_lab(img.data), ColorSpace.CIELAB)
    raise PreconditionError(f"unsupported target space {target!r}")


def convert(img: ImageBuffer, target: ColorSpace) -> ImageBuffer:
    """Convert between color spaces, routing through sRGB.

    Converting to the buffer's own space returns it unchanged.
    """
    if not isinstance(target, ColorSpace):
        raise PreconditionError(f"unknown color space: {target!r}")
    if target == img.space:
        return img
    return _from_srgb(_to_srgb(img), target)


# ---------------------------------------------------------------------------
# Histogram and statistics
# ---------------------------------------------------------------------------

def compute_histogram(img: ImageBuffer) -> Histogram:
    """256-bin histogram per channel; bin index is floor(sample*255 + 0.5)."""
    levels = quantize_u8(img.data)
    if img.channels == 1:
        bins = np.bincount(levels.ravel(), minlength=256)[None, :]
    else:
        bins = np.stack(
            [np.bincount(levels[:, :, c].ravel(), minlength=256) for c in range(3)]
        )
    return Histogram(bins=bins, total=img.width * img.height)


def channel_stats(img: ImageBuffer) -> ChannelStats:
    """Exact per-channel mean, population variance, min, and max."""
    if img.channels == 1:
        flat = img.data.reshape(1, -1)
    else:
        flat = img.data.reshape(-1, 3).T
    # variance of the offset data is identical but exactly zero for constants
    shifted = flat - flat[:, :1]
    return ChannelStats(
        mean=flat.mean(axis=1),
        variance=shifted.var(axis=1),
        minimum=flat.min(axis=1),
        maximum=flat.max(axis=1),
    )
