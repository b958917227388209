"""Independent brute-force reference implementations used by the tests.

Everything here is deliberately slow and literal: pixel loops, dense windows,
full sorts. Border handling is half-sample symmetric via np.pad, matching the
package's documented convention.
"""

import math

import numpy as np


def gaussian_kernel_dense(sigma: float) -> np.ndarray:
    r = math.ceil(3.0 * sigma)
    ys, xs = np.mgrid[-r : r + 1, -r : r + 1]
    k = np.exp(-(ys**2 + xs**2) / (2.0 * sigma * sigma))
    return k / k.sum()


def conv2d_dense(plane: np.ndarray, kernel: np.ndarray) -> np.ndarray:
    r = kernel.shape[0] // 2
    padded = np.pad(plane, r, mode="symmetric")
    h, w = plane.shape
    out = np.empty_like(plane)
    for y in range(h):
        for x in range(w):
            out[y, x] = (padded[y : y + 2 * r + 1, x : x + 2 * r + 1] * kernel).sum()
    return out


def bilateral_dense(plane: np.ndarray, sigma_s: float, sigma_r: float) -> np.ndarray:
    r = math.ceil(3.0 * sigma_s)
    ys, xs = np.mgrid[-r : r + 1, -r : r + 1]
    spatial = np.exp(-(ys**2 + xs**2) / (2.0 * sigma_s * sigma_s))
    padded = np.pad(plane, r, mode="symmetric")
    h, w = plane.shape
    out = np.empty_like(plane)
    for y in range(h):
        for x in range(w):
            win = padded[y : y + 2 * r + 1, x : x + 2 * r + 1]
            wgt = spatial * np.exp(-((win - plane[y, x]) ** 2) / (2.0 * sigma_r * sigma_r))
            out[y, x] = (wgt * win).sum() / wgt.sum()
    return out


def box_mean_dense(plane: np.ndarray, radius: int) -> np.ndarray:
    padded = np.pad(plane, radius, mode="symmetric")
    h, w = plane.shape
    out = np.empty_like(plane)
    for y in range(h):
        for x in range(w):
            out[y, x] = padded[y : y + 2 * radius + 1, x : x + 2 * radius + 1].mean()
    return out


def guided_dense(plane: np.ndarray, guide: np.ndarray, radius: int, eps: float) -> np.ndarray:
    mean_g = box_mean_dense(guide, radius)
    mean_p = box_mean_dense(plane, radius)
    cov = box_mean_dense(guide * plane, radius) - mean_g * mean_p
    var = box_mean_dense(guide * guide, radius) - mean_g * mean_g
    a = cov / (var + eps)
    b = mean_p - a * mean_g
    return box_mean_dense(a, radius) * guide + box_mean_dense(b, radius)


def window_variance_dense(plane: np.ndarray, radius: int) -> np.ndarray:
    padded = np.pad(plane, radius, mode="symmetric")
    h, w = plane.shape
    out = np.empty_like(plane)
    for y in range(h):
        for x in range(w):
            win = padded[y : y + 2 * radius + 1, x : x + 2 * radius + 1]
            out[y, x] = win.var()
    return out


def equalize_dense(plane: np.ndarray) -> np.ndarray:
    """Brute-force equalization: per pixel, count samples at or below its level."""
    levels = np.floor(plane * 255.0 + 0.5).astype(np.int64)
    n = plane.size
    flat = levels.ravel()
    out = np.empty(plane.size, dtype=np.float64)
    for i, lv in enumerate(flat):
        out[i] = np.count_nonzero(flat <= lv) / n
    return out.reshape(plane.shape)


def dark_channel_dense(rgb: np.ndarray, radius: int) -> np.ndarray:
    per_pixel = rgb.min(axis=2)
    if radius == 0:
        return per_pixel
    padded = np.pad(per_pixel, radius, mode="symmetric")
    h, w = per_pixel.shape
    out = np.empty_like(per_pixel)
    for y in range(h):
        for x in range(w):
            out[y, x] = padded[y : y + 2 * radius + 1, x : x + 2 * radius + 1].min()
    return out


def airlight_dense(rgb: np.ndarray, dark: np.ndarray, percentile: float) -> np.ndarray:
    n = dark.size
    k = max(1, int(percentile * n))
    flat_dark = dark.ravel()
    order = sorted(range(n), key=lambda i: (-flat_dark[i], i))[:k]
    pixels = rgb.reshape(n, 3)[order]
    return pixels.mean(axis=0)


def lowpass_dense(plane: np.ndarray, cutoff: float) -> np.ndarray:
    """Frequency-domain Gaussian low-pass, independent reimplementation."""
    h, w = plane.shape
    cy, cx = h // 2, w // 2
    ys, xs = np.mgrid[0:h, 0:w]
    d2 = (ys - cy) ** 2.0 + (xs - cx) ** 2.0
    d0 = cutoff * min(h, w) / 2.0
    mask = np.exp(-d2 / (2.0 * d0 * d0))
    spec = np.fft.fftshift(np.fft.fft2(plane)) * mask
    return np.clip(np.real(np.fft.ifft2(np.fft.ifftshift(spec))), 0.0, 1.0)
