"""Synthetic 'natural photo' scenes and the underwater-style degradation
applied to them for the directional enhancement tests.

The scenes are structure-dense on purpose: natural photographs carry strong
local contrast at many scales (foliage, gravel, shadows), and a sharpness
measure on a structureless gradient field would see nothing but sensor noise.
"""

import numpy as np
from scipy import ndimage

ATTENUATION = np.array([0.4, 0.8, 0.9])
NOISE_SIGMA = 0.02


def make_scene(rng: np.random.Generator, size: int = 512) -> np.ndarray:
    """A plausible outdoor scene: color fields, a dense object field, texture."""
    ys, xs = np.mgrid[0:size, 0:size].astype(np.float64)
    yy, xx = ys / (size - 1.0), xs / (size - 1.0)

    # large-scale illumination and color gradients
    base = np.empty((size, size, 3))
    phases = rng.uniform(0.0, 2.0 * np.pi, size=(3, 2))
    freqs = rng.uniform(0.6, 1.6, size=(3, 2))
    offsets = np.array([0.52, 0.50, 0.44]) + rng.uniform(-0.04, 0.04, 3)
    for c in range(3):
        wave = 0.10 * np.sin(2 * np.pi * freqs[c, 0] * xx + phases[c, 0])
        wave += 0.08 * np.cos(2 * np.pi * freqs[c, 1] * yy + phases[c, 1])
        base[:, :, c] = offsets[c] + wave
    base[:, :, 0] += 0.06 * (1.0 - yy)  # warmer toward the top

    palette = np.array(
        [
            [0.78, 0.48, 0.30],
            [0.30, 0.55, 0.25],
            [0.85, 0.78, 0.55],
            [0.42, 0.28, 0.22],
            [0.25, 0.40, 0.62],
            [0.88, 0.84, 0.78],
            [0.58, 0.52, 0.20],
            [0.15, 0.18, 0.16],
            [0.70, 0.25, 0.20],
        ]
    )

    # a handful of large objects with soft rims
    for _ in range(rng.integers(4, 7)):
        cy, cx = rng.uniform(0.1, 0.9, 2) * size
        ry, rx = rng.uniform(0.08, 0.2, 2) * size
        color = palette[rng.integers(0, len(palette))] * rng.uniform(0.85, 1.15)
        dist = ((ys - cy) / ry) ** 2 + ((xs - cx) / rx) ** 2
        mask = np.clip(2.0 - 2.0 * dist, 0.0, 1.0)
        base = base * (1.0 - mask[:, :, None]) + color[None, None, :] * mask[:, :, None]

    # dense pebble/foliage field: hard-edged disks with varied reflectance
    for _ in range(400):
        cy, cx = rng.uniform(0.0, 1.0, 2) * size
        rad = rng.uniform(0.005, 0.022) * size
        color = palette[rng.integers(0, len(palette))] * rng.uniform(0.45, 1.45)
        mask = (ys - cy) ** 2 + (xs - cx) ** 2 <= rad**2
        base[mask] = np.clip(color, 0.02, 0.98)

    # high-contrast micro texture
    texture = ndimage.gaussian_filter(rng.normal(0.0, 1.0, (size, size)), 1.0)
    texture /= max(np.abs(texture).max(), 1e-9)
    base += 0.18 * texture[:, :, None]

    return np.clip(base, 0.02, 0.98)


def degrade(scene: np.ndarray, rng: np.random.Generator) -> np.ndarray:
    """Per-channel attenuation toward blue-green plus mild sensor noise."""
    noisy = scene * ATTENUATION + rng.normal(0.0, NOISE_SIGMA, scene.shape)
    return np.clip(noisy, 0.0, 1.0)


def make_pairs(count: int, size: int = 512, seed: int = 777):
    """(clean, degraded) pairs with a deterministic seed sequence."""
    pairs = []
    for i in range(count):
        rng = np.random.default_rng(seed + i)
        clean = make_scene(rng, size)
        pairs.append((clean, degrade(clean, rng)))
    return pairs
