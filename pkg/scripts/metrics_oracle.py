#!/usr/bin/env python3
"""Generate golden metric values for the fixed synthetic test card.

This is a deliberately slow, straight-line evaluation of the metric component
formulas: scalar CIELAB conversion, explicit Sobel kernels, Python block
loops, manual percentiles. It shares no code with the package. Run once to
(re)generate tests/golden/metrics_card.json:

    python scripts/metrics_oracle.py
"""

import json
import math
from pathlib import Path

import numpy as np

CARD_SIZE = 64
UIQM_COEFFS = (0.0282, 0.2953, 3.5753)
UCIQE_COEFFS = (0.4680, 0.2745, 0.2576)


def make_test_card(size: int = CARD_SIZE) -> np.ndarray:
    """Deterministic 64x64 RGB card: gradients, disks, stripes, mild noise."""
    rng = np.random.default_rng(987654321)
    yy, xx = np.mgrid[0:size, 0:size] / (size - 1.0)
    r = 0.25 + 0.5 * xx
    g = 0.30 + 0.4 * yy
    b = 0.45 + 0.3 * (1.0 - xx) * yy
    card = np.stack([r, g, b], axis=-1)

    def disk(cy, cx, rad, color):
        mask = (yy * (size - 1) - cy) ** 2 + (xx * (size - 1) - cx) ** 2 <= rad**2
        for c in range(3):
            chan = card[:, :, c]
            chan[mask] = color[c]

    disk(18, 20, 9, (0.9, 0.2, 0.15))
    disk(44, 40, 12, (0.1, 0.7, 0.3))
    disk(30, 52, 6, (0.95, 0.9, 0.2))
    card[8:12, :, :] = 0.05
    card[:, 30:33, :] = 0.85
    card += rng.normal(0.0, 0.01, card.shape)
    return np.clip(card, 0.0, 1.0)


# ---------------------------------------------------------------------------
# Straight-line component formulas
# ---------------------------------------------------------------------------

def trimmed_mean_var(values, alpha=0.1):
    s = sorted(values)
    k = len(s)
    lo = math.ceil(alpha * k)
    hi = k - math.floor(alpha * k)
    trimmed = s[lo:hi] if lo < hi else s
    mu = sum(trimmed) / len(trimmed)
    var = sum((v - mu) ** 2 for v in trimmed) / len(trimmed)
    return mu, var


def oracle_uicm(card):
    r = (card[:, :, 0] * 255.0).ravel()
    g = (card[:, :, 1] * 255.0).ravel()
    b = (card[:, :, 2] * 255.0).ravel()
    rg = [ri - gi for ri, gi in zip(r, g)]
    yb = [(ri + gi) / 2.0 - bi for ri, gi, bi in zip(r, g, b)]
    mu_rg, var_rg = trimmed_mean_var(rg)
    mu_yb, var_yb = trimmed_mean_var(yb)
    return -0.0268 * math.sqrt(mu_rg**2 + mu_yb**2) + 0.1586 * math.sqrt(var_rg + var_yb)


_SOBEL_Y = np.array([[-1, -2, -1], [0, 0, 0], [1, 2, 1]], dtype=np.float64)
_SOBEL_X = _SOBEL_Y.T


def sobel_magnitude(plane):
    padded = np.pad(plane, 1, mode="symmetric")
    h, w = plane.shape
    out = np.empty_like(plane)
    for y in range(h):
        for x in range(w):
            win = padded[y : y + 3, x : x + 3]
            gy = float((win * _SOBEL_Y).sum())
            gx = float((win * _SOBEL_X).sum())
            out[y, x] = math.sqrt(gy * gy + gx * gx)
    return out


def eme(plane, block=8):
    """Block extrema are floored at one intensity level of the 8-bit scale."""
    h, w = plane.shape
    k2, k1 = h // block, w // block
    total = 0.0
    for i in range(k2):
        for j in range(k1):
            tile = plane[i * block : (i + 1) * block, j * block : (j + 1) * block]
            lo, hi = max(tile.min(), 1.0), max(tile.max(), 1.0)
            total += math.log(hi / lo)
    return 2.0 / (k1 * k2) * total


def oracle_uism(card):
    total = 0.0
    for c, weight in zip(range(3), (0.299, 0.587, 0.114)):
        plane = card[:, :, c]
        total += weight * eme(sobel_magnitude(plane) * plane * 255.0)
    return total


def oracle_uiconm(card, gamma=1026.0, block=8):
    gray = (
        0.299 * card[:, :, 0] + 0.587 * card[:, :, 1] + 0.114 * card[:, :, 2]
    ) * 255.0
    h, w = gray.shape
    k2, k1 = h // block, w // block
    s = 0.0
    for i in range(k2):
        for j in range(k1):
            tile = gray[i * block : (i + 1) * block, j * block : (j + 1) * block]
            lo, hi = float(tile.min()), float(tile.max())
            top = gamma * (hi - lo) / (gamma - lo)
            bottom = hi + lo - hi * lo / gamma
            m = top / bottom if bottom != 0.0 else 0.0
            if m > 0.0:
                s += m * math.log(m)
    weight = 1.0 / (k1 * k2)
    return gamma - gamma * (1.0 - s / gamma) ** weight


def srgb_to_lab_pixel(r, g, b):
    def to_linear(u):
        return u / 12.92 if u <= 0.04045 else ((u + 0.055) / 1.055) ** 2.4

    rl, gl, bl = to_linear(r), to_linear(g), to_linear(b)
    x = 0.4124564 * rl + 0.3575761 * gl + 0.1804375 * bl
    y = 0.2126729 * rl + 0.7151522 * gl + 0.0721750 * bl
    z = 0.0193339 * rl + 0.1191920 * gl + 0.9503041 * bl
    xn = 0.4124564 + 0.3575761 + 0.1804375
    yn = 0.2126729 + 0.7151522 + 0.0721750
    zn = 0.0193339 + 0.1191920 + 0.9503041
    delta = 6.0 / 29.0

    def f(t):
        return t ** (1.0 / 3.0) if t > delta**3 else t / (3 * delta**2) + 4.0 / 29.0

    fx, fy, fz = f(x / xn), f(y / yn), f(z / zn)
    return 116.0 * fy - 16.0, 500.0 * (fx - fy), 200.0 * (fy - fz)


def manual_percentile(sorted_values, q):
    rank = q / 100.0 * (len(sorted_values) - 1)
    lo = math.floor(rank)
    hi = math.ceil(rank)
    frac = rank - lo
    return sorted_values[lo] * (1.0 - frac) + sorted_values[hi] * frac


def oracle_uciqe(card):
    h, w, _ = card.shape
    lum, chroma, sat = [], [], []
    for y in range(h):
        for x in range(w):
            big_l, a, b = srgb_to_lab_pixel(*card[y, x])
            c = math.sqrt(a * a + b * b)
            lum.append(big_l)
            chroma.append(c)
            denom = math.sqrt(c * c + big_l * big_l)
            sat.append(c / denom if denom > 0 else 0.0)
    mean_c = sum(chroma) / len(chroma)
    sigma_c = math.sqrt(sum((c - mean_c) ** 2 for c in chroma) / len(chroma))
    lum_sorted = sorted(lum)
    con_l = (manual_percentile(lum_sorted, 99.0) - manual_percentile(lum_sorted, 1.0)) / 100.0
    mu_s = sum(sat) / len(sat)
    c1, c2, c3 = UCIQE_COEFFS
    return c1 * sigma_c + c2 * con_l + c3 * mu_s


def main():
    card = make_test_card()
    uicm = oracle_uicm(card)
    uism = oracle_uism(card)
    uiconm = oracle_uiconm(card)
    c1, c2, c3 = UIQM_COEFFS
    golden = {
        "card_size": CARD_SIZE,
        "uicm": uicm,
        "uism": uism,
        "uiconm": uiconm,
        "uiqm": c1 * uicm + c2 * uism + c3 * uiconm,
        "uciqe": oracle_uciqe(card),
    }
    out = Path(__file__).resolve().parent.parent / "tests" / "golden" / "metrics_card.json"
    out.parent.mkdir(parents=True, exist_ok=True)
    out.write_text(json.dumps(golden, indent=2) + "\n", encoding="utf-8")
    print(f"wrote {out}")
    for key, value in golden.items():
        print(f"  {key}: {value}")


if __name__ == "__main__":
    main()
