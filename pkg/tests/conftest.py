import sys
from pathlib import Path

import numpy as np
import pytest

from aquapipe import ColorSpace, ImageBuffer

sys.path.insert(0, str(Path(__file__).parent))


@pytest.fixture
def rng():
    return np.random.default_rng(20240901)


def make_rgb(rng, h=16, w=16):
    return ImageBuffer(rng.random((h, w, 3)), ColorSpace.SRGB)


def make_gray(rng, h=16, w=16):
    return ImageBuffer(rng.random((h, w)), ColorSpace.GRAY)


def constant_rgb(value, h=8, w=8):
    data = np.broadcast_to(np.asarray(value, dtype=np.float64), (h, w, 3)).copy()
    return ImageBuffer(data, ColorSpace.SRGB)


def constant_gray(value, h=8, w=8):
    return ImageBuffer(np.full((h, w), float(value)), ColorSpace.GRAY)
