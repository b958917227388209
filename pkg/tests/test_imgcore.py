import math

import numpy as np
import pytest
from PIL import Image

from aquapipe import (
    ColorSpace,
    ImageBuffer,
    ImageFormatError,
    ImageIOError,
    PreconditionError,
    channel_stats,
    compute_histogram,
    convert,
    load_image,
    save_image,
)
from conftest import constant_gray, constant_rgb, make_rgb


def write_gray_png(path, values):
    Image.fromarray(np.asarray(values, dtype=np.uint8), mode="L").save(path, format="PNG")


class TestLoadImage:
    def test_normalizes_bytes(self, tmp_path):
        path = tmp_path / "g.png"
        write_gray_png(path, [[0, 128], [255, 64]])
        img = load_image(path)
        assert img.space == ColorSpace.GRAY
        assert np.array_equal(img.data, np.array([[0, 128], [255, 64]]) / 255.0)

    def test_rgb_png(self, tmp_path):
        path = tmp_path / "c.png"
        data = np.arange(2 * 3 * 3, dtype=np.uint8).reshape(2, 3, 3)
        Image.fromarray(data, mode="RGB").save(path, format="PNG")
        img = load_image(path)
        assert img.channels == 3
        assert np.array_equal(img.data, data / 255.0)

    def test_jpeg_accepted(self, tmp_path):
        path = tmp_path / "c.jpg"
        data = np.full((8, 8, 3), 200, dtype=np.uint8)
        Image.fromarray(data, mode="RGB").save(path, format="JPEG")
        img = load_image(path)
        assert img.space == ColorSpace.SRGB

    def test_missing_file_is_io_error(self, tmp_path):
        with pytest.raises(ImageIOError):
            load_image(tmp_path / "nope.png")

    def test_truncated_file_is_format_error(self, tmp_path):
        path = tmp_path / "t.png"
        write_gray_png(path, np.zeros((32, 32)))
        raw = path.read_bytes()
        path.write_bytes(raw[: len(raw) // 2])
        with pytest.raises(ImageFormatError):
            load_image(path)

    def test_non_image_is_format_error(self, tmp_path):
        path = tmp_path / "x.png"
        path.write_bytes(b"definitely not a png")
        with pytest.raises(ImageFormatError):
            load_image(path)

    def test_unsupported_format_rejected(self, tmp_path):
        path = tmp_path / "b.bmp"
        Image.fromarray(np.zeros((4, 4), dtype=np.uint8), mode="L").save(path, format="BMP")
        with pytest.raises(ImageFormatError):
            load_image(path)

    def test_16bit_png_downconverts_with_rounding(self, tmp_path):
        path = tmp_path / "deep.png"
        values = np.array([[0, 257, 65535, 32896]], dtype=np.uint16)  # 32896 = 128*257
        Image.fromarray(values).save(path, format="PNG")
        img = load_image(path)
        expected = np.array([[0, 1, 255, 128]]) / 255.0
        assert np.array_equal(img.data, expected)


class TestSaveImage:
    def test_round_half_up(self, tmp_path):
        img = ImageBuffer(np.array([[1.0, 128 / 255.0, 0.0, 0.5]]), ColorSpace.GRAY)
        path = tmp_path / "o.png"
        save_image(img, path)
        back = np.asarray(Image.open(path))
        assert back.tolist() == [[255, 128, 0, 128]]

    def test_out_of_range_rejected(self, tmp_path):
        img = ImageBuffer(np.array([[1.2]]), ColorSpace.GRAY)
        with pytest.raises(PreconditionError):
            save_image(img, tmp_path / "bad.png")

    def test_hsv_buffer_rejected(self, tmp_path, rng):
        hsv = convert(make_rgb(rng), ColorSpace.HSV)
        with pytest.raises(PreconditionError):
            save_image(hsv, tmp_path / "bad.png")

    def test_load_save_round_trip_is_lossless(self, tmp_path, rng):
        path_a = tmp_path / "a.png"
        path_b = tmp_path / "b.png"
        original = rng.integers(0, 256, size=(12, 9, 3), dtype=np.uint8)
        Image.fromarray(original, mode="RGB").save(path_a, format="PNG")
        save_image(load_image(path_a), path_b)
        assert np.array_equal(np.asarray(Image.open(path_b)), original)


class TestBufferInvariants:
    def test_shape_checks(self):
        with pytest.raises(PreconditionError):
            ImageBuffer(np.zeros((4, 4, 2)), ColorSpace.SRGB)
        with pytest.raises(PreconditionError):
            ImageBuffer(np.zeros((4, 4)), ColorSpace.SRGB)
        with pytest.raises(PreconditionError):
            ImageBuffer(np.zeros((4, 4, 3)), ColorSpace.GRAY)

    def test_data_is_read_only(self, rng):
        img = make_rgb(rng)
        with pytest.raises(ValueError):
            img.data[0, 0, 0] = 0.5

    def test_validate_flags_nan(self):
        img = ImageBuffer(np.array([[np.nan]]), ColorSpace.GRAY)
        with pytest.raises(PreconditionError):
            img.validate()


class TestConvert:
    def test_same_space_identity(self, rng):
        img = make_rgb(rng)
        assert convert(img, ColorSpace.SRGB) is img

    def test_white_maps_to_lab_white(self):
        lab = convert(constant_rgb((1.0, 1.0, 1.0)), ColorSpace.CIELAB)
        assert abs(lab.data[0, 0, 0] - 100.0) <= 0.01
        assert abs(lab.data[0, 0, 1]) <= 0.01
        assert abs(lab.data[0, 0, 2]) <= 0.01

    def test_achromatic_hsv(self):
        hsv = convert(constant_rgb((0.5, 0.5, 0.5)), ColorSpace.HSV)
        assert np.all(hsv.data[:, :, 1] == 0.0)
        assert np.all(hsv.data[:, :, 2] == 0.5)

    def test_lab_round_trip(self, rng):
        img = ImageBuffer(rng.random((1000, 1, 3)), ColorSpace.SRGB)
        back = convert(convert(img, ColorSpace.CIELAB), ColorSpace.SRGB)
        assert np.max(np.abs(back.data - img.data)) <= 1e-4

    def test_hsv_round_trip(self, rng):
        img = ImageBuffer(rng.random((1000, 1, 3)), ColorSpace.SRGB)
        back = convert(convert(img, ColorSpace.HSV), ColorSpace.SRGB)
        assert np.max(np.abs(back.data - img.data)) <= 1e-5

    def test_linear_round_trip(self, rng):
        img = make_rgb(rng)
        back = convert(convert(img, ColorSpace.LINEAR_RGB), ColorSpace.SRGB)
        assert np.max(np.abs(back.data - img.data)) <= 1e-12

    def test_gray_conversion_weights(self):
        red = convert(constant_rgb((1.0, 0.0, 0.0)), ColorSpace.GRAY)
        assert np.allclose(red.data, 0.299)

    def test_lab_ranges_cover_srgb_gamut(self, rng):
        img = ImageBuffer(rng.random((64, 64, 3)), ColorSpace.SRGB)
        lab = convert(img, ColorSpace.CIELAB)
        lab.validate()


class TestHistogram:
    def test_constant_single_bin(self):
        hist = compute_histogram(constant_gray(0.5))
        assert hist.bins[0, 128] == 64
        assert hist.bins.sum() == 64

    def test_expected_bins(self):
        img = ImageBuffer(np.array([[0.0, 85 / 255.0], [170 / 255.0, 1.0]]), ColorSpace.GRAY)
        hist = compute_histogram(img)
        for level in (0, 85, 170, 255):
            assert hist.bins[0, level] == 1

    def test_bin_sum_equals_pixel_count(self, rng):
        img = make_rgb(rng, 13, 7)
        hist = compute_histogram(img)
        assert hist.total == 13 * 7
        assert np.all(hist.bins.sum(axis=1) == hist.total)


class TestChannelStats:
    def test_constant(self):
        stats = channel_stats(constant_rgb(0.3))
        assert np.allclose(stats.mean, 0.3)
        assert np.all(stats.variance == 0.0)

    def test_two_pixel_hand_values(self):
        img = ImageBuffer(np.array([[0.0], [1.0]]), ColorSpace.GRAY)
        stats = channel_stats(img)
        assert stats.mean[0] == 0.5
        assert stats.variance[0] == 0.25  # population variance
        assert stats.minimum[0] == 0.0 and stats.maximum[0] == 1.0

    def test_mean_matches_direct_summation(self, rng):
        img = make_rgb(rng, 17, 11)
        stats = channel_stats(img)
        for c in range(3):
            direct = math.fsum(img.data[:, :, c].ravel()) / (17 * 11)
            assert abs(stats.mean[c] - direct) <= 1e-12

    def test_min_mean_max_ordering(self, rng):
        stats = channel_stats(make_rgb(rng))
        assert np.all(stats.minimum <= stats.mean)
        assert np.all(stats.mean <= stats.maximum)
        assert np.all(stats.variance >= 0.0)
