"""Acceptance gates: one test per criterion, each printing a PASS line.

Run with `pytest tests/test_acceptance.py -v -s` to see the per-criterion
lines; every tolerance and runtime bound is asserted in-test.
"""

import json
import time

import numpy as np
import yaml
from click.testing import CliRunner

from aquapipe import (
    ColorSpace,
    DcpParams,
    DenoiseParams,
    ImageBuffer,
    PipelineConfig,
    WaterTypeProfile,
    adaptive_denoise,
    bilateral_filter,
    compensate_red,
    convert,
    dark_channel,
    dehaze_dcp,
    dehaze_multiscale,
    delta_e76,
    dft_forward,
    dft_inverse,
    enhance,
    estimate_noise,
    fuse_priors,
    gaussian_filter,
    guided_filter,
    highpass_filter,
    hist_equalize,
    run_batch,
    ssim,
    uciqe,
    uiqm,
    wavelet_decompose,
    wavelet_reconstruct,
)
from aquapipe.cli import main as cli_main
from aquapipe.config import STAGES
from aquapipe.imgcore import quantize_u8
from aquapipe.metrics import channel_proportions
from conftest import constant_gray, constant_rgb
from oracles import (
    bilateral_dense,
    dark_channel_dense,
    equalize_dense,
    guided_dense,
    window_variance_dense,
)
from synthetic import make_pairs


def _announce(number, text):
    print(f"[criterion {number}] PASS: {text}")


def _quantized(img: ImageBuffer) -> ImageBuffer:
    return ImageBuffer(quantize_u8(img.data) / 255.0, img.space)


def test_criterion_1_round_trips():
    started = time.perf_counter()
    rng = np.random.default_rng(11)

    for shape in ((16, 16), (13, 21), (32, 17)):
        img = ImageBuffer(rng.random(shape), ColorSpace.GRAY)
        back = dft_inverse(dft_forward(img))
        assert np.max(np.abs(back.data - img.data)) <= 1e-6

    for shape, levels in (((16, 16), 3), ((15, 13), 2), ((21, 9), 2)):
        img = ImageBuffer(rng.random(shape), ColorSpace.GRAY)
        back = wavelet_reconstruct(wavelet_decompose(img, levels))
        assert np.max(np.abs(back.data - img.data)) <= 1e-6

    pixels = ImageBuffer(rng.random((1000, 1, 3)), ColorSpace.SRGB)
    hsv_back = convert(convert(pixels, ColorSpace.HSV), ColorSpace.SRGB)
    assert np.max(np.abs(hsv_back.data - pixels.data)) <= 1e-5
    lab_back = convert(convert(pixels, ColorSpace.CIELAB), ColorSpace.SRGB)
    assert np.max(np.abs(lab_back.data - pixels.data)) <= 1e-4

    elapsed = time.perf_counter() - started
    assert elapsed < 5.0
    _announce(1, f"DFT/Haar <=1e-6, HSV <=1e-5, CIELAB <=1e-4 round trips ({elapsed:.2f}s)")


def test_criterion_2_oracle_suite():
    started = time.perf_counter()
    rng = np.random.default_rng(22)
    count = 0

    for _ in range(40):
        h, w = rng.integers(8, 17, 2)
        plane = rng.random((h, w))
        img = ImageBuffer(plane, ColorSpace.GRAY)
        assert np.array_equal(hist_equalize(img).data, equalize_dense(plane))
        count += 1

    for _ in range(30):
        h, w = rng.integers(8, 17, 2)
        data = rng.random((h, w, 3))
        img = ImageBuffer(data, ColorSpace.SRGB)
        radius = int(rng.integers(1, 3))
        assert np.array_equal(dark_channel(img, radius).data, dark_channel_dense(data, radius))
        count += 1

    for _ in range(12):
        h, w = rng.integers(8, 17, 2)
        plane = rng.random((h, w))
        out = bilateral_filter(ImageBuffer(plane, ColorSpace.GRAY), 1.0, 0.1)
        assert np.max(np.abs(out.data - bilateral_dense(plane, 1.0, 0.1))) <= 1e-6
        count += 1

    for _ in range(12):
        h, w = rng.integers(8, 17, 2)
        plane = rng.random((h, w))
        guide = rng.random((h, w))
        out = guided_filter(
            ImageBuffer(plane, ColorSpace.GRAY), ImageBuffer(guide, ColorSpace.GRAY), 2, 1e-3
        )
        expected = np.clip(guided_dense(plane, guide, 2, 1e-3), 0.0, 1.0)
        assert np.max(np.abs(out.data - expected)) <= 1e-6
        count += 1

    for _ in range(12):
        h, w = rng.integers(8, 17, 2)
        plane = rng.random((h, w))
        nm = estimate_noise(ImageBuffer(plane, ColorSpace.GRAY), 2)
        assert np.max(np.abs(nm.values - window_variance_dense(plane, 2))) <= 1e-6
        count += 1

    elapsed = time.perf_counter() - started
    assert count >= 100
    assert elapsed < 30.0
    _announce(2, f"{count} random images vs dense oracles ({elapsed:.2f}s)")


def test_criterion_3_dcp_inversion():
    started = time.perf_counter()
    rng = np.random.default_rng(33)
    from aquapipe import AtmosphericLight, TransmissionMap, restore

    light = np.array([0.85, 0.9, 0.95])
    for t_value in (0.3, 0.5, 0.8):
        clean = rng.random((48, 48, 3))
        hazed = clean * t_value + light * (1.0 - t_value)
        img = ImageBuffer(hazed, ColorSpace.SRGB)
        t = TransmissionMap(values=np.full((48, 48), t_value), floor=0.1)
        recovered = restore(img, t, AtmosphericLight(values=light))
        saturated = (recovered.data <= 0.0) | (recovered.data >= 1.0)
        errors = np.abs(recovered.data - clean)[~saturated]
        assert errors.max() <= 1e-3

    elapsed = time.perf_counter() - started
    assert elapsed < 5.0
    _announce(3, f"synthetic haze inverted to <=1e-3 at t=0.3/0.5/0.8 ({elapsed:.2f}s)")


def test_criterion_4_metric_identities():
    rng = np.random.default_rng(44)
    x = ImageBuffer(rng.random((20, 20)), ColorSpace.GRAY)
    y = ImageBuffer(rng.random((20, 20)), ColorSpace.GRAY)
    assert abs(ssim(x, x) - 1.0) <= 1e-12
    assert abs(ssim(x, y) - ssim(y, x)) <= 1e-12

    rgb = ImageBuffer(rng.random((20, 20, 3)), ColorSpace.SRGB)
    assert delta_e76(rgb, rgb) == 0.0

    a = np.array([0.4, -1.2, 0.9])
    b = np.array([1.5, 0.3, -0.6])
    assert abs(uiqm(rgb, tuple(a + b)) - (uiqm(rgb, tuple(a)) + uiqm(rgb, tuple(b)))) <= 1e-12
    assert abs(uciqe(rgb, tuple(a + b)) - (uciqe(rgb, tuple(a)) + uciqe(rgb, tuple(b)))) <= 1e-12

    assert abs(sum(channel_proportions(rgb)) - 100.0) <= 0.01
    _announce(4, "ssim/deltaE identities, coefficient linearity, proportion sum")


def test_criterion_5_fixed_points_and_branches():
    rng = np.random.default_rng(55)

    flat_rgb = constant_rgb(0.44, 16, 16)
    flat_gray = constant_gray(0.44, 16, 16)
    fixed_outputs = [
        gaussian_filter(flat_rgb, 2.0).data,
        bilateral_filter(flat_rgb, 1.5, 0.1).data,
        guided_filter(flat_rgb, flat_rgb, 2, 1e-3).data,
        highpass_filter(flat_gray, 0.25).data,
        adaptive_denoise(flat_rgb, DenoiseParams()).image.data,
        wavelet_reconstruct(wavelet_decompose(flat_gray, 2)).data,
        dft_inverse(dft_forward(flat_gray)).data,
    ]
    for out in fixed_outputs:
        assert np.max(np.abs(out - 0.44)) <= 1e-12

    img = ImageBuffer(rng.random((12, 12, 3)), ColorSpace.SRGB)
    params = DcpParams(patch_radius=2, multiscale_radii=(1, 2))
    branch_outputs = (
        compensate_red(img).data,
        dehaze_dcp(img, params).data,
        dehaze_multiscale(img, params).data,
    )
    for idx, expected in enumerate(branch_outputs):
        weights = [0.0, 0.0, 0.0]
        weights[idx] = 1.0
        profile = WaterTypeProfile("unit", (1 / 3, 1 / 3, 1 / 3), tuple(weights))
        assert np.array_equal(fuse_priors(img, profile, params).data, expected)

    cfg = PipelineConfig.default()
    for stage in STAGES:
        setattr(cfg.stages, stage, False)
    out, _ = enhance(img, cfg)
    assert out.data is img.data

    _announce(5, "constant fixed points, unit-weight branch reproduction, identity pipeline")


def test_criterion_6_directional_enhancement():
    started = time.perf_counter()
    pairs = make_pairs(10, size=512)
    cfg = PipelineConfig.default()

    uiqm_wins = de_wins = spread_wins = 0
    for clean, degraded in pairs:
        clean_img = ImageBuffer(clean, ColorSpace.SRGB)
        degraded_img = ImageBuffer(degraded, ColorSpace.SRGB)
        out, record = enhance(degraded_img, cfg)

        if record.metrics_after.uiqm > record.metrics_before.uiqm:
            uiqm_wins += 1
        de_before = delta_e76(_quantized(degraded_img), clean_img)
        de_after = delta_e76(_quantized(out), clean_img)
        if de_after < de_before:
            de_wins += 1
        before_props = record.metrics_before.channel_proportions
        after_props = record.metrics_after.channel_proportions
        if max(after_props) - min(after_props) < max(before_props) - min(before_props):
            spread_wins += 1

    elapsed = time.perf_counter() - started
    assert uiqm_wins >= 8, f"UIQM improved on only {uiqm_wins}/10"
    assert de_wins >= 8, f"deltaE improved on only {de_wins}/10"
    assert spread_wins >= 8, f"channel spread shrank on only {spread_wins}/10"
    assert elapsed < 60.0
    _announce(
        6,
        f"10x512x512: UIQM {uiqm_wins}/10, deltaE {de_wins}/10, "
        f"spread {spread_wins}/10 ({elapsed:.1f}s)",
    )


def test_criterion_7_batch_determinism(tmp_path):
    rng = np.random.default_rng(77)
    from PIL import Image

    in_dir = tmp_path / "in"
    in_dir.mkdir()
    for i in range(4):
        data = rng.integers(0, 256, size=(32, 32, 3), dtype=np.uint8)
        Image.fromarray(data, mode="RGB").save(in_dir / f"img{i}.png", format="PNG")

    cfg = PipelineConfig.default()
    snapshots = {}
    for label, jobs in (("j1", 1), ("j2", 2)):
        out_dir = tmp_path / f"out_{label}"
        report_path = tmp_path / f"report_{label}.json"
        run_batch(in_dir, out_dir, cfg, jobs=jobs, report_path=report_path)
        images = {p.name: p.read_bytes() for p in sorted(out_dir.iterdir())}
        payload = json.loads(report_path.read_text())
        for entry in payload["entries"]:
            entry["wall_time"] = 0.0
            entry["output_path"] = entry["output_path"].replace(f"out_{label}", "out")
        snapshots[label] = (images, payload)

    assert snapshots["j1"][0] == snapshots["j2"][0]
    assert snapshots["j1"][1] == snapshots["j2"][1]
    _announce(7, "batch outputs and reports byte-identical across --jobs 1 and 2")


def test_criterion_8_default_config_exposes_all_constants():
    result = CliRunner().invoke(cli_main, ["print-default-config"])
    assert result.exit_code == 0
    data = yaml.safe_load(result.output)

    expected = {
        ("denoise", "low_threshold"): 1e-3,
        ("denoise", "high_threshold"): 1e-2,
        ("denoise", "window_radius"): 3,
        ("denoise", "bilateral_sigma_spatial"): 3.0,
        ("denoise", "bilateral_sigma_range"): 0.1,
        ("denoise", "highpass_cutoff"): 0.25,
        ("denoise", "literal_highpass"): False,
        ("compensation", "patch_radius"): 7,
        ("compensation", "omega"): 0.95,
        ("compensation", "t_floor"): 0.1,
        ("compensation", "airlight_percentile"): 0.001,
        ("compensation", "multiscale_radii"): [3, 7, 15],
        ("compensation", "literal_argmax"): False,
        ("balance", "reference_lab"): [60.0, 5.0, 10.0],
        ("balance", "delta_e_target"): 10.0,
        ("balance", "step"): 0.5,
        ("balance", "max_iters"): 20,
        ("illumination", "gamma_invert"): True,
        ("illumination", "alpha_min"): 0.2,
        ("illumination", "alpha_max"): 0.8,
        ("illumination", "local_sigmas"): [5.0, 20.0, 60.0],
        ("metrics", "uiqm_coeffs"): [0.0282, 0.2953, 3.5753],
        ("metrics", "uciqe_coeffs"): [0.4680, 0.2745, 0.2576],
        ("operators", "msr_sigmas"): [15.0, 80.0, 250.0],
        ("operators", "msr_epsilon"): 1.0 / 255.0,
        ("operators", "clahe_clip_threshold"): 2.0,
        ("operators", "clahe_tile_grid"): [8, 8],
    }
    for (section, key), value in expected.items():
        assert key in data[section], f"{section}.{key} missing from default config"
        assert data[section][key] == value, f"{section}.{key} != {value}"

    assert "saturation_gain" in data["hsv"] and "value_gain" in data["hsv"]
    assert set(data["stages"]) == set(STAGES)

    table = data["compensation"]["water_types"]
    assert [entry["name"] for entry in table] == [
        "clear",
        "green-coastal",
        "deep-blue",
        "turbid",
    ]
    defaults = {
        "clear": ([0.33, 0.34, 0.33], [0.2, 0.4, 0.4]),
        "green-coastal": ([0.20, 0.45, 0.35], [0.5, 0.2, 0.3]),
        "deep-blue": ([0.15, 0.35, 0.50], [0.6, 0.1, 0.3]),
        "turbid": ([0.28, 0.40, 0.32], [0.3, 0.3, 0.4]),
    }
    for entry in table:
        attenuation, weights = defaults[entry["name"]]
        assert np.allclose(entry["attenuation"], attenuation, atol=1e-12)
        assert np.allclose(entry["weights"], weights, atol=1e-12)

    _announce(8, "print-default-config exposes every invented constant")
