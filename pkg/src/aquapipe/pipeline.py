"""End-to-end enhancement: fixed stage order, batch execution, and reports.

Stage order: illumination, denoise, compensation (attenuation estimate,
water-type match, prior fusion), balance (histogram match when a reference
image is configured, perceptual balance otherwise), then HSV adjustment.
Every stage can be toggled off; disabling all of them leaves the image
untouched.
"""

import csv
import io
import json
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

from . import color, filt, illum, metrics
from .config import PipelineConfig
from .errors import (
    AquapipeError,
    DegenerateInputError,
    ImageIOError,
    PreconditionError,
    StageError,
)
from .imgcore import ImageBuffer, load_image, quantize_u8, save_image

IMAGE_SUFFIXES = (".png", ".jpg", ".jpeg")


@dataclass
class EnhanceRecord:
    """Everything recorded about one processed image."""

    input_path: str | None = None
    output_path: str | None = None
    water_type: str | None = None
    alpha: float | None = None
    gamma: float | None = None
    denoise_spatial_fraction: float | None = None
    denoise_frequency_fraction: float | None = None
    denoise_blend_fraction: float | None = None
    metrics_before: metrics.MetricReport | None = None
    metrics_after: metrics.MetricReport | None = None
    metric_deltas: dict = field(default_factory=dict)
    wall_time: float = 0.0
    error: str | None = None

    def to_dict(self) -> dict:
        return {
            "input_path": self.input_path,
            "output_path": self.output_path,
            "water_type": self.water_type,
            "alpha": self.alpha,
            "gamma": self.gamma,
            "denoise_spatial_fraction": self.denoise_spatial_fraction,
            "denoise_frequency_fraction": self.denoise_frequency_fraction,
            "denoise_blend_fraction": self.denoise_blend_fraction,
            "metrics_before": self.metrics_before.to_dict() if self.metrics_before else None,
            "metrics_after": self.metrics_after.to_dict() if self.metrics_after else None,
            "metric_deltas": self.metric_deltas,
            "wall_time": self.wall_time,
            "error": self.error,
        }


_DELTA_FIELDS = ("uiqm", "uicm", "uism", "uiconm", "uciqe")

_CSV_COLUMNS = [
    "input_path",
    "output_path",
    "water_type",
    "alpha",
    "gamma",
    "denoise_spatial_fraction",
    "denoise_frequency_fraction",
    "denoise_blend_fraction",
    *[f"before_{name}" for name in _DELTA_FIELDS],
    *[f"after_{name}" for name in _DELTA_FIELDS],
    *[f"delta_{name}" for name in _DELTA_FIELDS],
    "wall_time",
    "error",
]


@dataclass
class JobReport:
    entries: list = field(default_factory=list)

    @property
    def succeeded(self) -> int:
        return sum(1 for e in self.entries if e.error is None)

    @property
    def failed(self) -> int:
        return sum(1 for e in self.entries if e.error is not None)

    def to_json(self) -> str:
        payload = {
            "succeeded": self.succeeded,
            "failed": self.failed,
            "entries": [e.to_dict() for e in self.entries],
        }
        return json.dumps(payload, indent=2, sort_keys=True)

    def to_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.DictWriter(buf, fieldnames=_CSV_COLUMNS)
        writer.writeheader()
        for e in self.entries:
            row = {
                "input_path": e.input_path,
                "output_path": e.output_path,
                "water_type": e.water_type,
                "alpha": e.alpha,
                "gamma": e.gamma,
                "denoise_spatial_fraction": e.denoise_spatial_fraction,
                "denoise_frequency_fraction": e.denoise_frequency_fraction,
                "denoise_blend_fraction": e.denoise_blend_fraction,
                "wall_time": e.wall_time,
                "error": e.error,
            }
            for name in _DELTA_FIELDS:
                row[f"before_{name}"] = getattr(e.metrics_before, name) if e.metrics_before else None
                row[f"after_{name}"] = getattr(e.metrics_after, name) if e.metrics_after else None
                row[f"delta_{name}"] = e.metric_deltas.get(name)
            writer.writerow(row)
        return buf.getvalue()

    def write(self, path) -> None:
        """JSON by default; a .csv suffix selects the tabular form."""
        path = Path(path)
        text = self.to_csv() if path.suffix.lower() == ".csv" else self.to_json()
        path.write_text(text, encoding="utf-8")


def _evaluate_quantized(img: ImageBuffer, cfg: PipelineConfig):
    """Score at 8-bit resolution, mirroring what the codec writes and reads.

    Inputs the metrics cannot handle (an all-black frame has no channel
    proportions) yield None instead of failing the whole run.
    """
    quantized = ImageBuffer(quantize_u8(img.data) / 255.0, img.space)
    try:
        return metrics.evaluate(
            quantized,
            uiqm_coeffs=tuple(cfg.metrics.uiqm_coeffs),
            uciqe_coeffs=tuple(cfg.metrics.uciqe_coeffs),
        )
    except DegenerateInputError:
        return None


def enhance(
    img: ImageBuffer,
    cfg: PipelineConfig,
    reference: ImageBuffer | None = None,
) -> tuple[ImageBuffer, EnhanceRecord]:
    """Run the enabled stages in order; returns the result and its record."""
    if img.channels != 3:
        raise PreconditionError("pipeline input must be a 3-channel image")
    cfg.validate()
    record = EnhanceRecord()
    started = time.perf_counter()
    record.metrics_before = _evaluate_quantized(img, cfg)

    out = img
    if cfg.stages.illumination:
        try:
            out, alpha, gamma = illum.hybrid_illumination(out, cfg.illumination.to_params())
            record.alpha = alpha
            record.gamma = gamma
        except AquapipeError as exc:
            raise StageError("illumination", exc) from exc

    if cfg.stages.denoise:
        try:
            result = filt.adaptive_denoise(out, cfg.denoise.to_params())
            out = result.image
            record.denoise_spatial_fraction = result.spatial_fraction
            record.denoise_frequency_fraction = result.frequency_fraction
            record.denoise_blend_fraction = result.blend_fraction
        except AquapipeError as exc:
            raise StageError("denoise", exc) from exc

    if cfg.stages.compensation:
        try:
            table = cfg.compensation.to_table()
            if cfg.compensation.forced_water_type is not None:
                profile = table.get(cfg.compensation.forced_water_type)
            else:
                eta = color.estimate_attenuation(out)
                profile = color.classify_water_type(
                    eta, table, literal_argmax=cfg.compensation.literal_argmax
                )
            record.water_type = profile.name
            out = color.fuse_priors(out, profile, cfg.compensation.to_dcp_params())
        except AquapipeError as exc:
            raise StageError("compensation", exc) from exc

    if cfg.stages.balance:
        try:
            if reference is None and cfg.balance.reference_image:
                reference = load_image(cfg.balance.reference_image)
            if reference is not None:
                out = color.histogram_match(out, reference)
            else:
                out = color.perceptual_balance(out, cfg.balance.to_params())
        except AquapipeError as exc:
            raise StageError("balance", exc) from exc

    if cfg.stages.hsv:
        try:
            out = color.hsv_adjust(out, cfg.hsv.saturation_gain, cfg.hsv.value_gain)
        except AquapipeError as exc:
            raise StageError("hsv", exc) from exc

    record.metrics_after = _evaluate_quantized(out, cfg)
    if record.metrics_before is not None and record.metrics_after is not None:
        record.metric_deltas = {
            name: getattr(record.metrics_after, name) - getattr(record.metrics_before, name)
            for name in _DELTA_FIELDS
        }
    record.wall_time = time.perf_counter() - started
    return out, record


def enhance_file(
    input_path,
    output_path,
    cfg: PipelineConfig,
    reference: ImageBuffer | None = None,
) -> EnhanceRecord:
    """Load, enhance, save; failures come back as a record with ``error`` set."""
    record = EnhanceRecord(input_path=str(input_path), output_path=str(output_path))
    started = time.perf_counter()
    try:
        img = load_image(input_path)
        out, inner = enhance(img, cfg, reference=reference)
        save_image(out, output_path)
        inner.input_path = record.input_path
        inner.output_path = record.output_path
        inner.wall_time = time.perf_counter() - started
        return inner
    except AquapipeError as exc:
        record.error = str(exc)
        record.output_path = None
        record.wall_time = time.perf_counter() - started
        return record


def list_images(input_dir) -> list:
    """Decodable-looking files in a directory, sorted by name (not recursive)."""
    root = Path(input_dir)
    if not root.is_dir():
        raise ImageIOError(f"input directory not found: {input_dir}")
    return sorted(p for p in root.iterdir() if p.suffix.lower() in IMAGE_SUFFIXES)


def _batch_worker(args):
    input_path, output_path, cfg_dict = args
    cfg = PipelineConfig.from_dict(cfg_dict)
    return enhance_file(input_path, output_path, cfg)


def run_batch(
    input_dir,
    output_dir,
    cfg: PipelineConfig,
    jobs: int = 1,
    report_path=None,
) -> JobReport:
    """Enhance every image in a directory; outputs mirror input names as .png.

    Per-image failures are recorded and the batch continues. Results do not
    depend on the job count.
    """
    files = list_images(input_dir)
    if not files:
        raise ImageIOError(f"no images found in {input_dir}")
    out_root = Path(output_dir)
    out_root.mkdir(parents=True, exist_ok=True)
    tasks = [(str(p), str(out_root / (p.stem + ".png")), cfg.to_dict()) for p in files]

    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            entries = list(pool.map(_batch_worker, tasks))
    else:
        entries = [_batch_worker(t) for t in tasks]

    entries.sort(key=lambda e: e.input_path or "")
    report = JobReport(entries=entries)
    if report_path is not None:
        report.write(report_path)
    return report


def score(
    img_path,
    ref_path=None,
    cfg: PipelineConfig | None = None,
) -> metrics.MetricReport:
    """Metric report for one file, optionally against a reference file."""
    cfg = cfg or PipelineConfig.default()
    img = load_image(img_path)
    ref = load_image(ref_path) if ref_path is not None else None
    return metrics.evaluate(
        img,
        ref=ref,
        uiqm_coeffs=tuple(cfg.metrics.uiqm_coeffs),
        uciqe_coeffs=tuple(cfg.metrics.uciqe_coeffs),
    )
