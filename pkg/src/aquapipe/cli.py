"""Command-line interface.

Exit codes: 0 success, 1 processing or partial batch failure, 2 usage or
config error, 3 I/O error. ``AQUAPIPE_CONFIG`` supplies a default config
path for every subcommand.
"""

import json
import sys

import click

from .config import STAGES, PipelineConfig
from .errors import AquapipeError, ConfigError, ImageFormatError, ImageIOError
from .imgcore import load_image, save_image
from .pipeline import JobReport, enhance, run_batch, score

_CONFIG_OPTION = click.option(
    "--config",
    "config_path",
    type=click.Path(dir_okay=False),
    envvar="AQUAPIPE_CONFIG",
    default=None,
    help="Pipeline config file (YAML). Defaults to $AQUAPIPE_CONFIG when set.",
)


def _load_config(config_path) -> PipelineConfig:
    if config_path is None:
        return PipelineConfig.default()
    return PipelineConfig.load(config_path)


def _exit_for(exc: AquapipeError) -> int:
    if isinstance(exc, ConfigError):
        return 2
    if isinstance(exc, (ImageIOError, ImageFormatError)):
        return 3
    return 1


@click.group()
def main():
    """Underwater image enhancement and quality scoring."""


@main.command("enhance")
@click.argument("input_path", metavar="INPUT", type=click.Path(dir_okay=False))
@click.option("-o", "--output", "output_path", required=True, type=click.Path(dir_okay=False))
@_CONFIG_OPTION
@click.option(
    "--water-type",
    default=None,
    help="Water type name from the config table, or 'auto' to classify.",
)
@click.option(
    "--reference-image",
    type=click.Path(dir_okay=False),
    default=None,
    help="Well-balanced reference; switches the balance stage to histogram matching.",
)
@click.option("--report", "report_path", type=click.Path(dir_okay=False), default=None)
@click.option(
    "--disable-stage",
    "disabled",
    multiple=True,
    type=click.Choice(STAGES),
    help="Skip a stage (repeatable).",
)
def enhance_cmd(input_path, output_path, config_path, water_type, reference_image, report_path, disabled):
    """Enhance one image and write it as an 8-bit PNG."""
    try:
        cfg = _load_config(config_path)
        for stage in disabled:
            setattr(cfg.stages, stage, False)
        if water_type and water_type != "auto":
            cfg.compensation.forced_water_type = water_type  # validate() checks the name
        if reference_image:
            cfg.balance.reference_image = reference_image
        cfg.validate()
        img = load_image(input_path)
        out, record = enhance(img, cfg)
        save_image(out, output_path)
        record.input_path = str(input_path)
        record.output_path = str(output_path)
        if report_path:
            JobReport(entries=[record]).write(report_path)
    except AquapipeError as exc:
        click.echo(f"error: {exc}", err=True)
        sys.exit(_exit_for(exc))
    click.echo(f"wrote {output_path}")


@main.command("batch")
@click.argument("input_dir", type=click.Path(file_okay=False))
@click.argument("output_dir", type=click.Path(file_okay=False))
@_CONFIG_OPTION
@click.option("--report", "report_path", type=click.Path(dir_okay=False), default=None)
@click.option("--jobs", type=click.IntRange(min=1), default=1, show_default=True)
def batch_cmd(input_dir, output_dir, config_path, report_path, jobs):
    """Enhance every PNG/JPEG in a directory; outputs mirror input names.

    Exits 1 when any image fails while others succeed.
    """
    try:
        cfg = _load_config(config_path)
        cfg.validate()
        report = run_batch(input_dir, output_dir, cfg, jobs=jobs, report_path=report_path)
    except AquapipeError as exc:
        click.echo(f"error: {exc}", err=True)
        sys.exit(_exit_for(exc))
    click.echo(f"processed {report.succeeded} image(s), {report.failed} failure(s)")
    if report.failed:
        for entry in report.entries:
            if entry.error is not None:
                click.echo(f"failed: {entry.input_path}: {entry.error}", err=True)
        sys.exit(1)


@main.command("score")
@click.argument("image", type=click.Path(dir_okay=False))
@click.option("--ref", "ref_path", type=click.Path(dir_okay=False), default=None)
@_CONFIG_OPTION
@click.option("--report", "report_path", type=click.Path(dir_okay=False), default=None)
def score_cmd(image, ref_path, config_path, report_path):
    """Print quality metrics for an image (SSIM and delta E need --ref)."""
    try:
        cfg = _load_config(config_path)
        cfg.validate()
        report = score(image, ref_path, cfg)
    except AquapipeError as exc:
        click.echo(f"error: {exc}", err=True)
        sys.exit(_exit_for(exc))
    for key, value in report.to_dict().items():
        click.echo(f"{key}: {value}")
    if report_path:
        with open(report_path, "w", encoding="utf-8") as fh:
            json.dump(report.to_dict(), fh, indent=2, sort_keys=True)


@main.command("print-default-config")
def print_default_config_cmd():
    """Emit the fully populated default configuration as YAML."""
    click.echo(PipelineConfig.default().to_yaml(), nl=False)


if __name__ == "__main__":
    main()
