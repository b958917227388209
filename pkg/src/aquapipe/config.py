"""Pipeline configuration: defaults for every tunable, YAML round trip, and
strict validation (unknown keys are rejected)."""

from dataclasses import dataclass, field

import yaml

from .color import BalanceParams, WaterTypeProfile, WaterTypeTable
from .errors import ConfigError, PreconditionError
from .filt import DenoiseParams
from .illum import AlphaMode, HybridIllumParams
from .metrics import UCIQE_COEFFS, UIQM_COEFFS
from .priors import DcpParams

STAGES = ("illumination", "denoise", "compensation", "balance", "hsv")


@dataclass
class StageToggles:
    illumination: bool = True
    denoise: bool = True
    compensation: bool = True
    balance: bool = True
    hsv: bool = True

    def to_dict(self):
        return {name: getattr(self, name) for name in STAGES}


@dataclass
class IlluminationConfig:
    alpha_mode: str = "auto"  # "auto" or "fixed"
    alpha_fixed: float = 0.5
    alpha_min: float = 0.2
    alpha_max: float = 0.8
    local_sigmas: list = field(default_factory=lambda: [5.0, 20.0, 60.0])
    local_weights: list | None = None
    gamma_invert: bool = True
    gamma_override: float | None = None

    def to_params(self) -> HybridIllumParams:
        if self.alpha_mode not in ("auto", "fixed"):
            raise ConfigError(f"alpha_mode must be 'auto' or 'fixed', got {self.alpha_mode!r}")
        return HybridIllumParams(
            alpha_mode=AlphaMode(self.alpha_mode),
            alpha_fixed=self.alpha_fixed,
            alpha_min=self.alpha_min,
            alpha_max=self.alpha_max,
            local_sigmas=tuple(self.local_sigmas),
            local_weights=None if self.local_weights is None else tuple(self.local_weights),
            gamma_override=self.gamma_override,
            gamma_invert=self.gamma_invert,
        )


@dataclass
class DenoiseConfig:
    low_threshold: float = 1e-3
    high_threshold: float = 1e-2
    window_radius: int = 3
    bilateral_sigma_spatial: float = 3.0
    bilateral_sigma_range: float = 0.1
    highpass_cutoff: float = 0.25
    literal_highpass: bool = False

    def to_params(self) -> DenoiseParams:
        return DenoiseParams(
            low_threshold=self.low_threshold,
            high_threshold=self.high_threshold,
            window_radius=self.window_radius,
            bilateral_sigma_spatial=self.bilateral_sigma_spatial,
            bilateral_sigma_range=self.bilateral_sigma_range,
            highpass_cutoff=self.highpass_cutoff,
            literal_highpass=self.literal_highpass,
        )


def _default_water_types():
    return [
        {"name": p.name, "attenuation": list(p.attenuation), "weights": list(p.weights)}
        for p in WaterTypeTable.default().profiles
    ]


@dataclass
class CompensationConfig:
    patch_radius: int = 7
    omega: float = 0.95
    t_floor: float = 0.1
    airlight_percentile: float = 0.001
    multiscale_radii: list = field(default_factory=lambda: [3, 7, 15])
    multiscale_weights: list | None = None
    literal_argmax: bool = False
    forced_water_type: str | None = None
    water_types: list = field(default_factory=_default_water_types)

    def to_dcp_params(self) -> DcpParams:
        return DcpParams(
            patch_radius=self.patch_radius,
            omega=self.omega,
            t_floor=self.t_floor,
            airlight_percentile=self.airlight_percentile,
            multiscale_radii=tuple(self.multiscale_radii),
            multiscale_weights=(
                None if self.multiscale_weights is None else tuple(self.multiscale_weights)
            ),
        )

    def to_table(self) -> WaterTypeTable:
        profiles = []
        for entry in self.water_types:
            unknown = set(entry) - {"name", "attenuation", "weights"}
            if unknown:
                raise ConfigError(f"unknown water type keys: {sorted(unknown)}")
            try:
                profiles.append(
                    WaterTypeProfile(
                        name=entry["name"],
                        attenuation=tuple(entry["attenuation"]),
                        weights=tuple(entry["weights"]),
                    )
                )
            except KeyError as exc:
                raise ConfigError(f"water type entry missing {exc}") from exc
        table = WaterTypeTable(profiles=profiles)
        table.validate()
        return table


@dataclass
class BalanceConfig:
    reference_lab: list = field(default_factory=lambda: [60.0, 5.0, 10.0])
    delta_e_target: float = 10.0
    step: float = 0.5
    max_iters: int = 20
    reference_image: str | None = None

    def to_params(self) -> BalanceParams:
        return BalanceParams(
            reference_lab=tuple(self.reference_lab),
            delta_e_target=self.delta_e_target,
            step=self.step,
            max_iters=self.max_iters,
        )


@dataclass
class HsvConfig:
    saturation_gain: float = 1.1
    value_gain: float = 1.1


@dataclass
class MetricsConfig:
    uiqm_coeffs: list = field(default_factory=lambda: list(UIQM_COEFFS))
    uciqe_coeffs: list = field(default_factory=lambda: list(UCIQE_COEFFS))


@dataclass
class OperatorsConfig:
    """Defaults for library operators that sit outside the five stages."""

    clahe_clip_threshold: float = 2.0
    clahe_tile_grid: list = field(default_factory=lambda: [8, 8])
    msr_sigmas: list = field(default_factory=lambda: [15.0, 80.0, 250.0])
    msr_weights: list | None = None
    msr_epsilon: float = 1.0 / 255.0


_SECTIONS = {
    "stages": StageToggles,
    "illumination": IlluminationConfig,
    "denoise": DenoiseConfig,
    "compensation": CompensationConfig,
    "balance": BalanceConfig,
    "hsv": HsvConfig,
    "metrics": MetricsConfig,
    "operators": OperatorsConfig,
}


@dataclass
class PipelineConfig:
    stages: StageToggles = field(default_factory=StageToggles)
    illumination: IlluminationConfig = field(default_factory=IlluminationConfig)
    denoise: DenoiseConfig = field(default_factory=DenoiseConfig)
    compensation: CompensationConfig = field(default_factory=CompensationConfig)
    balance: BalanceConfig = field(default_factory=BalanceConfig)
    hsv: HsvConfig = field(default_factory=HsvConfig)
    metrics: MetricsConfig = field(default_factory=MetricsConfig)
    operators: OperatorsConfig = field(default_factory=OperatorsConfig)

    @classmethod
    def default(cls) -> "PipelineConfig":
        return cls()

    def validate(self) -> None:
        """Build every parameter object once so invariants fire at load time."""
        try:
            self.illumination.to_params().validate()
            params = self.denoise.to_params()
            params.validate()
            self.compensation.to_dcp_params().validate()
            table = self.compensation.to_table()
            if self.compensation.forced_water_type is not None:
                table.get(self.compensation.forced_water_type)
            self.balance.to_params().validate()
            if self.hsv.saturation_gain < 0 or self.hsv.value_gain < 0:
                raise ConfigError("hsv gains must be non-negative")
            if len(self.metrics.uiqm_coeffs) != 3 or len(self.metrics.uciqe_coeffs) != 3:
                raise ConfigError("metric coefficient lists must have 3 entries")
        except PreconditionError as exc:
            raise ConfigError(str(exc)) from exc

    def to_dict(self) -> dict:
        def section(obj, fields):
            return {name: getattr(obj, name) for name in fields}

        return {
            "stages": self.stages.to_dict(),
            "illumination": section(
                self.illumination,
                (
                    "alpha_mode",
                    "alpha_fixed",
                    "alpha_min",
                    "alpha_max",
                    "local_sigmas",
                    "local_weights",
                    "gamma_invert",
                    "gamma_override",
                ),
            ),
            "denoise": section(
                self.denoise,
                (
                    "low_threshold",
                    "high_threshold",
                    "window_radius",
                    "bilateral_sigma_spatial",
                    "bilateral_sigma_range",
                    "highpass_cutoff",
                    "literal_highpass",
                ),
            ),
            "compensation": section(
                self.compensation,
                (
                    "patch_radius",
                    "omega",
                    "t_floor",
                    "airlight_percentile",
                    "multiscale_radii",
                    "multiscale_weights",
                    "literal_argmax",
                    "forced_water_type",
                    "water_types",
                ),
            ),
            "balance": section(
                self.balance,
                ("reference_lab", "delta_e_target", "step", "max_iters", "reference_image"),
            ),
            "hsv": section(self.hsv, ("saturation_gain", "value_gain")),
            "metrics": section(self.metrics, ("uiqm_coeffs", "uciqe_coeffs")),
            "operators": section(
                self.operators,
                (
                    "clahe_clip_threshold",
                    "clahe_tile_grid",
                    "msr_sigmas",
                    "msr_weights",
                    "msr_epsilon",
                ),
            ),
        }

    @classmethod
    def from_dict(cls, data: dict) -> "PipelineConfig":
        if not isinstance(data, dict):
            raise ConfigError("config root must be a mapping")
        unknown = set(data) - set(_SECTIONS)
        if unknown:
            raise ConfigError(f"unknown config sections: {sorted(unknown)}")
        cfg = cls()
        for name, section_cls in _SECTIONS.items():
            if name not in data:
                continue
            section_data = data[name]
            if not isinstance(section_data, dict):
                raise ConfigError(f"section {name!r} must be a mapping")
            fields = section_cls.__dataclass_fields__
            bad = set(section_data) - set(fields)
            if bad:
                raise ConfigError(f"unknown keys in section {name!r}: {sorted(bad)}")
            section = getattr(cfg, name)
            for key, value in section_data.items():
                setattr(section, key, value)
        cfg.validate()
        return cfg

    def to_yaml(self) -> str:
        return yaml.safe_dump(self.to_dict(), sort_keys=False, default_flow_style=None)

    @classmethod
    def load(cls, path) -> "PipelineConfig":
        try:
            with open(path, "r", encoding="utf-8") as fh:
                data = yaml.safe_load(fh)
        except FileNotFoundError as exc:
            raise ConfigError(f"config file not found: {path}") from exc
        except yaml.YAMLError as exc:
            raise ConfigError(f"cannot parse config {path}: {exc}") from exc
        if data is None:
            data = {}
        return cls.from_dict(data)
