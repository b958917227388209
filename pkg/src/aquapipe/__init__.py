"""Adaptive underwater image enhancement and quality scoring."""

from .color import (
    AttenuationProfile,
    BalanceParams,
    WaterTypeProfile,
    WaterTypeTable,
    classify_water_type,
    estimate_attenuation,
    fuse_priors,
    gray_world,
    histogram_match,
    hsv_adjust,
    lab_mean,
    perceptual_balance,
)
from .config import PipelineConfig
from .errors import (
    AquapipeError,
    ConfigError,
    DegenerateInputError,
    ImageFormatError,
    ImageIOError,
    PreconditionError,
    StageError,
)
from .filt import (
    DenoiseParams,
    DenoiseResult,
    FrequencySpectrum,
    NoiseMap,
    WaveletBasis,
    WaveletPyramid,
    adaptive_denoise,
    bilateral_filter,
    dft_forward,
    dft_inverse,
    estimate_noise,
    gaussian_filter,
    guided_filter,
    highpass_filter,
    wavelet_decompose,
    wavelet_reconstruct,
)
from .illum import (
    AlphaMode,
    ClaheParams,
    HybridIllumParams,
    MsrParams,
    adaptive_gamma,
    clahe,
    hist_equalize,
    hybrid_illumination,
    msr,
)
from .imgcore import (
    ChannelStats,
    ColorSpace,
    Histogram,
    ImageBuffer,
    channel_stats,
    compute_histogram,
    convert,
    load_image,
    save_image,
)
from .metrics import (
    MetricReport,
    channel_proportions,
    delta_e76,
    evaluate,
    ssim,
    uciqe,
    uicm,
    uiconm,
    uiqm,
    uism,
)
from .pipeline import EnhanceRecord, JobReport, enhance, enhance_file, run_batch, score
from .priors import (
    AtmosphericLight,
    DcpParams,
    TransmissionMap,
    compensate_red,
    dark_channel,
    dehaze_dcp,
    dehaze_multiscale,
    estimate_airlight,
    multiscale_dark_channel,
    restore,
    transmission,
)

__version__ = "0.1.0"
