"""Modulo-camera simulation, DCT-based HDR recovery, and detection evaluation."""

from .errors import (
    ConfigError,
    EvalError,
    InvalidGain,
    InvalidImage,
    InvalidParam,
    ModcamError,
    ParseError,
    ShapeError,
)
from .imaging import (
    HdrImage,
    ItohReport,
    ModuloImage,
    SaturatedImage,
    ScenarioConfig,
    ScenarioMode,
    SensorConfig,
    apply_gain,
    clamp_saturate,
    itoh_check,
    normalize_hdr,
    wrap_modulo,
)
from .spud import (
    AnchorPolicy,
    GradientField,
    RecoveryParams,
    SpectralField,
    centered_modulo,
    dct2,
    forward_diff,
    hard_threshold,
    idct2,
    laplacian_eigenvalues,
    neg_divergence,
    poisson_solve,
    sequential_unwrap_oracle,
    spud_reconstruct,
)
from .detection import (
    BoundingBox,
    ClassMetrics,
    DetectionSet,
    Matching,
    MetricsReport,
    TimingModel,
    compute_metrics,
    iou,
    match_detections,
    parse_kitti_labels,
    scenario_latency,
)
from .pfm import read_pfm, write_pfm
from .pipeline import (
    ReferenceMode,
    RunConfig,
    RunReport,
    run_scenario,
    simulate,
    sweep,
)
from .bench import BenchResult, benchmark_spud

__version__ = "0.1.0"
