"""Image containers and sensor forward models.

Two acquisition models are provided for the same scene: a conventional
sensor that clips at its code ceiling (`clamp_saturate`) and a modulo sensor
whose pixels wrap around on overflow (`wrap_modulo`).  Both quantize by
flooring, matching ADC counting semantics; the recovery code in
:mod:`modcam.spud` relies on that convention.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import NamedTuple

import numpy as np

from .errors import InvalidGain, InvalidImage


def _as_volume(data: np.ndarray, dtype=np.float64) -> np.ndarray:
    """Coerce 2-D (H, W) or 3-D (H, W, C) data to a validated 3-D array."""
    arr = np.asarray(data, dtype=dtype)
    if arr.ndim == 2:
        arr = arr[:, :, None]
    if arr.ndim != 3:
        raise InvalidImage(f"expected 2-D or 3-D image data, got {arr.ndim}-D")
    if arr.shape[2] not in (1, 3):
        raise InvalidImage(f"expected 1 or 3 channels, got {arr.shape[2]}")
    if arr.shape[0] < 2 or arr.shape[1] < 2:
        raise InvalidImage("images smaller than 2x2 are not supported")
    return arr


@dataclass(eq=False)
class HdrImage:
    """Real-valued irradiance field, stored as (height, width, channels).

    Values are finite, nonnegative and unbounded above; 2-D input is
    promoted to a single-channel volume.
    """

    data: np.ndarray

    def __post_init__(self) -> None:
        arr = _as_volume(self.data)
        if not np.all(np.isfinite(arr)):
            raise InvalidImage("image contains non-finite values")
        if arr.min() < 0:
            raise InvalidImage("irradiance values must be >= 0")
        self.data = arr

    @property
    def height(self) -> int:
        return self.data.shape[0]

    @property
    def width(self) -> int:
        return self.data.shape[1]

    @property
    def channels(self) -> int:
        return self.data.shape[2]


@dataclass(frozen=True)
class SensorConfig:
    """Sensor quantization depth; the wrap/clip level is ``2**bit_depth``."""

    bit_depth: int = 8

    def __post_init__(self) -> None:
        if not 1 <= int(self.bit_depth) <= 16:
            raise InvalidImage(f"bit depth must be in [1, 16], got {self.bit_depth}")

    @property
    def wrap_period(self) -> int:
        return 1 << self.bit_depth

    @property
    def max_code(self) -> int:
        return self.wrap_period - 1


class ScenarioMode(Enum):
    """Which image feeds the downstream detector."""

    SATURATED = "saturated"
    MODULO = "modulo"
    RECOVERY = "recovery"
    IDEAL_HDR = "idealhdr"


@dataclass(frozen=True)
class ScenarioConfig:
    """One evaluation scenario: exposure gain, recovery threshold and mode.

    ``use_recovered`` selects the recovered image over the raw modulo image
    as detector input; it is meaningful only outside IDEAL_HDR mode.
    """

    alpha: float
    tau: float = 0.0
    mode: ScenarioMode = ScenarioMode.MODULO
    use_recovered: bool = True

    def __post_init__(self) -> None:
        if not (np.isfinite(self.alpha) and self.alpha > 0):
            raise InvalidGain(f"alpha must be positive, got {self.alpha}")
        if not (np.isfinite(self.tau) and self.tau >= 0):
            raise InvalidImage(f"tau must be >= 0, got {self.tau}")

    def detector_input(self) -> ScenarioMode:
        """Mode of the image actually handed to detection."""
        if self.mode is ScenarioMode.IDEAL_HDR:
            return ScenarioMode.IDEAL_HDR
        if self.mode in (ScenarioMode.MODULO, ScenarioMode.RECOVERY):
            return ScenarioMode.RECOVERY if self.use_recovered else ScenarioMode.MODULO
        return self.mode


def _check_codes(arr: np.ndarray, cfg: SensorConfig, what: str) -> np.ndarray:
    arr = _as_volume(arr, dtype=np.int32)
    if arr.min() < 0 or arr.max() > cfg.max_code:
        raise InvalidImage(f"{what} codes outside [0, {cfg.max_code}]")
    return arr


@dataclass(eq=False)
class ModuloImage:
    """Integer measurement from a wrapping sensor, codes in [0, 2**b - 1]."""

    data: np.ndarray
    bit_depth: int = 8

    def __post_init__(self) -> None:
        self.data = _check_codes(self.data, SensorConfig(self.bit_depth), "modulo")


@dataclass(eq=False)
class SaturatedImage:
    """Integer measurement from a clipping sensor, codes in [0, 2**b - 1]."""

    data: np.ndarray
    bit_depth: int = 8

    def __post_init__(self) -> None:
        self.data = _check_codes(self.data, SensorConfig(self.bit_depth), "saturated")

    @property
    def saturation_mask(self) -> np.ndarray:
        """Boolean mask of pixels stuck at the code ceiling."""
        return self.data == (1 << self.bit_depth) - 1


class ItohReport(NamedTuple):
    holds: bool
    max_abs_diff: float


def normalize_hdr(raw: np.ndarray, cfg: SensorConfig) -> HdrImage:
    """Min-max normalize a raw radiance map to the range [0, 2**b].

    A single min/max is shared across channels so relative color survives.
    Constant input maps to all zeros.
    """
    arr = np.asarray(raw, dtype=np.float64)
    if not np.all(np.isfinite(arr)):
        raise InvalidImage("raw input contains non-finite values")
    lo = arr.min()
    hi = arr.max()
    if hi == lo:
        return HdrImage(np.zeros_like(arr))
    return HdrImage((arr - lo) * (float(cfg.wrap_period) / (hi - lo)))


def apply_gain(x: HdrImage, alpha: float) -> HdrImage:
    """Scale irradiance by a positive exposure gain."""
    if not (np.isfinite(alpha) and alpha > 0):
        raise InvalidGain(f"gain must be positive and finite, got {alpha}")
    return HdrImage(x.data * float(alpha))


def wrap_modulo(x: HdrImage, cfg: SensorConfig) -> ModuloImage:
    """Acquire through a modulo sensor: floor(x mod 2**b), per channel.

    Periodic in the wrap period: adding any whole number of periods to the
    scene leaves the measurement unchanged.
    """
    period = float(cfg.wrap_period)
    codes = np.floor(np.mod(x.data, period))
    codes = np.clip(codes, 0, cfg.max_code)
    return ModuloImage(codes.astype(np.int32), cfg.bit_depth)


def clamp_saturate(x: HdrImage, cfg: SensorConfig) -> SaturatedImage:
    """Acquire through a conventional sensor: clip at 2**b, floor-quantize.

    The integer code ceiling is 2**b - 1, one code below the real-valued
    clip level (a b-bit image cannot store 2**b itself).
    """
    codes = np.floor(np.minimum(x.data, float(cfg.wrap_period)))
    codes = np.clip(codes, 0, cfg.max_code)
    return SaturatedImage(codes.astype(np.int32), cfg.bit_depth)


def itoh_check(x: HdrImage, cfg: SensorConfig) -> ItohReport:
    """Check that neighbor differences stay below half the wrap period.

    When this holds, wrapped differences of the modulo measurement equal
    the true scene differences and gradient-based recovery is exact.
    Returns the verdict together with the largest absolute forward
    difference over both axes and all channels.
    """
    dx = np.abs(np.diff(x.data, axis=1))
    dy = np.abs(np.diff(x.data, axis=0))
    max_step = max(float(dx.max()) if dx.size else 0.0,
                   float(dy.max()) if dy.size else 0.0)
    half = float(cfg.wrap_period) / 2.0
    return ItohReport(holds=max_step < half, max_abs_diff=max_step)
