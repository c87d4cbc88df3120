"""Wall-clock benchmark for the recovery solver and its scaling law."""

from __future__ import annotations

import csv
import time
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import InvalidParam
from .imaging import ModuloImage, SensorConfig
from .spud import RecoveryParams, spud_reconstruct

# The survey dataset frame size; kept in the default sweep so benchmark
# output is directly comparable with measurements at that resolution.
REFERENCE_SIZE = (375, 1242)

DEFAULT_SIZES = ((128, 128), (256, 256), REFERENCE_SIZE, (512, 1024), (1024, 1024))


@dataclass(frozen=True)
class BenchRow:
    height: int
    width: int
    mean_ms: float
    std_ms: float
    min_ms: float
    repeats: int

    @property
    def pixels(self) -> int:
        return self.height * self.width


@dataclass
class BenchResult:
    rows: list[BenchRow]

    def loglog_slope(self) -> float:
        """Least-squares slope of log(min time) versus log(pixel count)."""
        if len(self.rows) < 2:
            raise InvalidParam("slope needs at least two sizes")
        x = np.log([r.pixels for r in self.rows])
        y = np.log([r.min_ms for r in self.rows])
        slope, _ = np.polyfit(x, y, 1)
        return float(slope)

    def write_csv(self, path: str | Path) -> None:
        with open(path, "w", newline="", encoding="utf-8") as f:
            writer = csv.writer(f)
            writer.writerow(["height", "width", "pixels", "mean_ms", "std_ms",
                             "min_ms", "repeats"])
            for r in self.rows:
                writer.writerow([r.height, r.width, r.pixels,
                                 f"{r.mean_ms:.4f}", f"{r.std_ms:.4f}",
                                 f"{r.min_ms:.4f}", r.repeats])


def benchmark_spud(
    sizes: tuple[tuple[int, int], ...] = DEFAULT_SIZES,
    repeats: int = 7,
    bit_depth: int = 8,
    tau: float = 0.0,
    seed: int = 0,
) -> BenchResult:
    """Time single-channel reconstruction per size, warm start excluded.

    Each size gets one untimed warm-up call (transform planning, caches)
    followed by `repeats` timed calls on the same seeded random measurement.
    """
    if repeats < 5:
        raise InvalidParam(f"need at least 5 repeats, got {repeats}")
    cfg = SensorConfig(bit_depth)
    params = RecoveryParams(tau=tau)
    rng = np.random.default_rng(seed)
    rows = []
    for height, width in sizes:
        codes = rng.integers(0, cfg.wrap_period, size=(height, width, 1))
        y = ModuloImage(codes.astype(np.int32), bit_depth)
        spud_reconstruct(y, cfg, params)  # warm-up
        samples = []
        for _ in range(repeats):
            t0 = time.perf_counter()
            spud_reconstruct(y, cfg, params)
            samples.append((time.perf_counter() - t0) * 1e3)
        arr = np.asarray(samples)
        rows.append(BenchRow(
            height=height, width=width,
            mean_ms=float(arr.mean()), std_ms=float(arr.std(ddof=1)),
            min_ms=float(arr.min()), repeats=repeats,
        ))
    return BenchResult(rows)
