"""Scenario orchestration: dataset traversal, file emission, sweep reports.

Output layout under the configured directory:

    latent/<image>.pfm              normalized latent scene (gain-independent)
    <mode>/alpha_<a>/<image>.png    8-bit sensor/detector input per scenario
    idealhdr/<image>.png            multi-exposure reference (gain-independent)
    report.csv, report.json         metrics + latency per (mode, alpha) cell
"""

from __future__ import annotations

import csv
import json
import random
from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path

import numpy as np
from PIL import Image

from .detection import (
    BoundingBox,
    DetectionSet,
    MetricsReport,
    TimingModel,
    compute_metrics,
    match_detections,
    parse_kitti_labels,
    scenario_latency,
)
from .errors import ConfigError, EvalError, InvalidImage
from .imaging import (
    HdrImage,
    ScenarioMode,
    SensorConfig,
    apply_gain,
    clamp_saturate,
    itoh_check,
    normalize_hdr,
    wrap_modulo,
)
from .pfm import write_pfm
from .spud import RecoveryParams, spud_reconstruct

DEFAULT_ALPHAS = (1.5, 2.0, 3.0, 4.0)
DEFAULT_MODES = (
    ScenarioMode.SATURATED,
    ScenarioMode.MODULO,
    ScenarioMode.RECOVERY,
    ScenarioMode.IDEAL_HDR,
)


class ReferenceMode(Enum):
    """What detections are scored against."""

    GROUND_TRUTH = "groundtruth"
    IDEAL_HDR_DETECTIONS = "idealhdr"


@dataclass
class RunConfig:
    input_dir: Path
    output_dir: Path
    labels_dir: Path | None = None
    detections_path: Path | None = None
    bit_depth: int = 8
    alphas: tuple[float, ...] = DEFAULT_ALPHAS
    tau: float = 0.0
    modes: tuple[ScenarioMode, ...] = DEFAULT_MODES
    iou_min: float = 0.5
    reference: ReferenceMode = ReferenceMode.GROUND_TRUTH
    limit: int = 100
    seed: int | None = None
    timing: TimingModel = field(default_factory=TimingModel)

    def __post_init__(self) -> None:
        self.input_dir = Path(self.input_dir)
        self.output_dir = Path(self.output_dir)
        if self.labels_dir is not None:
            self.labels_dir = Path(self.labels_dir)
        if self.detections_path is not None:
            self.detections_path = Path(self.detections_path)
        if not self.alphas:
            raise ConfigError("at least one gain value is required")
        if any(a <= 0 for a in self.alphas):
            raise ConfigError(f"gains must be positive: {self.alphas}")

    @property
    def sensor(self) -> SensorConfig:
        return SensorConfig(self.bit_depth)


def alpha_tag(alpha: float) -> str:
    return f"{alpha:g}"


def load_raw_image(path: str | Path) -> np.ndarray:
    """Read a PNG as float64 (H, W, C) data, grayscale kept single-channel."""
    with Image.open(path) as img:
        if img.mode not in ("L", "RGB"):
            img = img.convert("RGB")
        arr = np.asarray(img, dtype=np.float64)
    return arr if arr.ndim == 3 else arr[:, :, None]


def save_png(path: str | Path, codes: np.ndarray) -> None:
    """Write integer codes in [0, 255] as an 8-bit PNG (pinned settings)."""
    arr = np.asarray(codes)
    if arr.min() < 0 or arr.max() > 255:
        raise InvalidImage("PNG output must fit 8-bit codes")
    arr = arr.astype(np.uint8)
    if arr.ndim == 3 and arr.shape[2] == 1:
        arr = arr[:, :, 0]
    Image.fromarray(arr).save(path, format="PNG", compress_level=6)


def select_images(input_dir: Path, limit: int, seed: int | None) -> list[Path]:
    """Deterministic dataset selection: first `limit` sorted names, or a
    seeded sample when a seed is given (the seed affects selection only)."""
    paths = sorted(Path(input_dir).glob("*.png"))
    if not paths:
        raise ConfigError(f"no PNG images found in {input_dir}")
    if limit and limit < len(paths):
        if seed is None:
            paths = paths[:limit]
        else:
            paths = sorted(random.Random(seed).sample(paths, limit))
    return paths


def scenario_codes(
    cfg: RunConfig, gained: HdrImage, mode: ScenarioMode, alpha: float
) -> np.ndarray:
    """8-bit detector-input codes for one scenario on an already-gained scene.

    Recovered and reference outputs are tone-mapped back to the baseline
    exposure (divide by the gain, floor) so all scenarios stay comparable.
    """
    sensor = cfg.sensor
    if sensor.bit_depth != 8:
        raise ConfigError("PNG emission requires an 8-bit sensor")
    if mode is ScenarioMode.SATURATED:
        return clamp_saturate(gained, sensor).data
    if mode is ScenarioMode.MODULO:
        return wrap_modulo(gained, sensor).data
    if mode is ScenarioMode.RECOVERY:
        recovered = spud_reconstruct(
            wrap_modulo(gained, sensor), sensor, RecoveryParams(tau=cfg.tau)
        )
        return np.clip(np.floor(recovered.data / alpha), 0, 255).astype(np.int32)
    if mode is ScenarioMode.IDEAL_HDR:
        return np.clip(np.floor(gained.data / alpha), 0, 255).astype(np.int32)
    raise ConfigError(f"unknown scenario mode: {mode}")


def run_scenario(
    cfg: RunConfig,
    image: HdrImage,
    mode: ScenarioMode,
    alpha: float,
    image_id: str,
) -> tuple[dict[str, Path], dict]:
    """Process one image for one (mode, alpha) cell and write its files.

    Writes the latent PFM once per image and the scenario PNG under
    ``<mode>/alpha_<a>/``; the multi-exposure reference is gain-independent
    and lives in a flat ``idealhdr/`` directory.  Returns written paths plus
    per-image stats including the Itoh check on the gained scene.
    """
    out = Path(cfg.output_dir)
    gained = apply_gain(image, alpha)
    report = itoh_check(gained, cfg.sensor)

    latent_path = out / "latent" / f"{image_id}.pfm"
    latent_path.parent.mkdir(parents=True, exist_ok=True)
    write_pfm(latent_path, image.data)

    if mode is ScenarioMode.IDEAL_HDR:
        png_path = out / mode.value / f"{image_id}.png"
    else:
        png_path = out / mode.value / f"alpha_{alpha_tag(alpha)}" / f"{image_id}.png"
    png_path.parent.mkdir(parents=True, exist_ok=True)
    save_png(png_path, scenario_codes(cfg, gained, mode, alpha))

    files = {"latent": latent_path, "png": png_path}
    stats = {
        "image_id": image_id,
        "mode": mode.value,
        "alpha": alpha,
        "itoh_holds": report.holds,
        "itoh_max_abs_diff": report.max_abs_diff,
    }
    return files, stats


def simulate(cfg: RunConfig) -> list[dict]:
    """Run every configured (mode, alpha) cell over the dataset."""
    paths = select_images(cfg.input_dir, cfg.limit, cfg.seed)
    stats = []
    for path in paths:
        image = normalize_hdr(load_raw_image(path), cfg.sensor)
        for mode in cfg.modes:
            alphas = cfg.alphas if mode is not ScenarioMode.IDEAL_HDR else cfg.alphas[:1]
            for alpha in alphas:
                _, s = run_scenario(cfg, image, mode, alpha, path.stem)
                stats.append(s)
    return stats


# ---------------------------------------------------------------------------
# Detections JSON (shared schema with the detector bridge)
# ---------------------------------------------------------------------------

def detections_file(det_dir: Path, mode: ScenarioMode, alpha: float) -> Path:
    if mode is ScenarioMode.IDEAL_HDR:
        return Path(det_dir) / "idealhdr.json"
    return Path(det_dir) / mode.value / f"alpha_{alpha_tag(alpha)}.json"


def load_detections(path: str | Path) -> dict[str, DetectionSet]:
    """Load a detections JSON file: [{image_id, boxes: [{j1,k1,j2,k2,class,score}]}]."""
    with open(path, "r", encoding="utf-8") as f:
        records = json.load(f)
    sets = {}
    for rec in records:
        boxes = [
            BoundingBox(
                float(b["j1"]), float(b["k1"]), float(b["j2"]), float(b["k2"]),
                str(b["class"]), score=float(b.get("score", 1.0)),
            )
            for b in rec["boxes"]
        ]
        sets[rec["image_id"]] = DetectionSet(rec["image_id"], boxes)
    return sets


def load_truth(labels_dir: Path, image_ids: list[str]) -> dict[str, DetectionSet]:
    truth = {}
    for image_id in image_ids:
        label_path = Path(labels_dir) / f"{image_id}.txt"
        text = label_path.read_text(encoding="utf-8") if label_path.exists() else ""
        truth[image_id] = parse_kitti_labels(text, image_id)
    return truth


# ---------------------------------------------------------------------------
# Sweep report
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ReportRow:
    mode: ScenarioMode
    alpha: float | None  # None for the gain-independent reference row
    metrics: MetricsReport
    latency_ms: float
    images: int

    @property
    def cell(self) -> str:
        if self.alpha is None:
            return self.mode.value
        return f"{self.mode.value}@{alpha_tag(self.alpha)}"


@dataclass
class RunReport:
    rows: list[ReportRow]
    iou_min: float
    reference: ReferenceMode

    _COLUMNS = ("mean_iou", "f1", "accuracy")

    def highlights(self) -> dict[str, dict[str, str]]:
        """Best and second-best cell per metric column."""
        out = {}
        for col in self._COLUMNS:
            ranked = sorted(
                self.rows, key=lambda r: (-getattr(r.metrics, col), r.cell)
            )
            entry = {"best": ranked[0].cell}
            if len(ranked) > 1:
                entry["second"] = ranked[1].cell
            out[col] = entry
        return out

    def write_csv(self, path: str | Path) -> None:
        with open(path, "w", newline="", encoding="utf-8") as f:
            writer = csv.writer(f)
            writer.writerow(
                ["mode", "alpha", "images", "tp", "fp", "fn",
                 "mean_iou", "f1", "accuracy", "latency_ms"]
            )
            for r in self.rows:
                writer.writerow([
                    r.mode.value,
                    "" if r.alpha is None else alpha_tag(r.alpha),
                    r.images, r.metrics.tp, r.metrics.fp, r.metrics.fn,
                    f"{r.metrics.mean_iou:.6f}",
                    f"{r.metrics.f1:.6f}",
                    f"{r.metrics.accuracy:.6f}",
                    f"{r.latency_ms:.3f}",
                ])

    def write_json(self, path: str | Path) -> None:
        payload = {
            "iou_min": self.iou_min,
            "reference": self.reference.value,
            "rows": [
                {
                    "mode": r.mode.value,
                    "alpha": r.alpha,
                    "images": r.images,
                    "tp": r.metrics.tp,
                    "fp": r.metrics.fp,
                    "fn": r.metrics.fn,
                    "mean_iou": round(r.metrics.mean_iou, 6),
                    "f1": round(r.metrics.f1, 6),
                    "accuracy": round(r.metrics.accuracy, 6),
                    "latency_ms": round(r.latency_ms, 3),
                }
                for r in self.rows
            ],
            "highlights": self.highlights(),
        }
        with open(path, "w", encoding="utf-8") as f:
            json.dump(payload, f, indent=2, sort_keys=True)
            f.write("\n")


def _evaluate_cell(
    preds: dict[str, DetectionSet],
    truth: dict[str, DetectionSet],
    image_ids: list[str],
    iou_min: float,
) -> MetricsReport:
    matchings = []
    for image_id in image_ids:
        p = preds.get(image_id, DetectionSet(image_id))
        t = truth.get(image_id, DetectionSet(image_id))
        matchings.append(match_detections(p, t, iou_min))
    return compute_metrics(matchings)


def sweep(cfg: RunConfig) -> RunReport:
    """Simulate every cell, score its detections, and assemble the report.

    Requires a detections directory holding one JSON file per cell (the
    gain-independent reference has a single file).  Missing files raise an
    evaluation error naming the cell.
    """
    if cfg.detections_path is None:
        raise ConfigError("sweep requires a detections directory")
    det_dir = Path(cfg.detections_path)
    if not det_dir.is_dir():
        raise ConfigError(f"detections directory not found: {det_dir}")

    paths = select_images(cfg.input_dir, cfg.limit, cfg.seed)
    image_ids = [p.stem for p in paths]

    simulate(cfg)

    # Reference boxes: KITTI labels, or detections on the reference images.
    if cfg.reference is ReferenceMode.GROUND_TRUTH:
        if cfg.labels_dir is None:
            raise ConfigError("ground-truth reference requires a labels directory")
        truth = load_truth(cfg.labels_dir, image_ids)
    else:
        ref_path = detections_file(det_dir, ScenarioMode.IDEAL_HDR, 0.0)
        if not ref_path.exists():
            raise EvalError(f"missing detections for cell idealhdr: {ref_path}")
        truth = load_detections(ref_path)

    rows = []
    for mode in cfg.modes:
        alphas: tuple[float, ...] = cfg.alphas
        if mode is ScenarioMode.IDEAL_HDR:
            alphas = (cfg.alphas[0],)
        for alpha in alphas:
            path = detections_file(det_dir, mode, alpha)
            if not path.exists():
                cell = mode.value if mode is ScenarioMode.IDEAL_HDR \
                    else f"{mode.value}@{alpha_tag(alpha)}"
                raise EvalError(f"missing detections for cell {cell}: {path}")
            preds = load_detections(path)
            metrics = _evaluate_cell(preds, truth, image_ids, cfg.iou_min)
            rows.append(ReportRow(
                mode=mode,
                alpha=None if mode is ScenarioMode.IDEAL_HDR else alpha,
                metrics=metrics,
                latency_ms=scenario_latency(cfg.timing, mode),
                images=len(image_ids),
            ))

    report = RunReport(rows=rows, iou_min=cfg.iou_min, reference=cfg.reference)
    out = Path(cfg.output_dir)
    out.mkdir(parents=True, exist_ok=True)
    report.write_csv(out / "report.csv")
    report.write_json(out / "report.json")
    return report
