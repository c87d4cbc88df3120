"""Shared fixtures: synthetic scenes with controlled gradients, KITTI-style
label text, and detections JSON files in the bridge schema."""

from __future__ import annotations

import json
from pathlib import Path

import numpy as np
import pytest
from scipy.ndimage import gaussian_filter


def smooth_scene(
    rng: np.random.Generator,
    height: int,
    width: int,
    channels: int = 1,
    max_step: float = 120.0,
    sigma: float | None = None,
) -> np.ndarray:
    """Nonnegative random scene whose forward differences stay below max_step.

    Gaussian-smoothed noise, min shifted to zero, then scaled so the largest
    forward difference sits just under the requested bound.  Peak value grows
    with size/smoothness, which is what makes the scene exceed the sensor
    range (the interesting regime).
    """
    if sigma is None:
        sigma = max(2.0, min(height, width) / 8.0)
    field = rng.normal(size=(height, width, channels))
    for c in range(channels):
        field[:, :, c] = gaussian_filter(field[:, :, c], sigma=sigma, mode="nearest")
    field -= field.min()
    dx = np.abs(np.diff(field, axis=1)).max()
    dy = np.abs(np.diff(field, axis=0)).max()
    grad = max(dx, dy)
    if grad == 0:
        return field
    return field * (max_step * rng.uniform(0.6, 0.95) / grad)


@pytest.fixture
def make_scene():
    return smooth_scene


def kitti_line(label: str, j1: float, k1: float, j2: float, k2: float) -> str:
    """One synthetic KITTI label line (15 fields, placeholders for 3-D data)."""
    return (f"{label} 0.00 0 -1.58 {j1:.2f} {k1:.2f} {j2:.2f} {k2:.2f} "
            "1.65 1.67 3.64 -0.65 1.71 46.70 -1.59")


@pytest.fixture
def make_kitti_line():
    return kitti_line


def write_detections(path: Path, records: list[dict]) -> Path:
    """Write a detections JSON file in the shared schema."""
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8") as f:
        json.dump(records, f, indent=2, sort_keys=True)
    return path


def boxes_record(image_id: str, boxes: list[tuple]) -> dict:
    """Build one detections record from (j1, k1, j2, k2, class[, score]) tuples."""
    out = []
    for b in boxes:
        rec = {"j1": b[0], "k1": b[1], "j2": b[2], "k2": b[3], "class": b[4]}
        rec["score"] = b[5] if len(b) > 5 else 1.0
        out.append(rec)
    return {"image_id": image_id, "boxes": out}


def make_png_dataset(root: Path, count: int, size=(24, 32), seed=0) -> Path:
    """Smooth random RGB PNGs whose steps are gentle enough that a gain of 4
    still satisfies the gradient condition after min-max normalization.

    Normalization stretches codes to the full range, so what matters is the
    step-to-range ratio; smoothing is repeated until it is comfortably small.
    Every channel touches zero somewhere, like a scene with shadows, so
    recovery can pin the absolute level of each channel.
    """
    from PIL import Image

    rng = np.random.default_rng(seed)
    img_dir = root / "images"
    img_dir.mkdir(parents=True, exist_ok=True)
    for i in range(count):
        field = smooth_scene(rng, size[0], size[1], channels=3, max_step=20.0)
        for _ in range(20):
            for c in range(field.shape[2]):
                field[:, :, c] -= field[:, :, c].min()
            step = max(np.abs(np.diff(field, axis=0)).max(),
                       np.abs(np.diff(field, axis=1)).max())
            if step / field.max() <= 0.09:
                break
            for c in range(field.shape[2]):
                field[:, :, c] = gaussian_filter(field[:, :, c], 1.5, mode="nearest")
        codes = np.round(field / field.max() * 255.0)
        Image.fromarray(codes.astype(np.uint8)).save(img_dir / f"img_{i:03d}.png")
    return img_dir


def make_labels(root: Path, image_ids: list[str]) -> Path:
    labels_dir = root / "labels"
    labels_dir.mkdir(parents=True, exist_ok=True)
    for image_id in image_ids:
        lines = [kitti_line("Car", 2, 2, 12, 10), kitti_line("Car", 14, 4, 24, 12)]
        (labels_dir / f"{image_id}.txt").write_text("\n".join(lines) + "\n")
    return labels_dir
