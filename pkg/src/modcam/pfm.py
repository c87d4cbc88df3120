"""Portable float map (PFM) I/O.

Header is three ASCII lines: "PF" for 3-channel or "Pf" for 1-channel data,
"<width> <height>", and a scale whose sign encodes byte order.  Samples
follow as float32 scanlines ordered bottom-to-top.  This writer always emits
little-endian data with scale -1.0.
"""

from __future__ import annotations

from pathlib import Path

import numpy as np

from .errors import ParseError, ShapeError


def write_pfm(path: str | Path, data: np.ndarray) -> None:
    """Write a (H, W) or (H, W, {1,3}) float array as little-endian PFM."""
    arr = np.asarray(data, dtype=np.float32)
    if arr.ndim == 3 and arr.shape[2] == 1:
        arr = arr[:, :, 0]
    if arr.ndim == 2:
        magic = b"Pf"
    elif arr.ndim == 3 and arr.shape[2] == 3:
        magic = b"PF"
    else:
        raise ShapeError(f"cannot store shape {arr.shape} as PFM")
    height, width = arr.shape[:2]
    with open(path, "wb") as f:
        f.write(magic + b"\n")
        f.write(f"{width} {height}\n".encode("ascii"))
        f.write(b"-1.0\n")
        f.write(np.ascontiguousarray(arr[::-1], dtype="<f4").tobytes())


def read_pfm(path: str | Path) -> np.ndarray:
    """Read a PFM file; returns float32 data shaped (H, W, C) with C in {1, 3}."""
    with open(path, "rb") as f:
        magic = f.readline().strip()
        if magic == b"PF":
            channels = 3
        elif magic == b"Pf":
            channels = 1
        else:
            raise ParseError(f"not a PFM file: magic {magic!r}")
        try:
            width, height = (int(v) for v in f.readline().split())
            scale = float(f.readline())
        except ValueError as exc:
            raise ParseError(f"bad PFM header in {path}") from exc
        dtype = "<f4" if scale < 0 else ">f4"
        count = width * height * channels
        raw = np.frombuffer(f.read(count * 4), dtype=dtype)
        if raw.size != count:
            raise ParseError(f"truncated PFM payload in {path}")
    arr = raw.reshape(height, width, channels)[::-1]
    return np.ascontiguousarray(arr, dtype=np.float32)
