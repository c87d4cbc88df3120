"""HDR recovery from modulo measurements via a DCT-domain Poisson solve.

Wherever neighboring scene samples differ by less than half the wrap period
(Itoh's condition), the centered-modulo of the measurement's forward
differences equals the forward differences of the floor-quantized scene.
Recovery is then a least-squares integration of that wrapped gradient field:
the normal equations involve the 5-point Laplacian with Neumann (replicate)
boundaries, which the orthonormal DCT-II diagonalizes exactly.  One forward
transform, a coefficient-wise division and one inverse transform recover the
scene up to an additive constant, in O(n log n).  A hard threshold applied to
the transformed divergence doubles as a denoiser, so unwrapping and denoising
happen in the same pass.

`sequential_unwrap_oracle` implements the classical 1-D cumulative unwrap
along the first column and then along every row.  Under Itoh's condition it
is exact in integer arithmetic, which makes it a trustworthy cross-check for
the transform-domain path without sharing any code with it.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from functools import lru_cache

import numpy as np
from scipy.fft import dctn, idctn

from .errors import ConfigError, InvalidImage, InvalidParam, ShapeError
from .imaging import HdrImage, ModuloImage, SensorConfig


@dataclass(eq=False)
class GradientField:
    """Forward differences of a 2-D image; last column of gx and last row
    of gy are zero (replicate boundary)."""

    gx: np.ndarray
    gy: np.ndarray

    def __post_init__(self) -> None:
        self.gx = np.asarray(self.gx, dtype=np.float64)
        self.gy = np.asarray(self.gy, dtype=np.float64)
        if self.gx.shape != self.gy.shape:
            raise ShapeError(f"gx {self.gx.shape} vs gy {self.gy.shape}")
        if self.gx.ndim != 2:
            raise ShapeError("gradient components must be 2-D")
        if np.any(self.gx[:, -1] != 0) or np.any(self.gy[-1, :] != 0):
            raise ShapeError("boundary differences must be zero")


@dataclass(eq=False)
class SpectralField:
    """2-D DCT-II coefficients of an image, same shape as the source."""

    coeffs: np.ndarray

    def __post_init__(self) -> None:
        self.coeffs = np.asarray(self.coeffs, dtype=np.float64)
        if self.coeffs.ndim != 2:
            raise ShapeError("spectral coefficients must be 2-D")
        if not np.all(np.isfinite(self.coeffs)):
            raise InvalidImage("spectral coefficients must be finite")

    @property
    def shape(self) -> tuple[int, int]:
        return self.coeffs.shape


class AnchorPolicy(Enum):
    """How the unknown additive constant of the solve is fixed."""

    MATCH_FIRST_PIXEL = "match-first-pixel"
    ZERO_MIN = "zero-min"


@dataclass(frozen=True)
class RecoveryParams:
    tau: float = 0.0
    anchor_policy: AnchorPolicy = AnchorPolicy.MATCH_FIRST_PIXEL

    def __post_init__(self) -> None:
        if not self.tau >= 0:
            raise InvalidParam(f"threshold must be >= 0, got {self.tau}")


def centered_modulo(d, cfg: SensorConfig):
    """Wrap values into the symmetric range [-2**(b-1), 2**(b-1)).

    The result is congruent to the input modulo the wrap period, so applying
    it to differences of a modulo image re-centers them around zero without
    losing gradient information.
    """
    d = np.asarray(d, dtype=np.float64)
    period = float(cfg.wrap_period)
    # d - period*floor(d/period + 1/2) lands exactly in [-period/2, period/2)
    # and is noticeably faster than the float remainder path.
    return d - period * np.floor(d / period + 0.5)


def forward_diff(u: np.ndarray) -> GradientField:
    """Forward differences of a 2-D image, zero at the far boundary."""
    u = np.asarray(u, dtype=np.float64)
    if u.ndim != 2 or u.shape[0] < 2 or u.shape[1] < 2:
        raise InvalidImage("forward differences need a 2-D image of at least 2x2")
    gx = np.empty_like(u)
    gy = np.empty_like(u)
    np.subtract(u[:, 1:], u[:, :-1], out=gx[:, :-1])
    np.subtract(u[1:, :], u[:-1, :], out=gy[:-1, :])
    gx[:, -1] = 0.0
    gy[-1, :] = 0.0
    return GradientField(gx, gy)


def neg_divergence(g: GradientField) -> np.ndarray:
    """Exact adjoint of `forward_diff`: <forward_diff(u), g> == <u, neg_divergence(g)>."""
    gx, gy = g.gx, g.gy
    out = np.empty_like(gx)
    out[:, 0] = -gx[:, 0]
    np.subtract(gx[:, :-2], gx[:, 1:-1], out=out[:, 1:-1])
    out[:, -1] = gx[:, -2]
    out[0, :] -= gy[0, :]
    out[1:-1, :] += gy[:-2, :] - gy[1:-1, :]
    out[-1, :] += gy[-2, :]
    return out


def dct2(u: np.ndarray) -> SpectralField:
    """Orthonormal separable 2-D DCT-II."""
    u = np.asarray(u, dtype=np.float64)
    if u.ndim != 2:
        raise ShapeError("dct2 expects a 2-D array")
    return SpectralField(dctn(u, type=2, norm="ortho", workers=-1))


def idct2(rho: SpectralField) -> np.ndarray:
    """Inverse of `dct2` (orthonormal 2-D DCT-III)."""
    return idctn(rho.coeffs, type=2, norm="ortho", workers=-1)


def laplacian_eigenvalues(height: int, width: int) -> np.ndarray:
    """Eigenvalues of the Neumann Laplacian in the DCT-II basis.

    Entry (m, n) is 2*(2 - cos(pi*m/M) - cos(pi*n/N)); the (0, 0) entry is
    zero, reflecting that gradients carry no information about the mean.
    """
    m = np.arange(height, dtype=np.float64)[:, None]
    n = np.arange(width, dtype=np.float64)[None, :]
    return 2.0 * (2.0 - np.cos(np.pi * m / height) - np.cos(np.pi * n / width))


@lru_cache(maxsize=8)
def _inverse_eigenvalues(height: int, width: int) -> np.ndarray:
    """Reciprocal eigenvalues with the singular (0, 0) entry set to zero, so
    a single multiply both inverts the Laplacian and pins the mean.  Cached
    per shape; read-only so concurrent reuse stays safe."""
    lam = laplacian_eigenvalues(height, width)
    lam[0, 0] = 1.0
    inv = 1.0 / lam
    inv[0, 0] = 0.0
    inv.flags.writeable = False
    return inv


def hard_threshold(rho: SpectralField, tau: float) -> SpectralField:
    """Zero every coefficient with magnitude <= tau, keep the rest unchanged."""
    if not tau >= 0:
        raise InvalidParam(f"threshold must be >= 0, got {tau}")
    if tau == 0:
        return SpectralField(rho.coeffs.copy())
    return SpectralField(np.where(np.abs(rho.coeffs) > tau, rho.coeffs, 0.0))


def poisson_solve(rho: SpectralField) -> np.ndarray:
    """Invert the Neumann Laplacian given DCT coefficients of a divergence.

    Each coefficient is divided by the matching Laplacian eigenvalue; the
    unobservable mean component is pinned to zero, so the returned image has
    zero mean up to floating error.
    """
    height, width = rho.shape
    coeffs = rho.coeffs * _inverse_eigenvalues(height, width)
    return idct2(SpectralField(coeffs))


# Snap tolerance for the whole-period shift: solver roundoff can leave the
# minimum a hair below zero, which must not trigger an extra period.
_PERIOD_SNAP = 1e-3


def _anchor(xc: np.ndarray, y0: float, period: float, policy: AnchorPolicy) -> np.ndarray:
    if policy is AnchorPolicy.ZERO_MIN:
        return xc - xc.min()
    # Shift so the first pixel stays congruent to the measurement while the
    # minimum lands in [0, period): the smallest admissible nonnegative range.
    xc = xc + (y0 - xc[0, 0])
    return xc - period * np.floor((xc.min() + _PERIOD_SNAP) / period)


def spud_reconstruct(
    y: ModuloImage,
    cfg: SensorConfig,
    params: RecoveryParams = RecoveryParams(),
) -> HdrImage:
    """Recover an HDR image from a modulo measurement, channel by channel.

    Pipeline per channel: centered-modulo of the measurement's forward
    differences, negative divergence, DCT, hard threshold, eigenvalue
    division, inverse DCT, then offset anchoring.  With a zero threshold and
    Itoh's condition satisfied by the scene, the result equals the
    floor-quantized scene up to a global additive constant.
    """
    if y.bit_depth != cfg.bit_depth:
        raise ConfigError(
            f"measurement bit depth {y.bit_depth} != sensor config {cfg.bit_depth}"
        )
    period = float(cfg.wrap_period)
    channels = []
    for c in range(y.data.shape[2]):
        yc = y.data[:, :, c].astype(np.float64)
        g = forward_diff(yc)
        wrapped = GradientField(centered_modulo(g.gx, cfg), centered_modulo(g.gy, cfg))
        rho = dct2(neg_divergence(wrapped))
        xc = poisson_solve(hard_threshold(rho, params.tau))
        xc = _anchor(xc, yc[0, 0], period, params.anchor_policy)
        channels.append(np.maximum(xc, 0.0))
    return HdrImage(np.stack(channels, axis=2))


def sequential_unwrap_oracle(y: ModuloImage, cfg: SensorConfig) -> HdrImage:
    """Unwrap by cumulative summation: first column top-down, then each row.

    Exact (in integer arithmetic) whenever Itoh's condition holds for the
    underlying scene; garbage-in-garbage-out otherwise, so callers should
    check the condition themselves.  The output is shifted by whole wrap
    periods so its minimum lands in [0, wrap_period).
    """
    period = float(cfg.wrap_period)
    channels = []
    for c in range(y.data.shape[2]):
        yc = y.data[:, :, c].astype(np.float64)
        dcol = centered_modulo(np.diff(yc[:, 0]), cfg)
        col0 = yc[0, 0] + np.concatenate(([0.0], np.cumsum(dcol)))
        drow = centered_modulo(np.diff(yc, axis=1), cfg)
        rows = np.concatenate(
            (np.zeros((yc.shape[0], 1)), np.cumsum(drow, axis=1)), axis=1
        )
        xc = col0[:, None] + rows
        xc -= period * np.floor(xc.min() / period)
        channels.append(xc)
    return HdrImage(np.stack(channels, axis=2))
