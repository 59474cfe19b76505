"""Blur scores: variance of the Laplacian and FFT high-frequency energy.

Both scores grow with sharpness, so a low score means blurred.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from .dft import fft2d, ifft2d, naive_dft2d  # noqa: F401  (re-exported)
from .errors import ImageTooSmall
from .imaging import LAPLACIAN_KERNEL, convolve3x3

LOG_FLOOR = 1e-12
DEFAULT_LOW_FREQ_FRACTION = 0.125


class MetricKind(str, enum.Enum):
    LAPLACIAN = "laplacian"
    FFT = "fft"


@dataclass(frozen=True)
class BlurScore:
    metric: MetricKind
    value: float


@dataclass(frozen=True)
class FftParams:
    """``low_freq_fraction`` is the half-width of the zeroed central block,
    as a fraction of ``min(width, height)``."""

    low_freq_fraction: float = DEFAULT_LOW_FREQ_FRACTION

    def __post_init__(self):
        f = self.low_freq_fraction
        if isinstance(f, bool) or not isinstance(f, (int, float)) or not 0.0 < f < 0.5:
            raise ValueError(f"low_freq_fraction must lie in (0, 0.5), got {f!r}")


def laplacian_score(img: np.ndarray) -> BlurScore:
    """Population variance of the 4-neighbour Laplacian response (valid region)."""
    img = np.asarray(img, dtype=np.float64)
    if img.ndim != 2 or min(img.shape) < 3:
        raise ImageTooSmall(f"Laplacian score needs at least 3x3, got {img.shape}")
    response = convolve3x3(img, LAPLACIAN_KERNEL)
    return BlurScore(MetricKind.LAPLACIAN, float(response.var()))


def fft_score(img: np.ndarray, params: FftParams = FftParams()) -> BlurScore:
    """Mean dB magnitude of the image after removing its low frequencies.

    The centred spectrum has a (2h+1) x (2h+1) block zeroed, with
    ``h = floor(low_freq_fraction * min(W, H))``; the DC bin is therefore
    always removed. The mean is subtracted before transforming: it only
    touches the DC bin, which is discarded anyway, and it lets a constant
    raster reconstruct to exact zeros.
    """
    img = np.asarray(img, dtype=np.float64)
    if img.ndim != 2 or min(img.shape) < 4:
        raise ImageTooSmall(f"FFT score needs at least 4x4, got {img.shape}")
    h, w = img.shape
    half = math.floor(params.low_freq_fraction * min(w, h))

    spec = np.fft.fftshift(fft2d(img - img.mean()))
    cy, cx = h // 2, w // 2
    spec[max(cy - half, 0) : cy + half + 1, max(cx - half, 0) : cx + half + 1] = 0.0
    recon = ifft2d(np.fft.ifftshift(spec))

    magnitude = np.maximum(np.abs(recon), LOG_FLOOR)
    return BlurScore(MetricKind.FFT, float(np.mean(20.0 * np.log10(magnitude))))


def score(img: np.ndarray, metric: MetricKind, fft_params: FftParams = FftParams()) -> BlurScore:
    if metric is MetricKind.LAPLACIAN:
        return laplacian_score(img)
    return fft_score(img, fft_params)
