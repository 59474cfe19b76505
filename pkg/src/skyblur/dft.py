"""Arbitrary-size 2D discrete Fourier transforms.

Power-of-two lengths run straight through the radix-2 kernel; every other
length goes through Bluestein's chirp-z reformulation, which turns a length-n
DFT into a circular convolution of power-of-two length m >= 2n - 1.

Convention: the forward transform is unnormalized and the inverse carries the
1/(W*H) factor.
"""

import numpy as np

from . import _kernels


def _is_pow2(n: int) -> bool:
    return n & (n - 1) == 0


def _bluestein_rows(x: np.ndarray, backend=None) -> np.ndarray:
    rows, n = x.shape
    k = np.arange(n)
    # k^2 mod 2n keeps the chirp phase small so large k do not lose precision
    chirp = np.exp(-1j * np.pi * ((k * k) % (2 * n)) / n)
    m = 1
    while m < 2 * n - 1:
        m *= 2

    a = np.zeros((rows, m), dtype=np.complex128)
    a[:, :n] = x * chirp
    b = np.zeros((1, m), dtype=np.complex128)
    b[0, :n] = np.conj(chirp)
    b[0, m - n + 1 :] = np.conj(chirp[1:])[::-1]

    fa = _kernels.fft_pow2_rows(a, backend)
    fb = _kernels.fft_pow2_rows(b, backend)
    conv = np.conj(_kernels.fft_pow2_rows(np.conj(fa * fb), backend)) / m
    return conv[:, :n] * chirp


def dft_rows(x: np.ndarray, backend: str | None = None) -> np.ndarray:
    """Unnormalized forward DFT of every row of a 2D array."""
    x = np.asarray(x, dtype=np.complex128)
    if _is_pow2(x.shape[1]):
        return _kernels.fft_pow2_rows(x, backend)
    return _bluestein_rows(x, backend)


def fft2d(img: np.ndarray, backend: str | None = None) -> np.ndarray:
    """Forward 2D DFT, ``F[v, u] = sum img[y, x] exp(-2 pi i (u x / W + v y / H))``."""
    img = np.asarray(img)
    if img.ndim != 2 or img.size == 0:
        raise ValueError(f"expected a non-empty 2D raster, got shape {img.shape}")
    spec = dft_rows(img, backend)
    return dft_rows(spec.T, backend).T


def ifft2d(spec: np.ndarray, backend: str | None = None) -> np.ndarray:
    spec = np.asarray(spec, dtype=np.complex128)
    return np.conj(fft2d(np.conj(spec), backend)) / spec.size


def naive_dft2d(img: np.ndarray) -> np.ndarray:
    """The literal double sum; O((W*H)^2), for testing only."""
    img = np.asarray(img, dtype=np.float64)
    h, w = img.shape
    y = np.arange(h)
    x = np.arange(w)
    # phase[v, u, y, x] = exp(-2 pi i (u x / W + v y / H))
    phase = np.exp(
        -2j
        * np.pi
        * (
            np.multiply.outer(y, y)[:, None, :, None] / h
            + np.multiply.outer(x, x)[None, :, None, :] / w
        )
    )
    return np.einsum("vuyx,yx->vu", phase, img)
