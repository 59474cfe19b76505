"""Hot inner loops, each in a numba and a pure-numpy flavour.

Both flavours of every kernel share one contract and are checked against each
other in the test suite. Public callers go through the dispatchers at the
bottom of the module, which pick a flavour from ``_accel.USE_NUMBA`` unless a
``backend`` is passed explicitly (the benchmark does this).
"""

import numpy as np

from ._accel import USE_NUMBA, optional_njit

BACKENDS = ("numba", "numpy")


# --------------------------------------------------------------------------
# 3x3 valid-mode correlation
# --------------------------------------------------------------------------


@optional_njit(cache=True, nogil=True)
def _correlate3x3_nb(img, kernel):
    h, w = img.shape
    out = np.empty((h - 2, w - 2), dtype=np.float64)
    for i in range(h - 2):
        for j in range(w - 2):
            acc = 0.0
            for di in range(3):
                for dj in range(3):
                    acc += kernel[di, dj] * img[i + di, j + dj]
            out[i, j] = acc
    return out


def _correlate3x3_np(img, kernel):
    h, w = img.shape
    out = np.zeros((h - 2, w - 2), dtype=np.float64)
    for di in range(3):
        for dj in range(3):
            out += kernel[di, dj] * img[di : di + h - 2, dj : dj + w - 2]
    return out


# --------------------------------------------------------------------------
# Radix-2 FFT over the last axis of a 2D complex array
# --------------------------------------------------------------------------


@optional_njit(cache=True, nogil=True)
def _fft_pow2_rows_nb(x):
    rows, n = x.shape
    out = np.empty_like(x)
    bits = 0
    while (1 << bits) < n:
        bits += 1
    rev = np.zeros(n, dtype=np.int64)
    for i in range(n):
        r = 0
        v = i
        for _ in range(bits):
            r = (r << 1) | (v & 1)
            v >>= 1
        rev[i] = r
    half_n = max(n // 2, 1)
    twiddle = np.empty(half_n, dtype=np.complex128)
    for k in range(half_n):
        twiddle[k] = np.exp(-2j * np.pi * k / n)
    for b in range(rows):
        for i in range(n):
            out[b, rev[i]] = x[b, i]
        size = 2
        while size <= n:
            half = size // 2
            step = n // size
            for start in range(0, n, size):
                for k in range(half):
                    t = twiddle[k * step] * out[b, start + k + half]
                    u = out[b, start + k]
                    out[b, start + k] = u + t
                    out[b, start + k + half] = u - t
            size *= 2
    return out


def _fft_pow2_rows_np(x):
    rows, n = x.shape
    n_min = min(n, 16)
    k = np.arange(n_min)
    dft = np.exp(-2j * np.pi * (np.outer(k, k) % n_min) / n_min)
    # column r of the reshaped block holds the stride-(n/n_min) subsequence x[r::n/n_min]
    spec = np.einsum("kj,bjr->bkr", dft, x.reshape(rows, n_min, -1))
    while spec.shape[1] < n:
        half = spec.shape[2] // 2
        even = spec[:, :, :half]
        odd = spec[:, :, half:]
        factor = np.exp(-1j * np.pi * np.arange(spec.shape[1]) / spec.shape[1])[None, :, None]
        spec = np.concatenate([even + factor * odd, even - factor * odd], axis=1)
    return spec.reshape(rows, n)


# --------------------------------------------------------------------------
# 1D correlation along the last axis with half-sample symmetric boundaries
# --------------------------------------------------------------------------


def reflect_indices(n: int, radius: int) -> np.ndarray:
    """Source index for each padded position -radius .. n+radius-1.

    Half-sample symmetric extension (``d c b a | a b c d | d c b a``),
    periodic with period 2n so any radius is valid.
    """
    t = np.arange(-radius, n + radius) % (2 * n)
    return np.where(t < n, t, 2 * n - 1 - t)


@optional_njit(cache=True, nogil=True)
def _correlate_rows_nb(x, taps, index):
    rows, n = x.shape
    width = taps.shape[0]
    out = np.empty((rows, n), dtype=np.float64)
    for b in range(rows):
        for i in range(n):
            acc = 0.0
            for k in range(width):
                acc += taps[k] * x[b, index[i + k]]
            out[b, i] = acc
    return out


def _correlate_rows_np(x, taps, index):
    n = x.shape[1]
    padded = x[:, index]
    out = np.zeros(x.shape, dtype=np.float64)
    for k, tap in enumerate(taps):
        out += tap * padded[:, k : k + n]
    return out


# --------------------------------------------------------------------------
# Dispatch
# --------------------------------------------------------------------------


def _pick(backend, numba_impl, numpy_impl):
    if backend is None:
        backend = "numba" if USE_NUMBA else "numpy"
    if backend == "numba":
        return numba_impl
    if backend == "numpy":
        return numpy_impl
    raise ValueError(f"unknown backend {backend!r}; expected one of {BACKENDS}")


def correlate3x3(img: np.ndarray, kernel: np.ndarray, backend: str | None = None) -> np.ndarray:
    impl = _pick(backend, _correlate3x3_nb, _correlate3x3_np)
    return impl(
        np.ascontiguousarray(img, dtype=np.float64),
        np.ascontiguousarray(kernel, dtype=np.float64),
    )


def fft_pow2_rows(x: np.ndarray, backend: str | None = None) -> np.ndarray:
    """Forward unnormalized DFT of each row; row length must be a power of two."""
    n = x.shape[1]
    if n & (n - 1):
        raise ValueError(f"row length {n} is not a power of two")
    impl = _pick(backend, _fft_pow2_rows_nb, _fft_pow2_rows_np)
    return impl(np.ascontiguousarray(x, dtype=np.complex128))


def correlate_rows(
    x: np.ndarray, taps: np.ndarray, index: np.ndarray, backend: str | None = None
) -> np.ndarray:
    """out[b, i] = sum_k taps[k] * x[b, index[i + k]]."""
    impl = _pick(backend, _correlate_rows_nb, _correlate_rows_np)
    return impl(
        np.ascontiguousarray(x, dtype=np.float64),
        np.ascontiguousarray(taps, dtype=np.float64),
        np.ascontiguousarray(index, dtype=np.int64),
    )
