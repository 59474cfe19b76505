"""Time the numba kernels against the pure-numpy fallback.

    python3 benchmarks/bench_kernels.py [--size 256] [--repeat 7]
"""

import argparse
import statistics
import time

import numpy as np

from skyblur._accel import NUMBA_AVAILABLE
from skyblur.dft import fft2d
from skyblur.imaging import LAPLACIAN_KERNEL, convolve3x3
from skyblur.synth import gaussian_blur


def _median_time(fn, repeat):
    fn()  # warm-up, also triggers JIT compilation
    samples = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        samples.append(time.perf_counter() - t0)
    return statistics.median(samples)


def main(argv=None):
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--size", type=int, default=256)
    parser.add_argument("--repeat", type=int, default=7)
    args = parser.parse_args(argv)

    rng = np.random.default_rng(0)
    img = rng.uniform(0, 255, (args.size, args.size))
    odd = rng.uniform(0, 255, (args.size - 1, args.size + 3))  # exercises the chirp-z path

    cases = {
        "laplacian 3x3": lambda b: convolve3x3(img, LAPLACIAN_KERNEL, backend=b),
        "fft2d pow2": lambda b: fft2d(img, backend=b),
        "fft2d non-pow2": lambda b: fft2d(odd, backend=b),
        "gaussian sigma=3": lambda b: gaussian_blur(img, 3.0, backend=b),
    }
    backends = ["numpy", "numba"] if NUMBA_AVAILABLE else ["numpy"]

    print(f"{'kernel':<18}" + "".join(f"{b + ' ms':>12}" for b in backends) + f"{'speedup':>10}")
    for name, fn in cases.items():
        times = [_median_time(lambda: fn(b), args.repeat) for b in backends]
        row = f"{name:<18}" + "".join(f"{t * 1e3:>12.3f}" for t in times)
        if len(times) == 2:
            row += f"{times[0] / times[1]:>9.1f}x"
        print(row)


if __name__ == "__main__":
    main()
