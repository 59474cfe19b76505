"""Optional numba acceleration.

Set ``SKYBLUR_DISABLE_NUMBA=1`` in the environment before import to force the
pure-numpy kernels even when numba is installed.
"""

import os

try:
    import numba
except ImportError:  # pragma: no cover - numba is a hard dependency in CI
    numba = None

NUMBA_AVAILABLE = numba is not None
NUMBA_DISABLED = os.environ.get("SKYBLUR_DISABLE_NUMBA", "").strip().lower() in {
    "1",
    "true",
    "yes",
    "on",
}
USE_NUMBA = NUMBA_AVAILABLE and not NUMBA_DISABLED


def optional_njit(*args, **kwargs):
    """``numba.njit`` when numba is importable, identity otherwise.

    The compiled function is always built if numba exists, so benchmarks and
    equivalence tests can reach it regardless of the env flag; dispatch
    between the two paths is done by each kernel module via ``USE_NUMBA``.
    """

    def decorator(func):
        if NUMBA_AVAILABLE:
            return numba.njit(*args, **kwargs)(func)
        return func

    return decorator


def backend_name() -> str:
    return "numba" if USE_NUMBA else "numpy"
