"""Blur detection for ground-based sky camera images using a static marker.

The blur score is computed on a crop around a sharp, fixed object in the
field of view instead of on the soft-edged sky itself.
"""

__version__ = "0.1.0"

from ._accel import USE_NUMBA, backend_name
from .classify import (
    DEFAULT_THRESHOLDS,
    CalibrationResult,
    ClassifierConfig,
    EvalReport,
    LabeledManifest,
    ManifestEntry,
    Verdict,
    calibrate,
    classify,
    evaluate,
)
from .dft import fft2d, ifft2d, naive_dft2d
from .errors import *  # noqa: F401,F403
from .imaging import RoiRect, convolve3x3, crop, decode_image, load_image, to_grayscale
from .metrics import BlurScore, FftParams, MetricKind, fft_score, laplacian_score
from .pipeline import (
    RunRecord,
    RunReport,
    load_config,
    load_manifest,
    run_batch,
    save_config,
    save_manifest,
)
from .synth import SceneParams, gaussian_blur, generate_corpus, generate_scene
