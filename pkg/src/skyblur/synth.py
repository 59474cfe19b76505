"""Synthetic sky scenes with a sharp marker, and controlled Gaussian blur.

A scene is a vertical sky gradient, soft value-noise clouds and a solid dark
rectangle standing in for the static marker (a pole). The marker edges are the
only hard edges in the scene.
"""

from __future__ import annotations

import math
import os
from dataclasses import dataclass, field, replace

import numpy as np
from PIL import Image

from . import _kernels
from .classify import LabeledManifest, ManifestEntry
from .imaging import RoiRect

CLOUD_LUMA = 240.0
MANIFEST_NAME = "manifest.csv"

# cloud density ramps from 0 to 1 across this band of the normalized noise field
_COVERAGE_LOW = 0.42
_COVERAGE_HIGH = 0.62


@dataclass(frozen=True)
class SceneParams:
    width: int = 256
    height: int = 256
    sky_top_luma: float = 95.0
    sky_bottom_luma: float = 175.0
    cloud_octaves: int = 5
    cloud_opacity: float = 0.85
    marker: RoiRect = field(default_factory=lambda: RoiRect(176, 96, 10, 160))
    marker_luma: float = 35.0
    rng_seed: int = 0

    def __post_init__(self):
        if self.width < 1 or self.height < 1:
            raise ValueError(f"scene must be at least 1x1, got {self.width}x{self.height}")
        if self.cloud_octaves < 1:
            raise ValueError("cloud_octaves must be >= 1")
        if not 0.0 <= self.cloud_opacity <= 1.0:
            raise ValueError("cloud_opacity must lie in [0, 1]")
        for name in ("sky_top_luma", "sky_bottom_luma", "marker_luma"):
            if not 0.0 <= getattr(self, name) <= 255.0:
                raise ValueError(f"{name} must lie in [0, 255]")
        if not self.marker.fits(self.width, self.height):
            raise ValueError("marker rectangle lies outside the scene")

    def marker_roi(self, margin: int = 16) -> RoiRect:
        """A crop around the marker, clipped to the scene."""
        m = self.marker
        x0, y0 = max(m.x - margin, 0), max(m.y - margin, 0)
        x1 = min(m.x + m.width + margin, self.width)
        y1 = min(m.y + m.height + margin, self.height)
        return RoiRect(x0, y0, x1 - x0, y1 - y0)


def value_noise(width: int, height: int, octaves: int, rng: np.random.Generator) -> np.ndarray:
    """Multi-octave bilinear lattice noise normalized to [0, 1].

    Octave 0 has a lattice period of a quarter of the larger side; each
    further octave halves the period (down to 1 px) and the amplitude.
    """
    base = max(width, height) / 4.0
    total = np.zeros((height, width))
    weight = 0.0
    for octave in range(octaves):
        period = max(base / 2**octave, 1.0)
        amp = 0.5**octave
        gy = (np.arange(height) + 0.5) / period
        gx = (np.arange(width) + 0.5) / period
        lattice = rng.random((int(gy[-1]) + 2, int(gx[-1]) + 2))
        iy, ix = gy.astype(int), gx.astype(int)
        fy, fx = (gy - iy)[:, None], (gx - ix)[None, :]
        top = lattice[iy][:, ix] * (1 - fx) + lattice[iy][:, ix + 1] * fx
        bottom = lattice[iy + 1][:, ix] * (1 - fx) + lattice[iy + 1][:, ix + 1] * fx
        total += amp * (top * (1 - fy) + bottom * fy)
        weight += amp
    return total / weight


def generate_scene(params: SceneParams) -> np.ndarray:
    """Deterministic gray scene for ``params`` (including its seed)."""
    w, h = params.width, params.height
    sky = np.linspace(params.sky_top_luma, params.sky_bottom_luma, h)[:, None] * np.ones((1, w))
    if params.cloud_opacity > 0:
        rng = np.random.default_rng(params.rng_seed)
        noise = value_noise(w, h, params.cloud_octaves, rng)
        density = np.clip((noise - _COVERAGE_LOW) / (_COVERAGE_HIGH - _COVERAGE_LOW), 0.0, 1.0)
        alpha = params.cloud_opacity * density
        scene = sky * (1 - alpha) + CLOUD_LUMA * alpha
    else:
        scene = sky
    m = params.marker
    scene[m.y : m.y + m.height, m.x : m.x + m.width] = params.marker_luma
    return np.clip(scene, 0.0, 255.0)


def gaussian_kernel(sigma: float) -> np.ndarray:
    """Sampled Gaussian on [-ceil(3 sigma), ceil(3 sigma)], normalized to sum 1."""
    radius = math.ceil(3 * sigma)
    k = np.arange(-radius, radius + 1)
    taps = np.exp(-(k**2) / (2.0 * sigma * sigma))
    return taps / taps.sum()


def gaussian_blur(img: np.ndarray, sigma: float, backend: str | None = None) -> np.ndarray:
    """Separable Gaussian blur with half-sample symmetric (reflect) boundaries.

    ``sigma == 0`` returns an exact copy.
    """
    if sigma < 0:
        raise ValueError(f"sigma must be >= 0, got {sigma}")
    img = np.asarray(img, dtype=np.float64)
    if sigma == 0:
        return img.copy()
    taps = gaussian_kernel(sigma)
    radius = len(taps) // 2
    h, w = img.shape
    rows = _kernels.correlate_rows(img, taps, _kernels.reflect_indices(w, radius), backend)
    cols = _kernels.correlate_rows(rows.T, taps, _kernels.reflect_indices(h, radius), backend)
    return cols.T.copy()


def write_png(img: np.ndarray, path) -> None:
    data = np.rint(np.clip(img, 0.0, 255.0)).astype(np.uint8)
    Image.fromarray(data).save(path, format="PNG")


def generate_corpus(
    out_dir,
    n_sharp: int,
    n_blurred: int,
    params: SceneParams = SceneParams(),
    sigma_range: tuple[float, float] = (2.0, 5.0),
    seed: int = 0,
    noise_range: tuple[float, float] = (0.0, 0.0),
) -> LabeledManifest:
    """Write ``img_{index:04}.png`` files plus ``manifest.csv`` into ``out_dir``.

    Labels are shuffled across indices; every image gets its own scene seed and
    blurred images a sigma drawn uniformly from ``sigma_range``. When
    ``noise_range`` is non-zero, additive Gaussian sensor noise with a per-image
    standard deviation drawn from it is applied after the blur. Output is a pure
    function of the arguments.
    """
    from .pipeline import save_manifest

    if n_sharp < 0 or n_blurred < 0:
        raise ValueError("image counts must be >= 0")
    lo, hi = sigma_range
    if lo > hi or lo < 0:
        raise ValueError(f"invalid sigma range {sigma_range}")
    noise_lo, noise_hi = noise_range
    if noise_lo > noise_hi or noise_lo < 0:
        raise ValueError(f"invalid noise range {noise_range}")

    os.makedirs(out_dir, exist_ok=True)
    total = n_sharp + n_blurred
    root = np.random.default_rng(np.random.SeedSequence(seed))
    labels = np.array([False] * n_sharp + [True] * n_blurred)
    root.shuffle(labels)
    children = np.random.SeedSequence(seed).spawn(total)

    entries = []
    for index, (blurred, child) in enumerate(zip(labels, children)):
        rng = np.random.default_rng(child)
        scene_seed = int(rng.integers(0, 2**63))
        img = generate_scene(replace(params, rng_seed=scene_seed))
        if blurred:
            img = gaussian_blur(img, float(rng.uniform(lo, hi)))
        if noise_hi > 0:
            img = img + rng.normal(0.0, rng.uniform(noise_lo, noise_hi), img.shape)
        name = f"img_{index:04}.png"
        write_png(img, os.path.join(out_dir, name))
        entries.append(ManifestEntry(name, bool(blurred)))

    manifest = LabeledManifest(entries)
    save_manifest(manifest, os.path.join(out_dir, MANIFEST_NAME))
    return manifest
