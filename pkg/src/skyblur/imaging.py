"""Image decoding, grayscale conversion, ROI cropping and 3x3 convolution.

Rasters are plain numpy arrays indexed ``[row, column]``:

* RGB rasters are ``float64`` arrays of shape ``(height, width, 3)``,
* gray rasters are ``float64`` arrays of shape ``(height, width)``.

Both carry values in [0, 255], except the output of :func:`convolve3x3`,
which is signed and unbounded.
"""

from __future__ import annotations

import io
from dataclasses import dataclass

import numpy as np
import png
from PIL import Image, UnidentifiedImageError

from . import _kernels
from .errors import ImageTooSmall, MalformedImage, RoiOutOfBounds, UnsupportedFormat

PNG_SIGNATURE = b"\x89PNG\r\n\x1a\n"
JPEG_SIGNATURE = b"\xff\xd8\xff"

BT601_WEIGHTS = np.array([0.299, 0.587, 0.114])

LAPLACIAN_KERNEL = np.array(
    [
        [0.0, 1.0, 0.0],
        [1.0, -4.0, 1.0],
        [0.0, 1.0, 0.0],
    ]
)

# smallest ROI a classifier accepts: the Laplacian needs a 3x3 neighbourhood
MIN_SCORING_ROI = 3

_SIXTEEN_BIT_SCALE = 255.0 / 65535.0


@dataclass(frozen=True)
class RoiRect:
    """Axis-aligned pixel rectangle; ``x``/``y`` are column/row offsets."""

    x: int
    y: int
    width: int
    height: int

    def __post_init__(self):
        for name in ("x", "y", "width", "height"):
            value = getattr(self, name)
            if isinstance(value, bool) or not isinstance(value, (int, np.integer)):
                raise ValueError(f"RoiRect.{name} must be an integer, got {value!r}")
        if self.x < 0 or self.y < 0:
            raise ValueError(f"RoiRect offsets must be >= 0, got ({self.x}, {self.y})")
        if self.width < 1 or self.height < 1:
            raise ValueError(f"RoiRect must be at least 1x1, got {self.width}x{self.height}")

    def fits(self, width: int, height: int) -> bool:
        return self.x + self.width <= width and self.y + self.height <= height

    def offset(self, other: RoiRect) -> RoiRect:
        """``other`` expressed in the coordinates of the raster this ROI was cropped from."""
        return RoiRect(self.x + other.x, self.y + other.y, other.width, other.height)

    def to_dict(self) -> dict:
        return {"x": self.x, "y": self.y, "width": self.width, "height": self.height}

    @classmethod
    def parse(cls, text: str) -> RoiRect:
        """Parse ``"x,y,w,h"``."""
        parts = [p.strip() for p in text.split(",")]
        if len(parts) != 4:
            raise ValueError(f"expected x,y,w,h but got {text!r}")
        try:
            x, y, w, h = (int(p) for p in parts)
        except ValueError:
            raise ValueError(f"ROI components must be integers: {text!r}") from None
        return cls(x, y, w, h)


def _decode_png16(data: bytes) -> np.ndarray:
    # Pillow truncates 16-bit colour PNGs to 8 bits; pypng keeps the full depth.
    try:
        width, height, rows, info = png.Reader(bytes=data).asDirect()
        arr = np.vstack([np.asarray(row, dtype=np.float64) for row in rows])
    except (png.Error, ValueError, EOFError) as exc:
        raise MalformedImage(f"cannot decode PNG: {exc}") from exc
    planes = info["planes"]
    arr = arr.reshape(height, width, planes) * (255.0 / (2 ** info["bitdepth"] - 1))
    if planes in (1, 2):
        arr = np.repeat(arr[:, :, :1], 3, axis=2)
    return arr[:, :, :3]


def decode_image(data: bytes) -> np.ndarray:
    """Decode PNG or JPEG bytes into an ``(H, W, 3)`` float RGB raster in [0, 255].

    16-bit channels are scaled by 255/65535. Alpha is dropped.
    """
    if data.startswith(PNG_SIGNATURE):
        # IHDR: 8-byte signature, 8-byte chunk header, then width/height/bitdepth/colortype
        if len(data) >= 26 and data[24] == 16 and data[25] in (2, 6):
            return _decode_png16(data)
    elif not data.startswith(JPEG_SIGNATURE):
        raise UnsupportedFormat("only PNG and JPEG streams are supported")

    try:
        with Image.open(io.BytesIO(data)) as im:
            im.load()
            if im.mode in ("I;16", "I;16B", "I;16L", "I"):
                gray = np.asarray(im, dtype=np.float64) * _SIXTEEN_BIT_SCALE
                return np.repeat(gray[:, :, None], 3, axis=2)
            return np.asarray(im.convert("RGB"), dtype=np.float64)
    except UnidentifiedImageError as exc:
        # Pillow's message embeds a memory address; keep reports reproducible
        raise MalformedImage("cannot decode image: unrecognized image data") from exc
    except (OSError, SyntaxError, ValueError) as exc:
        raise MalformedImage(f"cannot decode image: {exc}") from exc


def load_image(path) -> np.ndarray:
    with open(path, "rb") as fh:
        return decode_image(fh.read())


def to_grayscale(img: np.ndarray) -> np.ndarray:
    """BT.601 luminance ``0.299 r + 0.587 g + 0.114 b``."""
    img = np.asarray(img, dtype=np.float64)
    if img.ndim != 3 or img.shape[2] != 3:
        raise ValueError(f"expected an (H, W, 3) raster, got shape {img.shape}")
    r, g, b = img[:, :, 0], img[:, :, 1], img[:, :, 2]
    gray = BT601_WEIGHTS[0] * r + BT601_WEIGHTS[1] * g + BT601_WEIGHTS[2] * b
    # gray triples must map back to v exactly; the weighted sum can be off by an ulp
    equal = (r == g) & (g == b)
    gray[equal] = r[equal]
    return gray


def crop(img: np.ndarray, roi: RoiRect) -> np.ndarray:
    height, width = img.shape[:2]
    if not roi.fits(width, height):
        raise RoiOutOfBounds(
            f"ROI x={roi.x} y={roi.y} {roi.width}x{roi.height} "
            f"exceeds {width}x{height} image"
        )
    return img[roi.y : roi.y + roi.height, roi.x : roi.x + roi.width].copy()


def convolve3x3(img: np.ndarray, kernel: np.ndarray, backend: str | None = None) -> np.ndarray:
    """Valid-mode 3x3 correlation, output shape ``(H - 2, W - 2)``.

    The result is not clamped and may be negative.
    """
    img = np.asarray(img, dtype=np.float64)
    if img.ndim != 2 or img.shape[0] < 3 or img.shape[1] < 3:
        raise ImageTooSmall(f"3x3 convolution needs at least a 3x3 raster, got {img.shape}")
    kernel = np.asarray(kernel, dtype=np.float64)
    if kernel.shape != (3, 3):
        raise ValueError(f"kernel must be 3x3, got {kernel.shape}")
    return _kernels.correlate3x3(img, kernel, backend=backend)
