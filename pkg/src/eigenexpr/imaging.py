"""Grayscale conversion, region cropping, and bilinear resizing.

Images are immutable grids of luminance values in [0, 1].  The five facial
regions and their canonical sizes live here as RegionKind; crop rectangles
are always caller-supplied, there is no face detection.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

import numpy as np

from .errors import BoundsError, ParameterError, ShapeError

_GRAY_R = 0.299
_GRAY_G = 0.587
_GRAY_B = 0.114


@dataclass(frozen=True)
class GrayImage:
    """Immutable grayscale image; pixels are a rows x cols float64 grid in [0, 1]."""

    pixels: np.ndarray

    def __post_init__(self):
        a = np.asarray(self.pixels, dtype=np.float64)
        if a.ndim != 2:
            raise ShapeError(f"image pixels must be 2-D, got {a.ndim}-D data")
        if a.size == 0:
            raise ShapeError(f"image must be non-empty, got shape {a.shape}")
        if not np.all(np.isfinite(a)):
            raise ShapeError("image contains NaN or infinite pixels")
        lo = float(a.min())
        hi = float(a.max())
        if lo < 0.0 or hi > 1.0:
            raise ParameterError(f"pixel values must lie in [0, 1], got range [{lo}, {hi}]")
        a = a.copy()
        a.flags.writeable = False
        object.__setattr__(self, "pixels", a)

    @property
    def height(self) -> int:
        return int(self.pixels.shape[0])

    @property
    def width(self) -> int:
        return int(self.pixels.shape[1])


class RegionKind(Enum):
    """The five facial regions with their canonical (rows, cols) sizes.

    Definition order is the canonical iteration order used by models,
    vote tables, and serialized files.
    """

    LEFT_EYE = ("left_eye", 40, 40)
    RIGHT_EYE = ("right_eye", 40, 40)
    NOSE = ("nose", 70, 60)
    LIP = ("lip", 60, 90)
    NOSE_LIP = ("nose_lip", 110, 95)

    def __new__(cls, key: str, rows: int, cols: int):
        obj = object.__new__(cls)
        obj._value_ = key
        obj.rows = rows
        obj.cols = cols
        return obj

    @property
    def key(self) -> str:
        """Stable identifier used in file formats and reports."""
        return self.value


@dataclass(frozen=True)
class CropRect:
    """Axis-aligned rectangle: x/y is the top-left pixel, w/h the extent."""

    x: int
    y: int
    w: int
    h: int

    def __post_init__(self):
        for name in ("x", "y", "w", "h"):
            value = getattr(self, name)
            if not isinstance(value, int) or isinstance(value, bool):
                raise ParameterError(f"rect {name} must be an integer, got {value!r}")
        if self.x < 0 or self.y < 0:
            raise BoundsError(f"rect origin must be non-negative, got ({self.x}, {self.y})")
        if self.w < 1 or self.h < 1:
            raise ParameterError(f"rect extent must be at least 1x1, got {self.w}x{self.h}")


@dataclass(frozen=True)
class RegionSpec:
    """A region kind plus where to find it in a particular source image."""

    kind: RegionKind
    rect: CropRect

    def __post_init__(self):
        if not isinstance(self.kind, RegionKind):
            raise ParameterError(f"kind must be a RegionKind, got {self.kind!r}")
        if not isinstance(self.rect, CropRect):
            raise ParameterError(f"rect must be a CropRect, got {self.rect!r}")
        # A 1-pixel-wide strip cannot carry two-dimensional structure.
        if self.rect.w < 2 or self.rect.h < 2:
            raise ParameterError(
                f"region rect must be at least 2x2, got {self.rect.w}x{self.rect.h}"
            )


def to_grayscale(r, g, b) -> GrayImage:
    """Combine three channel planes into luminance: 0.299 r + 0.587 g + 0.114 b.

    The planes must share one shape and hold values in [0, 1]; the result is
    clamped to [0, 1] against rounding.
    """
    planes = []
    for name, plane in (("r", r), ("g", g), ("b", b)):
        a = np.asarray(plane, dtype=np.float64)
        if a.ndim != 2 or a.size == 0:
            raise ShapeError(f"channel {name} must be a non-empty 2-D plane, got shape {a.shape}")
        if not np.all(np.isfinite(a)):
            raise ShapeError(f"channel {name} contains NaN or infinite values")
        if float(a.min()) < 0.0 or float(a.max()) > 1.0:
            raise ParameterError(f"channel {name} values must lie in [0, 1]")
        planes.append(a)
    if not (planes[0].shape == planes[1].shape == planes[2].shape):
        raise ShapeError(
            "channel planes differ in shape: "
            f"r{planes[0].shape} g{planes[1].shape} b{planes[2].shape}"
        )
    luma = _GRAY_R * planes[0] + _GRAY_G * planes[1] + _GRAY_B * planes[2]
    return GrayImage(np.clip(luma, 0.0, 1.0))


def crop(img: GrayImage, spec: RegionSpec) -> GrayImage:
    """Cut spec.rect out of img; result[i, j] = img[rect.y + i, rect.x + j]."""
    if not isinstance(img, GrayImage):
        raise ParameterError(f"img must be a GrayImage, got {img!r}")
    if not isinstance(spec, RegionSpec):
        raise ParameterError(f"spec must be a RegionSpec, got {spec!r}")
    rect = spec.rect
    if rect.x + rect.w > img.width or rect.y + rect.h > img.height:
        raise BoundsError(
            f"rect x={rect.x} y={rect.y} w={rect.w} h={rect.h} exceeds "
            f"image bounds {img.height}x{img.width}"
        )
    return GrayImage(img.pixels[rect.y : rect.y + rect.h, rect.x : rect.x + rect.w])


def resize(img: GrayImage, target_rows: int, target_cols: int) -> GrayImage:
    """Bilinear resize to exactly (target_rows, target_cols).

    Sample points use half-pixel centers (src = (dst + 0.5) * in/out - 0.5)
    with indices clamped at the edges, so resizing to the same dimensions
    reproduces the input exactly and constants stay constant.
    """
    if not isinstance(img, GrayImage):
        raise ParameterError(f"img must be a GrayImage, got {img!r}")
    if target_rows < 1 or target_cols < 1:
        raise ParameterError(f"target size must be at least 1x1, got {target_rows}x{target_cols}")
    src = img.pixels
    rows, cols = src.shape

    def axis_coords(target: int, size: int) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        pos = (np.arange(target, dtype=np.float64) + 0.5) * (size / target) - 0.5
        base = np.floor(pos)
        frac = pos - base
        i0 = np.clip(base, 0, size - 1).astype(np.intp)
        i1 = np.clip(base + 1, 0, size - 1).astype(np.intp)
        return i0, i1, frac

    r0, r1, fr = axis_coords(target_rows, rows)
    c0, c1, fc = axis_coords(target_cols, cols)
    fr = fr[:, None]
    fc = fc[None, :]
    out = (
        src[np.ix_(r0, c0)] * (1.0 - fr) * (1.0 - fc)
        + src[np.ix_(r0, c1)] * (1.0 - fr) * fc
        + src[np.ix_(r1, c0)] * fr * (1.0 - fc)
        + src[np.ix_(r1, c1)] * fr * fc
    )
    return GrayImage(np.clip(out, 0.0, 1.0))


def region_to_matrix(img: GrayImage) -> np.ndarray:
    """The image's pixel grid as a writable rows x cols float64 matrix."""
    if not isinstance(img, GrayImage):
        raise ParameterError(f"img must be a GrayImage, got {img!r}")
    return img.pixels.copy()
