"""Reading and writing image files.

Two on-disk forms are understood: ordinary raster files (PNG, JPEG, and
anything else Pillow can decode) and a plain-text grayscale format used for
bit-exact fixtures: a `rows cols` header line followed by rows lines of
space-separated luminance values in [0, 1].
"""

from __future__ import annotations

from pathlib import Path

import numpy as np
from PIL import Image

from .errors import EigenExprError, ImageFormatError
from .imaging import GrayImage, to_grayscale

_TEXT_SUFFIXES = frozenset({".txt", ".gray"})


def read_gray_text(path) -> GrayImage:
    """Parse the plain-text grayscale format; values round-trip bit-exactly."""
    p = Path(path)
    lines = p.read_text(encoding="utf-8").splitlines()
    if not lines:
        raise ImageFormatError(f"{p}: empty image file")
    head = lines[0].split()
    if len(head) != 2:
        raise ImageFormatError(f"{p}: first line must be 'rows cols', got {lines[0]!r}")
    try:
        rows, cols = int(head[0]), int(head[1])
    except ValueError as exc:
        raise ImageFormatError(f"{p}: first line must be 'rows cols', got {lines[0]!r}") from exc
    if rows < 1 or cols < 1:
        raise ImageFormatError(f"{p}: image dimensions must be positive, got {rows}x{cols}")
    body = lines[1:]
    if len(body) < rows:
        raise ImageFormatError(f"{p}: expected {rows} pixel rows, found {len(body)}")
    for extra in body[rows:]:
        if extra.strip():
            raise ImageFormatError(f"{p}: trailing content after {rows} pixel rows")
    grid = np.empty((rows, cols), dtype=np.float64)
    for i, line in enumerate(body[:rows]):
        tokens = line.split()
        if len(tokens) != cols:
            raise ImageFormatError(
                f"{p}: row {i + 1} has {len(tokens)} values, expected {cols}"
            )
        try:
            grid[i] = [float(tok) for tok in tokens]
        except ValueError as exc:
            raise ImageFormatError(f"{p}: row {i + 1} contains a non-numeric value") from exc
    try:
        return GrayImage(grid)
    except EigenExprError as exc:
        raise ImageFormatError(f"{p}: {exc}") from exc


def write_gray_text(path, img: GrayImage) -> None:
    """Write the plain-text grayscale format; read_gray_text inverts it bit-exactly."""
    lines = [f"{img.height} {img.width}"]
    for row in img.pixels:
        lines.append(" ".join(repr(float(x)) for x in row))
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


def read_image(path) -> GrayImage:
    """Load any supported image file as grayscale.

    `.txt`/`.gray` files use the bit-exact text format; everything else is
    decoded with Pillow, split into RGB planes scaled to [0, 1], and
    converted through the standard luminance weights.
    """
    p = Path(path)
    if p.suffix.lower() in _TEXT_SUFFIXES:
        return read_gray_text(p)
    try:
        with Image.open(p) as im:
            rgb = np.asarray(im.convert("RGB"), dtype=np.float64) / 255.0
    except FileNotFoundError:
        raise
    except OSError as exc:
        raise ImageFormatError(f"{p}: cannot decode image file: {exc}") from exc
    return to_grayscale(rgb[:, :, 0], rgb[:, :, 1], rgb[:, :, 2])
