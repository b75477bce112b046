"""Grayscale conversion, cropping, and bilinear resizing."""

import numpy as np
import pytest

from eigenexpr import BoundsError, ParameterError, ShapeError
from eigenexpr.imaging import (
    CropRect,
    GrayImage,
    RegionKind,
    RegionSpec,
    crop,
    region_to_matrix,
    resize,
    to_grayscale,
)


def test_region_catalog():
    kinds = list(RegionKind)
    assert [k.key for k in kinds] == ["left_eye", "right_eye", "nose", "lip", "nose_lip"]
    dims = {k.key: (k.rows, k.cols) for k in kinds}
    assert dims == {
        "left_eye": (40, 40),
        "right_eye": (40, 40),
        "nose": (70, 60),
        "lip": (60, 90),
        "nose_lip": (110, 95),
    }


def test_gray_image_validation():
    img = GrayImage(pixels=np.zeros((2, 3)))
    assert (img.height, img.width) == (2, 3)
    with pytest.raises(ValueError):
        img.pixels[0, 0] = 0.5  # stored pixels are read-only
    with pytest.raises(ParameterError):
        GrayImage(pixels=np.full((2, 2), 1.5))
    with pytest.raises(ShapeError):
        GrayImage(pixels=np.array([[0.1, np.nan]]))
    with pytest.raises(ShapeError):
        GrayImage(pixels=np.zeros(4))
    with pytest.raises(ShapeError):
        GrayImage(pixels=np.zeros((0, 3)))


def test_gray_image_copies_its_input():
    src = np.zeros((2, 2))
    img = GrayImage(pixels=src)
    src[0, 0] = 1.0
    assert img.pixels[0, 0] == 0.0


def test_grayscale_weights():
    ones = np.ones((3, 4))
    zeros = np.zeros((3, 4))
    assert np.allclose(to_grayscale(ones, zeros, zeros).pixels, 0.299, atol=1e-15)
    assert np.allclose(to_grayscale(zeros, ones, zeros).pixels, 0.587, atol=1e-15)
    assert np.allclose(to_grayscale(zeros, zeros, ones).pixels, 0.114, atol=1e-15)
    # equal planes reproduce the plane: the weights sum to one
    rng = np.random.default_rng(5)
    x = rng.random((5, 5))
    assert np.allclose(to_grayscale(x, x, x).pixels, x, atol=1e-15)


def test_grayscale_rejects_mismatched_planes():
    with pytest.raises(ShapeError):
        to_grayscale(np.ones((2, 2)), np.ones((2, 3)), np.ones((2, 2)))
    with pytest.raises(ParameterError):
        to_grayscale(np.full((2, 2), 2.0), np.ones((2, 2)), np.ones((2, 2)))


def test_crop_rect_validation():
    r = CropRect(x=1, y=2, w=3, h=4)
    assert (r.x, r.y, r.w, r.h) == (1, 2, 3, 4)
    with pytest.raises(BoundsError):
        CropRect(x=-1, y=0, w=3, h=3)
    with pytest.raises(ParameterError):
        CropRect(x=0, y=0, w=0, h=3)
    with pytest.raises(ParameterError):
        CropRect(x=0, y=0, w=True, h=3)  # bool is not a pixel count
    with pytest.raises(ParameterError):
        CropRect(x=0.5, y=0, w=3, h=3)


def test_region_spec_needs_two_by_two():
    with pytest.raises(ParameterError):
        RegionSpec(kind=RegionKind.NOSE, rect=CropRect(x=0, y=0, w=1, h=5))


def test_crop_matches_slicing():
    rng = np.random.default_rng(6)
    img = GrayImage(pixels=rng.random((30, 40)))
    spec = RegionSpec(kind=RegionKind.LIP, rect=CropRect(x=5, y=7, w=20, h=11))
    out = crop(img, spec)
    assert np.array_equal(out.pixels, img.pixels[7:18, 5:25])


def test_crop_out_of_bounds():
    img = GrayImage(pixels=np.zeros((10, 10)))
    spec = RegionSpec(kind=RegionKind.NOSE, rect=CropRect(x=5, y=5, w=6, h=3))
    with pytest.raises(BoundsError):
        crop(img, spec)
    spec = RegionSpec(kind=RegionKind.NOSE, rect=CropRect(x=0, y=8, w=4, h=3))
    with pytest.raises(BoundsError):
        crop(img, spec)


def test_resize_identity_is_bitwise():
    rng = np.random.default_rng(7)
    img = GrayImage(pixels=rng.random((13, 17)))
    out = resize(img, 13, 17)
    assert np.array_equal(out.pixels, img.pixels)


def test_resize_constant_stays_constant():
    img = GrayImage(pixels=np.full((5, 9), 0.375))
    out = resize(img, 31, 4)
    assert np.allclose(out.pixels, 0.375, atol=1e-15)


def test_resize_upscale_edge_weights():
    # 2 columns to 4: centers map to -0.25, 0.25, 0.75, 1.25, so the ends
    # clamp to the edge pixels and the middle blends 3:1.
    img = GrayImage(pixels=np.array([[0.0, 1.0]]))
    out = resize(img, 1, 4)
    assert np.allclose(out.pixels, [[0.0, 0.25, 0.75, 1.0]], atol=1e-15)


def test_resize_downscale_pairs_average():
    img = GrayImage(pixels=np.array([[0.0, 0.2, 0.6, 1.0]]))
    out = resize(img, 1, 2)
    assert np.allclose(out.pixels, [[0.1, 0.8]], atol=1e-15)


def test_resize_stays_inside_input_range():
    rng = np.random.default_rng(8)
    pixels = 0.2 + 0.6 * rng.random((20, 20))
    out = resize(GrayImage(pixels=pixels), 47, 13)
    assert out.pixels.min() >= pixels.min() - 1e-12
    assert out.pixels.max() <= pixels.max() + 1e-12


def test_resize_separable_axes_commute():
    rng = np.random.default_rng(9)
    img = GrayImage(pixels=rng.random((12, 18)))
    both = resize(img, 30, 7)
    rows_first = resize(resize(img, 30, 18), 30, 7)
    cols_first = resize(resize(img, 12, 7), 30, 7)
    assert np.allclose(both.pixels, rows_first.pixels, atol=1e-12)
    assert np.allclose(both.pixels, cols_first.pixels, atol=1e-12)


def test_resize_rejects_bad_targets():
    img = GrayImage(pixels=np.zeros((4, 4)))
    with pytest.raises(ParameterError):
        resize(img, 0, 5)
    with pytest.raises(ParameterError):
        resize(img, 5, -1)


def test_region_to_matrix_returns_writable_copy():
    img = GrayImage(pixels=np.full((3, 3), 0.5))
    m = region_to_matrix(img)
    assert np.array_equal(m, img.pixels)
    m[0, 0] = 0.0  # the copy is ours to edit
    assert img.pixels[0, 0] == 0.5
