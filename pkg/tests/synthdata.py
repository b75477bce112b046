"""Synthetic six-class image set with a face-like region layout.

Each class is a fixed smooth pattern: five outer products of per-class
row and column profiles, scaled by a strictly descending amplitude
ladder, on a 0.5 background.  Distinct amplitudes keep each region's
covariance spectrum well separated, so every eigenvector slot carries
class signal rather than noise.  Images add per-pixel Gaussian noise
with sigma 0.05 and clip to [0, 1].
"""

from functools import lru_cache

import numpy as np

from eigenexpr import CropRect, GrayImage, RegionKind

IMAGE_SIZE = 160
NOISE_SIGMA = 0.05
NUM_CLASSES = 6
AMPLITUDES = (0.16, 0.135, 0.115, 0.095, 0.08)

# One shared layout for all synthetic images, mirroring the five facial
# regions: eyes high, nose center, lip low, nose_lip spanning both.
CROPS = {
    RegionKind.LEFT_EYE: CropRect(x=16, y=24, w=48, h=40),
    RegionKind.RIGHT_EYE: CropRect(x=96, y=24, w=48, h=40),
    RegionKind.NOSE: CropRect(x=56, y=56, w=48, h=56),
    RegionKind.LIP: CropRect(x=40, y=112, w=80, h=40),
    RegionKind.NOSE_LIP: CropRect(x=40, y=56, w=80, h=96),
}


def _smooth_columns(rng, n: int, count: int, passes: int) -> np.ndarray:
    """count random n-vectors, binomially smoothed, orthonormal, unit RMS."""
    cols = rng.standard_normal((n, count))
    kernel = np.array([0.25, 0.5, 0.25])
    for _ in range(passes):
        padded = np.pad(cols, ((1, 1), (0, 0)), mode="edge")
        cols = (
            kernel[0] * padded[:-2] + kernel[1] * padded[1:-1] + kernel[2] * padded[2:]
        )
    q, _ = np.linalg.qr(cols)
    return q * np.sqrt(n)


@lru_cache(maxsize=NUM_CLASSES)
def class_pattern(class_index: int) -> np.ndarray:
    """Deterministic noise-free pattern for one class. Do not mutate."""
    if not 0 <= class_index < NUM_CLASSES:
        raise ValueError(f"class_index must be in [0, {NUM_CLASSES}), got {class_index}")
    rng = np.random.default_rng(7000 + class_index)
    # Row profiles vary on a short scale so every crop window keeps their
    # variance; column profiles are smoother so resizing preserves them.
    rows = _smooth_columns(rng, IMAGE_SIZE, len(AMPLITUDES), passes=10)
    cols = _smooth_columns(rng, IMAGE_SIZE, len(AMPLITUDES), passes=25)
    pattern = np.full((IMAGE_SIZE, IMAGE_SIZE), 0.5)
    for h, amp in enumerate(AMPLITUDES):
        pattern += amp * np.outer(rows[:, h], cols[:, h])
    return pattern


def make_image(class_index: int, rng) -> GrayImage:
    """One noisy sample of the given class."""
    noisy = class_pattern(class_index) + rng.normal(
        0.0, NOISE_SIGMA, (IMAGE_SIZE, IMAGE_SIZE)
    )
    return GrayImage(pixels=np.clip(noisy, 0.0, 1.0))
