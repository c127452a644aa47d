"""Low-level raster operations shared by the fitting and estimation stages.

Images are float64 arrays in [0, 1], shape (H, W) for grayscale and
(H, W, 3) for RGB. 8-bit data is rescaled on load and quantized on save.
"""

from __future__ import annotations

import numpy as np
from scipy import ndimage

from .errors import InvalidCropError, InvalidInputError

LUMA_WEIGHTS = np.array([0.299, 0.587, 0.114])


def to_float(image: np.ndarray) -> np.ndarray:
    """uint8 -> [0,1] float; float arrays pass through untouched."""
    arr = np.asarray(image)
    if arr.dtype == np.uint8:
        return arr.astype(float) / 255.0
    return arr.astype(float, copy=False)


def to_uint8(image: np.ndarray) -> np.ndarray:
    return (np.clip(np.asarray(image, dtype=float), 0.0, 1.0) * 255.0).round().astype(np.uint8)


def to_gray(image: np.ndarray) -> np.ndarray:
    """Luma conversion with 0.299/0.587/0.114 weights; grayscale passes through."""
    arr = to_float(image)
    if arr.ndim == 2:
        return arr
    if arr.ndim == 3 and arr.shape[2] == 3:
        return arr @ LUMA_WEIGHTS
    raise InvalidInputError(f"expected (H,W) or (H,W,3) image, got shape {arr.shape}")


def equalize_hist(gray: np.ndarray) -> np.ndarray:
    """256-bin histogram equalization on 8-bit-quantized intensities.

    Returns a float image in [0, 1]. A single-valued image is returned
    unchanged (its histogram cannot be spread).
    """
    g = to_float(gray)
    if g.ndim != 2:
        raise InvalidInputError("equalize_hist expects a grayscale image")
    q = to_uint8(g)
    counts = np.bincount(q.ravel(), minlength=256)
    cdf = np.cumsum(counts).astype(float)
    nonzero = cdf[counts > 0]
    if nonzero.size == 0 or nonzero[0] == cdf[-1]:
        return g.copy()
    cdf_min = nonzero[0]
    lut = (cdf - cdf_min) / (cdf[-1] - cdf_min)
    return lut[q]


def gradient_magnitude(gray: np.ndarray) -> np.ndarray:
    """Sobel gradient magnitude sqrt(gx^2 + gy^2), edge-replicated borders."""
    g = to_float(gray)
    if g.ndim != 2:
        raise InvalidInputError("gradient_magnitude expects a grayscale image")
    gx = ndimage.sobel(g, axis=1, mode="nearest")
    gy = ndimage.sobel(g, axis=0, mode="nearest")
    return np.hypot(gx, gy)


def median_filter_3x3(image: np.ndarray) -> np.ndarray:
    """9-tap spatial median (3x3 window), borders handled by edge replication."""
    arr = to_float(image)
    if arr.ndim != 2:
        raise InvalidInputError("median_filter_3x3 expects a grayscale image")
    if arr.shape[0] < 3 or arr.shape[1] < 3:
        raise InvalidInputError(f"image must be at least 3x3, got {arr.shape}")
    return ndimage.median_filter(arr, size=3, mode="nearest")


def bilinear_resize(image: np.ndarray, out_h: int, out_w: int) -> np.ndarray:
    """Bilinear resample to (out_h, out_w) using pixel-center alignment.

    At unit scale the sampling grid coincides with the source pixels, so
    same-size output preserves the input exactly.
    """
    arr = to_float(image)
    in_h, in_w = arr.shape[:2]
    ys = (np.arange(out_h) + 0.5) * (in_h / out_h) - 0.5
    xs = (np.arange(out_w) + 0.5) * (in_w / out_w) - 0.5
    ys = np.clip(ys, 0.0, in_h - 1.0)
    xs = np.clip(xs, 0.0, in_w - 1.0)
    y0 = np.floor(ys).astype(int)
    x0 = np.floor(xs).astype(int)
    y1 = np.minimum(y0 + 1, in_h - 1)
    x1 = np.minimum(x0 + 1, in_w - 1)
    wy = (ys - y0)[:, None]
    wx = (xs - x0)[None, :]
    if arr.ndim == 3:
        wy = wy[..., None]
        wx = wx[..., None]
    top = arr[y0][:, x0] * (1 - wx) + arr[y0][:, x1] * wx
    bot = arr[y1][:, x0] * (1 - wx) + arr[y1][:, x1] * wx
    return top * (1 - wy) + bot * wy


def crop_resize(image: np.ndarray, box: tuple[int, int, int, int],
                out_size: int = 600) -> np.ndarray:
    """Crop (x, y, w, h) out of the image, then bilinearly resample to a square.

    The box must lie fully inside the source and be at least 2x2.
    """
    arr = to_float(image)
    x, y, w, h = (int(v) for v in box)
    in_h, in_w = arr.shape[:2]
    if w < 2 or h < 2:
        raise InvalidCropError(f"crop box must be at least 2x2, got {w}x{h}")
    if x < 0 or y < 0 or x + w > in_w or y + h > in_h:
        raise InvalidCropError(
            f"crop box {box} exceeds source bounds {in_w}x{in_h}")
    crop = arr[y:y + h, x:x + w]
    if (h, w) == (out_size, out_size):
        return crop.copy()
    return bilinear_resize(crop, out_size, out_size)
