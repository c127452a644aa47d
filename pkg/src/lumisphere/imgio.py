"""Lossless raster file io (PNG via Pillow), float in memory, 8-bit on disk."""

from __future__ import annotations

from pathlib import Path

import numpy as np
from PIL import Image

from .errors import WorkspaceIOError
from .imageops import to_uint8


def load_image(path) -> np.ndarray:
    """Load an image file as float RGB (H, W, 3) in [0, 1]."""
    p = Path(path)
    if not p.is_file():
        raise WorkspaceIOError(f"image file not found: {p}")
    try:
        with Image.open(p) as img:
            rgb = img.convert("RGB")
            return np.asarray(rgb, dtype=float) / 255.0
    except OSError as exc:
        raise WorkspaceIOError(f"cannot read image {p}: {exc}") from exc


def save_image(path, image: np.ndarray) -> None:
    """Write a float image ([0,1], grayscale or RGB) as 8-bit PNG."""
    p = Path(path)
    p.parent.mkdir(parents=True, exist_ok=True)
    arr = to_uint8(image)
    mode = "L" if arr.ndim == 2 else "RGB"
    try:
        Image.fromarray(arr, mode=mode).save(p, format="PNG")
    except OSError as exc:
        raise WorkspaceIOError(f"cannot write image {p}: {exc}") from exc


def png_bytes(image: np.ndarray) -> bytes:
    """Encode a float image ([0,1], grayscale or RGB) as PNG bytes."""
    import io

    arr = to_uint8(image)
    mode = "L" if arr.ndim == 2 else "RGB"
    buf = io.BytesIO()
    Image.fromarray(arr, mode=mode).save(buf, format="PNG")
    return buf.getvalue()


def image_size(path) -> tuple[int, int]:
    """(width, height) of an image file without decoding the pixels."""
    p = Path(path)
    if not p.is_file():
        raise WorkspaceIOError(f"image file not found: {p}")
    try:
        with Image.open(p) as img:
            return img.size
    except OSError as exc:
        raise WorkspaceIOError(f"cannot read image {p}: {exc}") from exc
