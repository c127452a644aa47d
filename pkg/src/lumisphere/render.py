"""Forward sphere rendering from a lighting environment."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import InvalidSpecError
from .shcore import Circle, as_environment, design_row, disk_normals


@dataclass(frozen=True)
class RenderSpec:
    """Square output frame, disk placement, and display mapping.

    shared_scale, when given, maps that (min, max) radiance range linearly
    onto display [0, 1] so two renders are directly comparable; otherwise
    each image is scaled by its own maximum radiance.
    """

    size: int
    circle: Circle
    background: float = 0.0
    shared_scale: tuple[float, float] | None = None

    def __post_init__(self):
        c = self.circle
        if (c.cx - c.r < 0 or c.cx + c.r > self.size - 1
                or c.cy - c.r < 0 or c.cy + c.r > self.size - 1):
            raise InvalidSpecError(
                f"circle {c} does not fit inside a {self.size}x{self.size} frame")
        if not (0.0 <= self.background <= 1.0):
            raise InvalidSpecError("background must lie in [0, 1]")


@dataclass(frozen=True)
class RenderResult:
    image: np.ndarray
    clamped_count: int   # pixels whose negative radiance was clamped to 0
    raw_max: float       # maximum unclamped radiance over the disk


def shade_disk(env: np.ndarray, circle: Circle, shape: tuple[int, int]) -> tuple[np.ndarray, np.ndarray]:
    """Unclamped radiance over the disk's strictly interior pixels.

    Returns (values, mask) where mask marks interior pixels of an array of
    the given shape and values holds their radiance.
    """
    env = as_environment(env)
    h, w = shape
    gy, gx = np.mgrid[0:h, 0:w]
    dx = gx - circle.cx
    dy = gy - circle.cy
    mask = dx * dx + dy * dy < circle.r ** 2
    normals = disk_normals(dx[mask], dy[mask], circle.r)
    return design_row(normals) @ env, mask


def render_sphere(env: np.ndarray, spec: RenderSpec) -> RenderResult:
    """Render the environment on a sphere; deterministic for identical inputs.

    Negative radiance is clamped to zero before display scaling. Pixels
    outside the disk take the background intensity.
    """
    values, mask = shade_disk(env, spec.circle, (spec.size, spec.size))
    clamped = int(np.count_nonzero(values < 0))
    raw_max = float(values.max()) if values.size else 0.0
    shaded = np.maximum(values, 0.0)
    if spec.shared_scale is not None:
        lo, hi = spec.shared_scale
        if not hi > lo:
            raise InvalidSpecError("shared_scale must satisfy max > min")
        display = np.clip((shaded - lo) / (hi - lo), 0.0, 1.0)
    elif raw_max > 0:
        display = shaded / raw_max
    else:
        display = np.zeros_like(shaded)
    image = np.full((spec.size, spec.size), float(spec.background))
    image[mask] = display
    return RenderResult(image=image, clamped_count=clamped, raw_max=raw_max)
