"""Lighting-environment estimation from a fitted sphere boundary.

Median-filters the reflectance, samples (normal, intensity) pairs on a
strided grid inside the disk, and solves the linear shading system for
the nine coefficients, per channel and for luma.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import (
    DegenerateEnvironmentError,
    IllConditionedError,
    InsufficientSamplesError,
    InvalidInputError,
)
from .imageops import median_filter_3x3, to_float, to_gray
from .shcore import Circle, as_environment, design_row, disk_normals

# Sampling stays this many pixels clear of the rim. Pixels near the rim
# produce near-in-plane normals that amplify noise, their 3x3 medians mix
# in background, and a sub-pixel circle-fit error can push a rim sample
# clear outside the true disk, where it reads background at full grazing
# leverage. A one-pixel inset absorbs fit errors comfortably below it.
RIM_MARGIN_PX = 1.0

CONDITION_LIMIT = 1e10


@dataclass(frozen=True)
class SampleSet:
    """Paired unit normals (p, 3) and intensities (p,), nominally in [0, 1]."""

    normals: np.ndarray
    intensities: np.ndarray

    def __len__(self) -> int:
        return self.intensities.size


@dataclass(frozen=True)
class ChannelLighting:
    """Per-channel environments; gray is estimated from luma, never averaged."""

    red: np.ndarray
    green: np.ndarray
    blue: np.ndarray
    gray: np.ndarray

    def to_dict(self) -> dict:
        return {name: [float(v) for v in getattr(self, name)]
                for name in ("red", "green", "blue", "gray")}

    @classmethod
    def from_dict(cls, d: dict) -> "ChannelLighting":
        return cls(**{name: np.asarray(d[name], dtype=float)
                      for name in ("red", "green", "blue", "gray")})


def sample_sphere(image: np.ndarray, c: Circle, stride: int = 2) -> SampleSet:
    """Sample (normal, intensity) pairs on a strided pixel grid inside the disk.

    The grid walks the circle's bounding box; a pixel is kept when it lies
    strictly inside the disk with at least a one-pixel margin to the rim,
    dx^2 + dy^2 <= (r - 1)^2. 8-bit input is rescaled to [0, 1].
    """
    if stride < 1:
        raise InvalidInputError("stride must be >= 1")
    arr = to_float(image)
    if arr.ndim != 2:
        raise InvalidInputError("sample_sphere expects a grayscale image")
    h, w = arr.shape
    if c.cx - c.r < 0 or c.cx + c.r > w - 1 or c.cy - c.r < 0 or c.cy + c.r > h - 1:
        raise InvalidInputError(f"circle {c} does not lie within the {w}x{h} image")
    xs = np.arange(math.ceil(c.cx - c.r), math.floor(c.cx + c.r) + 1, stride)
    ys = np.arange(math.ceil(c.cy - c.r), math.floor(c.cy + c.r) + 1, stride)
    gx, gy = np.meshgrid(xs, ys)
    dx = gx.ravel() - c.cx
    dy = gy.ravel() - c.cy
    inner = max(c.r - RIM_MARGIN_PX, 0.0)
    keep = dx ** 2 + dy ** 2 <= inner ** 2
    if int(keep.sum()) < 9:
        raise InsufficientSamplesError(
            f"only {int(keep.sum())} interior samples; need at least 9")
    normals = disk_normals(dx[keep], dy[keep], c.r)
    intensities = arr[gy.ravel()[keep], gx.ravel()[keep]]
    return SampleSet(normals=normals, intensities=intensities)


def solve_lighting(samples: SampleSet) -> np.ndarray:
    """Least-squares lighting coefficients for the sampled shading system.

    Stacks one design row per sample into A and solves the normal equations
    (A^T A) l = A^T b. Raises when fewer than 9 samples are given or when
    cond(A^T A) exceeds 1e10.
    """
    if len(samples) < 9:
        raise InsufficientSamplesError(f"need >= 9 samples, got {len(samples)}")
    a = design_row(samples.normals)
    ata = a.T @ a
    if np.linalg.cond(ata) > CONDITION_LIMIT:
        raise IllConditionedError("sampled normals span the basis too poorly to solve")
    return np.linalg.solve(ata, a.T @ samples.intensities)


def estimate_channel(image: np.ndarray, c: Circle, stride: int = 2) -> np.ndarray:
    """Median-filter one channel, sample the disk, and solve for its environment."""
    return solve_lighting(sample_sphere(median_filter_3x3(image), c, stride))


def estimate_all_channels(image: np.ndarray, c: Circle, stride: int = 2,
                          gamma_linearize: bool = False) -> ChannelLighting:
    """Estimate red, green, blue, and luma environments independently.

    gamma_linearize applies an inverse-2.2 power before filtering, for
    experiments on gamma-encoded sources; intensities are otherwise used
    as stored.
    """
    arr = to_float(image)
    if arr.ndim != 3 or arr.shape[2] != 3:
        raise InvalidInputError("estimate_all_channels expects an RGB image")
    if gamma_linearize:
        arr = np.clip(arr, 0.0, None) ** 2.2
    envs = {}
    for idx, name in enumerate(("red", "green", "blue")):
        envs[name] = estimate_channel(arr[:, :, idx], c, stride)
    envs["gray"] = estimate_channel(to_gray(arr), c, stride)
    return ChannelLighting(**envs)


def normalize_env(env: np.ndarray) -> np.ndarray:
    """First- and second-order coefficients divided by |l00|.

    Invariant under positive rescaling of the environment; undefined when
    the ambient coefficient vanishes.
    """
    env = as_environment(env)
    scale = abs(env[0])
    if scale <= 1e-12:
        raise DegenerateEnvironmentError("zeroth-order coefficient is zero")
    return env[1:] / scale
