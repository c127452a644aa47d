"""Order-2 spherical-harmonic basis, sphere normals, and the forward shading model.

Coordinate convention: x grows rightward in the image, y grows downward,
z points out of the image toward the camera. With light from above,
the first-order y coefficient of a fitted environment comes out negative.

Canonical coefficient order everywhere (basis values, environments, files):
(0,0), (1,-1), (1,0), (1,1), (2,-2), (2,-1), (2,0), (2,1), (2,2).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import InvalidInputError, InvalidNormalError, OutsideDiskError

# Basis normalization constants.
SH_C0 = 1.0 / math.sqrt(4.0 * math.pi)            # 0.2820948
SH_C1 = math.sqrt(3.0 / (4.0 * math.pi))          # 0.4886025
SH_C2 = 3.0 * math.sqrt(5.0 / (12.0 * math.pi))   # 1.0925484, xy / yz / xz terms
SH_C2_0 = 0.5 * math.sqrt(5.0 / (4.0 * math.pi))  # 0.3153916, (3z^2 - 1) term
SH_C2_2 = 1.5 * math.sqrt(5.0 / (12.0 * math.pi)) # 0.5462742, (x^2 - y^2) term

# Lambertian convolution factors applied per order when shading.
DESIGN_FACTORS = np.array(
    [math.pi]
    + [2.0 * math.pi / 3.0] * 3
    + [math.pi / 4.0] * 5
)

COEFF_NAMES = ("l00", "l1m1", "l10", "l11", "l2m2", "l2m1", "l20", "l21", "l22")
NORMALIZED_COEFF_NAMES = COEFF_NAMES[1:]

UNIT_TOL = 1e-6


@dataclass(frozen=True)
class Circle:
    """Image-space circle: center (cx, cy) and radius r, all in pixels."""

    cx: float
    cy: float
    r: float

    def __post_init__(self):
        if not (self.r > 0 and np.isfinite([self.cx, self.cy, self.r]).all()):
            raise InvalidInputError(f"circle requires finite center and r > 0, got {self}")

    def to_dict(self) -> dict:
        return {"cx": float(self.cx), "cy": float(self.cy), "r": float(self.r)}

    @classmethod
    def from_dict(cls, d: dict) -> "Circle":
        return cls(float(d["cx"]), float(d["cy"]), float(d["r"]))


def _check_unit(normals: np.ndarray) -> np.ndarray:
    n = np.asarray(normals, dtype=float)
    if n.shape[-1] != 3:
        raise InvalidNormalError(f"normals must have 3 components, got shape {n.shape}")
    norms = np.linalg.norm(n, axis=-1)
    if not np.all(np.abs(norms - 1.0) <= UNIT_TOL):
        worst = float(np.max(np.abs(norms - 1.0)))
        raise InvalidNormalError(f"normal deviates from unit length by {worst:.3e}")
    return n


def sh_basis(normals: np.ndarray) -> np.ndarray:
    """Evaluate the nine order-0..2 basis functions at unit normals.

    Accepts shape (..., 3); returns shape (..., 9) in canonical order.
    Raises InvalidNormalError when any input norm deviates from 1 by > 1e-6.
    """
    n = _check_unit(normals)
    x, y, z = n[..., 0], n[..., 1], n[..., 2]
    out = np.empty(n.shape[:-1] + (9,), dtype=float)
    out[..., 0] = SH_C0
    out[..., 1] = SH_C1 * y
    out[..., 2] = SH_C1 * z
    out[..., 3] = SH_C1 * x
    out[..., 4] = SH_C2 * x * y
    out[..., 5] = SH_C2 * y * z
    out[..., 6] = SH_C2_0 * (3.0 * z * z - 1.0)
    out[..., 7] = SH_C2 * x * z
    out[..., 8] = SH_C2_2 * (x * x - y * y)
    return out


def design_row(normals: np.ndarray) -> np.ndarray:
    """Basis values scaled by the per-order convolution factors pi, 2pi/3, pi/4.

    One row of the shading system per normal; shape mirrors sh_basis.
    """
    return sh_basis(normals) * DESIGN_FACTORS


def disk_normals(dx: np.ndarray, dy: np.ndarray, r: float) -> np.ndarray:
    """Unit normals for pixel offsets (dx, dy) from a circle center of radius r.

    Offsets must lie strictly inside the disk. z is always positive.
    """
    dx = np.asarray(dx, dtype=float)
    dy = np.asarray(dy, dtype=float)
    radicand = r * r - dx * dx - dy * dy
    if np.any(radicand <= 0):
        raise OutsideDiskError("pixel on or outside the circle")
    n = np.stack([dx, dy, np.sqrt(radicand)], axis=-1)
    return n / np.linalg.norm(n, axis=-1, keepdims=True)


def normal_from_pixel(x: float, y: float, c: Circle) -> np.ndarray:
    """Unit surface normal of the imaged sphere at pixel (x, y).

    The pixel must be strictly inside the circle's disk.
    """
    return disk_normals(x - c.cx, y - c.cy, c.r)


def radiance(env: np.ndarray, normals: np.ndarray) -> np.ndarray | float:
    """Shaded intensity of the environment at the given unit normals.

    May be negative; clamping is a display decision left to the renderer.
    """
    env = as_environment(env)
    vals = design_row(normals) @ env
    return float(vals) if vals.ndim == 0 else vals


def as_environment(env) -> np.ndarray:
    """Coerce to a finite 9-vector of lighting coefficients."""
    arr = np.asarray(env, dtype=float)
    if arr.shape != (9,):
        raise InvalidInputError(f"lighting environment must have 9 coefficients, got shape {arr.shape}")
    if not np.isfinite(arr).all():
        raise InvalidInputError("lighting environment coefficients must be finite")
    return arr
