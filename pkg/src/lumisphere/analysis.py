"""Consistency statistics over estimated lighting environments.

Two studies: cross-set comparison of normalized coefficients via quantile
summaries and a squared Pearson correlation of the per-coefficient
medians, and within-image pairwise comparison of raw coefficients pooled
by harmonic order.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import EmptyInputError, InvalidInputError
from .shcore import NORMALIZED_COEFF_NAMES

# Canonical order slices of a 9-vector by harmonic order.
ORDER_SLICES = (slice(0, 1), slice(1, 4), slice(4, 9))


@dataclass(frozen=True)
class QuantileTriple:
    q35: float
    q50: float
    q65: float

    def __post_init__(self):
        if not (self.q35 <= self.q50 <= self.q65):
            raise InvalidInputError("quantiles must be ordered q35 <= q50 <= q65")

    def to_dict(self) -> dict:
        return {"q35": float(self.q35), "q50": float(self.q50), "q65": float(self.q65)}


@dataclass(frozen=True)
class CrossSetReport:
    """Per-coefficient quantile triples for both sets plus the median R^2."""

    set_a: dict[str, QuantileTriple]
    set_b: dict[str, QuantileTriple]
    r2: float

    def to_dict(self) -> dict:
        return {
            "setA": {k: v.to_dict() for k, v in self.set_a.items()},
            "setB": {k: v.to_dict() for k, v in self.set_b.items()},
            "r2": float(self.r2),
        }


@dataclass(frozen=True)
class WithinImageReport:
    """Pairwise coefficient scatter pooled by order, with R^2 per order.

    points_by_order holds one (m, 2) array per harmonic order, one
    orientation per unordered sphere pair (lower index on the first axis).
    """

    points_by_order: tuple[np.ndarray, np.ndarray, np.ndarray]
    r2_by_order: tuple[float, float, float]

    def to_dict(self) -> dict:
        return {
            "orders": {
                str(i): {
                    "points": [[float(a), float(b)] for a, b in pts],
                    "r2": float(r2),
                }
                for i, (pts, r2) in enumerate(zip(self.points_by_order, self.r2_by_order))
            },
            "r2ByOrder": [float(v) for v in self.r2_by_order],
        }


def quantile_summary(values, qs=(0.35, 0.5, 0.65)) -> QuantileTriple:
    """Linear-interpolation quantiles at index q*(n-1) over the sorted values."""
    arr = np.asarray(values, dtype=float)
    if arr.size == 0:
        raise EmptyInputError("cannot summarize an empty list")
    lo, mid, hi = np.quantile(arr, qs, method="linear")
    return QuantileTriple(float(lo), float(mid), float(hi))


def pearson_r2(xs, ys) -> float:
    """Square of the Pearson correlation coefficient."""
    x = np.asarray(xs, dtype=float)
    y = np.asarray(ys, dtype=float)
    if x.shape != y.shape or x.ndim != 1 or x.size < 2:
        raise InvalidInputError("need two equal-length lists of at least 2 values")
    xd = x - x.mean()
    yd = y - y.mean()
    vx = float(xd @ xd)
    vy = float(yd @ yd)
    if vx == 0.0 or vy == 0.0:
        raise InvalidInputError("correlation undefined for zero-variance input")
    r = float(xd @ yd) / np.sqrt(vx * vy)
    return float(r * r)


def _as_normalized_set(envs) -> np.ndarray:
    arr = np.asarray(envs, dtype=float)
    if arr.ndim != 2 or arr.shape[1] != 8 or arr.shape[0] == 0:
        raise InvalidInputError(
            "expected a non-empty list of 8-coefficient normalized environments")
    return arr


def cross_set_report(set_a, set_b, r2_mode: str = "median") -> CrossSetReport:
    """Compare two sets of normalized environments coefficient by coefficient.

    r2_mode "median" correlates the 8 paired per-coefficient medians;
    "matched" rank-matches each coefficient's sorted values across sets at
    min(len(a), len(b)) common quantile levels and pools all pairs.
    """
    a = _as_normalized_set(set_a)
    b = _as_normalized_set(set_b)
    tri_a = {name: quantile_summary(a[:, i]) for i, name in enumerate(NORMALIZED_COEFF_NAMES)}
    tri_b = {name: quantile_summary(b[:, i]) for i, name in enumerate(NORMALIZED_COEFF_NAMES)}
    if r2_mode == "median":
        r2 = pearson_r2([tri_a[n].q50 for n in NORMALIZED_COEFF_NAMES],
                        [tri_b[n].q50 for n in NORMALIZED_COEFF_NAMES])
    elif r2_mode == "matched":
        levels = np.linspace(0.0, 1.0, min(a.shape[0], b.shape[0]))
        xs = np.concatenate([np.quantile(a[:, i], levels) for i in range(8)])
        ys = np.concatenate([np.quantile(b[:, i], levels) for i in range(8)])
        r2 = pearson_r2(xs, ys)
    else:
        raise InvalidInputError(f"unknown r2_mode {r2_mode!r}")
    return CrossSetReport(set_a=tri_a, set_b=tri_b, r2=r2)


def within_image_report(per_image_envs, mirror: bool = True) -> WithinImageReport:
    """Pairwise comparison of raw environments across spheres of each image.

    Every image must contribute at least two environments; an image with k
    spheres yields k*(k-1)/2 pairs. Coefficients are pooled by harmonic
    order (1, 3, and 5 values per pair). Scatter points keep a single
    orientation (lower sphere index first); with mirror=True (default) the
    R^2 per order is computed over both orientations, making it independent
    of sphere labeling.
    """
    groups = []
    for envs in per_image_envs:
        arr = np.asarray(envs, dtype=float)
        if arr.ndim != 2 or arr.shape[1] != 9:
            raise InvalidInputError("each image must supply 9-coefficient environments")
        if arr.shape[0] < 2:
            raise InvalidInputError("each image needs at least 2 environments to compare")
        groups.append(arr)
    if not groups:
        raise InvalidInputError("no images supplied")
    points = ([], [], [])
    for arr in groups:
        k = arr.shape[0]
        for i in range(k):
            for j in range(i + 1, k):
                for order, sl in enumerate(ORDER_SLICES):
                    points[order].append(np.column_stack([arr[i, sl], arr[j, sl]]))
    pooled = tuple(np.concatenate(p, axis=0) for p in points)
    r2s = []
    for pts in pooled:
        if mirror:
            both = np.concatenate([pts, pts[:, ::-1]], axis=0)
            r2s.append(pearson_r2(both[:, 0], both[:, 1]))
        else:
            r2s.append(pearson_r2(pts[:, 0], pts[:, 1]))
    return WithinImageReport(points_by_order=pooled, r2_by_order=tuple(r2s))
