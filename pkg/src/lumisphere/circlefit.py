"""Robust circle location by EM over thresholded edge pixels.

The pipeline is: grayscale + histogram equalization, Sobel magnitude
threshold, annulus gating around a manual annotation, then alternating
soft inlier weighting against the current circle and a weighted
total-least-squares refit until the center and radius settle.

Residuals are algebraic, |(x-cx)^2 + (y-cy)^2 - r^2|, in squared pixels;
sigma lives in the same units.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from .errors import (
    DegenerateFitError,
    DegenerateWeightsError,
    InsufficientPointsError,
    InvalidInputError,
    NoEdgesError,
)
from .imageops import equalize_hist, gradient_magnitude, to_gray
from .shcore import Circle


@dataclass(frozen=True)
class EmParams:
    """Knobs for edge extraction and the EM loop.

    sigma0/sigma_min are in residual units (squared pixels). sigma0=None
    defaults to 0.1 * (annotated radius)^2 at fit time.
    """

    epsilon: float = 0.05
    sigma0: float | None = None
    sigma_min: float = 1.0
    max_iter: int = 100
    converge_tol: float = 0.5
    gate_fraction: float = 0.5
    tau: float = 0.25

    def __post_init__(self):
        if self.epsilon <= 0:
            raise InvalidInputError("epsilon must be > 0")
        if self.sigma0 is not None and self.sigma0 <= 0:
            raise InvalidInputError("sigma0 must be > 0")
        if self.sigma_min <= 0:
            raise InvalidInputError("sigma_min must be > 0")
        if self.max_iter < 1:
            raise InvalidInputError("max_iter must be >= 1")
        if self.converge_tol <= 0:
            raise InvalidInputError("converge_tol must be > 0")
        if not (0 < self.gate_fraction <= 1):
            raise InvalidInputError("gate_fraction must be in (0, 1]")
        if self.tau <= 0:
            raise InvalidInputError("tau must be > 0")


@dataclass(frozen=True)
class EdgeSet:
    """Candidate boundary pixels with per-pixel inlier weights in [0, 1]."""

    xs: np.ndarray
    ys: np.ndarray
    ws: np.ndarray

    def __post_init__(self):
        xs = np.asarray(self.xs, dtype=float)
        ys = np.asarray(self.ys, dtype=float)
        ws = np.asarray(self.ws, dtype=float)
        if not (xs.shape == ys.shape == ws.shape and xs.ndim == 1):
            raise InvalidInputError("xs, ys, ws must be equal-length 1-D arrays")
        if np.any(ws < 0) or np.any(ws > 1):
            raise InvalidInputError("weights must lie in [0, 1]")
        object.__setattr__(self, "xs", xs)
        object.__setattr__(self, "ys", ys)
        object.__setattr__(self, "ws", ws)

    def __len__(self) -> int:
        return self.xs.size


@dataclass(frozen=True)
class FitResult:
    circle: Circle
    iterations: int
    final_sigma: float
    converged: bool
    inlier_mass: float

    def to_dict(self) -> dict:
        return {
            "circle": self.circle.to_dict(),
            "iterations": int(self.iterations),
            "finalSigma": float(self.final_sigma),
            "converged": bool(self.converged),
            "inlierMass": float(self.inlier_mass),
        }

    @classmethod
    def from_dict(cls, d: dict) -> "FitResult":
        return cls(
            circle=Circle.from_dict(d["circle"]),
            iterations=int(d["iterations"]),
            final_sigma=float(d["finalSigma"]),
            converged=bool(d["converged"]),
            inlier_mass=float(d["inlierMass"]),
        )


def circle_residuals(edges: EdgeSet, c: Circle) -> np.ndarray:
    """Algebraic residual |(x-cx)^2 + (y-cy)^2 - r^2| per edge pixel."""
    return np.abs((edges.xs - c.cx) ** 2 + (edges.ys - c.cy) ** 2 - c.r ** 2)


def preprocess_edges(image: np.ndarray, annotation: Circle, params: EmParams) -> EdgeSet:
    """Extract candidate boundary pixels near the annotated circle.

    Grayscale -> 256-bin histogram equalization -> Sobel magnitude ->
    keep pixels >= tau * max magnitude -> keep the annulus
    r*(1 +/- gate_fraction) around the annotation. Weights start at 1.
    """
    gray = to_gray(image)
    h, w = gray.shape
    if not (0 <= annotation.cx < w and 0 <= annotation.cy < h):
        raise InvalidInputError("annotation center lies outside the image")
    mag = gradient_magnitude(equalize_hist(gray))
    peak = float(mag.max())
    if peak <= 0:
        raise NoEdgesError("image has no intensity gradients")
    ys, xs = np.nonzero(mag >= params.tau * peak)
    rho = np.hypot(xs - annotation.cx, ys - annotation.cy)
    lo = annotation.r * (1.0 - params.gate_fraction)
    hi = annotation.r * (1.0 + params.gate_fraction)
    keep = (rho >= lo) & (rho <= hi)
    if not np.any(keep):
        raise NoEdgesError("no edge pixels survive thresholding and gating")
    return EdgeSet(xs[keep].astype(float), ys[keep].astype(float),
                   np.ones(int(keep.sum())))


def e_step(edges: EdgeSet, c: Circle, sigma: float, epsilon: float) -> EdgeSet:
    """Reweight each pixel by its inlier likelihood against circle c.

    w = exp(-d^2/2s^2) / (exp(-d^2/2s^2) + eps). Coordinates unchanged.
    """
    if sigma <= 0 or epsilon <= 0:
        raise InvalidInputError("sigma and epsilon must be > 0")
    delta = circle_residuals(edges, c)
    like = np.exp(-(delta ** 2) / (2.0 * sigma ** 2))
    return replace(edges, ws=like / (like + epsilon))


def m_step(edges: EdgeSet) -> Circle:
    """Weighted total-least-squares circle refit.

    Minimizes ||W M v|| over unit v with rows [x^2+y^2, x, y, 1]; the circle
    is decoded from the smallest-eigenvalue eigenvector of (WM)^T (WM) as
    cx = -v2/2v1, cy = -v3/2v1, r = sqrt((v2^2+v3^2)/4v1^2 - v4/v1).
    Coordinates are centered at the weighted centroid first for conditioning;
    the decoded circle is shifted back.
    """
    active = edges.ws > 0
    if int(active.sum()) < 3:
        raise InsufficientPointsError("need at least 3 positively weighted points")
    x, y, w = edges.xs[active], edges.ys[active], edges.ws[active]
    wsum = w.sum()
    mx = float((w * x).sum() / wsum)
    my = float((w * y).sum() / wsum)
    xc, yc = x - mx, y - my
    m = np.column_stack([xc * xc + yc * yc, xc, yc, np.ones_like(xc)])
    wm = m * w[:, None]
    scatter = wm.T @ wm
    eigvals, eigvecs = np.linalg.eigh(scatter)
    v = eigvecs[:, 0]
    if abs(v[0]) < 1e-12:
        raise DegenerateFitError("minimal eigenvector has no quadratic component")
    if v[0] < 0:
        v = -v
    cx = -v[1] / (2.0 * v[0])
    cy = -v[2] / (2.0 * v[0])
    r2 = (v[1] ** 2 + v[2] ** 2) / (4.0 * v[0] ** 2) - v[3] / v[0]
    if r2 <= 0:
        raise DegenerateFitError("decoded radius is not positive")
    return Circle(cx + mx, cy + my, float(np.sqrt(r2)))


def update_sigma(edges: EdgeSet, residuals: np.ndarray, sigma_min: float = 1.0) -> float:
    """Weighted RMS residual sqrt(sum(w d^2)/sum(w)), clamped below at sigma_min."""
    w = edges.ws
    total = w.sum()
    if total <= 0:
        raise DegenerateWeightsError("all weights are zero")
    sigma = float(np.sqrt((w * np.asarray(residuals, dtype=float) ** 2).sum() / total))
    return max(sigma, sigma_min)


def fit_circle_em_edges(edges: EdgeSet, annotation: Circle, params: EmParams) -> FitResult:
    """Run the EM loop on an existing edge set, bootstrapped at the annotation.

    Iterates until center and radius each move less than converge_tol or
    max_iter is reached. Non-convergence is reported, not raised.
    """
    sigma = params.sigma0 if params.sigma0 is not None else 0.1 * annotation.r ** 2
    circle = annotation
    converged = False
    iterations = 0
    for iterations in range(1, params.max_iter + 1):
        edges = e_step(edges, circle, sigma, params.epsilon)
        new_circle = m_step(edges)
        sigma = update_sigma(edges, circle_residuals(edges, new_circle), params.sigma_min)
        moved = (abs(new_circle.cx - circle.cx), abs(new_circle.cy - circle.cy),
                 abs(new_circle.r - circle.r))
        circle = new_circle
        if max(moved) < params.converge_tol:
            converged = True
            break
    final_weights = e_step(edges, circle, sigma, params.epsilon).ws
    return FitResult(circle=circle, iterations=iterations, final_sigma=sigma,
                     converged=converged, inlier_mass=float(final_weights.sum()))


def fit_circle_em(image: np.ndarray, annotation: Circle, params: EmParams | None = None) -> FitResult:
    """Locate the imaged sphere boundary: edge extraction plus the EM loop."""
    params = params or EmParams()
    edges = preprocess_edges(image, annotation, params)
    return fit_circle_em_edges(edges, annotation, params)
