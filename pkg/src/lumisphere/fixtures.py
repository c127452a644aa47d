"""Seeded synthetic scenes with known lighting for end-to-end testing.

Each scene is a textured background with one or more shaded spheres whose
circles and environments are recorded as ground truth, so fitting and
estimation can be validated without any external image set.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import PackingError
from .imageops import bilinear_resize
from .render import shade_disk
from .shcore import Circle

PLACEMENT_RETRIES = 400    # position draws per sphere
PLACEMENT_RESTARTS = 50    # whole-scene attempts before giving up
SPHERE_CLEARANCE = 12      # min pixel gap between a disk and the frame edge
APRON_LEVEL = 0.12         # background luminance right under each sphere


@dataclass(frozen=True)
class FixtureScene:
    """A synthetic image plus the ground truth that produced it."""

    seed: int
    image: np.ndarray                      # float RGB (H, W, 3)
    spheres: list[tuple[Circle, np.ndarray]]
    noise_std: float
    size: int

    def truth_dict(self) -> dict:
        return {
            "seed": int(self.seed),
            "size": int(self.size),
            "noiseStd": float(self.noise_std),
            "spheres": [
                {"circle": c.to_dict(), "env": [float(v) for v in env]}
                for c, env in self.spheres
            ],
        }


def random_environment(rng: np.random.Generator,
                       ambient_range: tuple[float, float] = (0.5, 0.75),
                       directional_scale: float = 0.1,
                       second_order_scale: float = 0.05) -> np.ndarray:
    """Sample a plausible environment whose disk radiance stays inside (0, 1).

    The ambient term dominates by construction so 8-bit writes never clip
    and estimation round trips are not biased by clamping.
    """
    l00 = rng.uniform(*ambient_range)
    env = np.empty(9)
    env[0] = l00
    env[1:4] = rng.uniform(-directional_scale, directional_scale, 3) * l00
    env[4:9] = rng.uniform(-second_order_scale, second_order_scale, 5) * l00
    return env


def value_noise(rng: np.random.Generator, size: int,
                cells: tuple[int, ...] = (6, 12, 24)) -> np.ndarray:
    """Multi-octave value noise in [0, 1]: coarse random grids, bilinearly upsampled."""
    field_sum = np.zeros((size, size))
    amp_total = 0.0
    amp = 1.0
    for n in cells:
        grid = rng.random((n, n))
        field_sum += amp * bilinear_resize(grid, size, size)
        amp_total += amp
        amp *= 0.5
    field_sum /= amp_total
    lo, hi = field_sum.min(), field_sum.max()
    return (field_sum - lo) / (hi - lo) if hi > lo else field_sum


def _isolated(a: Circle, b: Circle) -> bool:
    """True when neither sphere's rim can leak into the other's fit gate.

    The edge gate around an annotated circle spans 1.5x its radius (plus
    annotation slack), so rims closer than that pull the fit toward a
    compromise circle. Both orderings are checked.
    """
    d = float(np.hypot(a.cx - b.cx, a.cy - b.cy))
    return d > 1.6 * a.r + b.r + 8 and d > 1.6 * b.r + a.r + 8


def _place_circles(rng: np.random.Generator, n: int, size: int,
                   radius_range: tuple[float, float]) -> list[Circle]:
    radii = sorted((float(np.round(rng.uniform(*radius_range)))
                    for _ in range(n)), reverse=True)
    for _ in range(PLACEMENT_RESTARTS):
        placed: list[Circle] = []
        for r in radii:
            margin = r + SPHERE_CLEARANCE
            if 2 * margin >= size:
                break
            for _ in range(PLACEMENT_RETRIES):
                cx = float(np.round(rng.uniform(margin, size - 1 - margin)))
                cy = float(np.round(rng.uniform(margin, size - 1 - margin)))
                candidate = Circle(cx, cy, r)
                if all(_isolated(candidate, c) for c in placed):
                    placed.append(candidate)
                    break
            else:
                break
        if len(placed) == n:
            return placed
    raise PackingError(
        f"could not place {n} well-separated spheres of radius "
        f"{radius_range} in a {size}x{size} frame")


def _paint_sphere(image: np.ndarray, env: np.ndarray, circle: Circle) -> None:
    """Composite one shaded sphere onto the image with a hard rim.

    The rim stays a step edge deliberately: the downstream 3x3 median
    prefilter recovers clean interior values right up to the boundary for
    step edges, while any blurred rim would leak background into near-rim
    medians and bias the high-leverage grazing-angle samples.
    """
    values, mask = shade_disk(env, circle, image.shape[:2])
    shaded = np.clip(values, 0.0, 1.0)
    for ch in range(image.shape[2]):
        plane = image[:, :, ch]
        plane[mask] = shaded


def _darken_apron(texture: np.ndarray, circle: Circle,
                  level: float = APRON_LEVEL) -> None:
    """Pull the background toward a dark level in a ring around the circle.

    Rank-based contrast normalization measures a rim by the histogram mass
    between the sphere's limb intensity and the background right under it,
    so a sphere sitting on the brightest background patch would lose its
    rim entirely. A smooth dark apron under every sphere gives each rim
    the same large rank gap wherever the ramp happens to be bright; the
    transition ring also populates the intermediate intensity bins.
    """
    h, w = texture.shape
    gy, gx = np.mgrid[0:h, 0:w]
    d = np.hypot(gx - circle.cx, gy - circle.cy)
    s = np.clip((d - 1.6 * circle.r) / (0.7 * circle.r), 0.0, 1.0)
    smooth = s * s * (3.0 - 2.0 * s)
    texture *= smooth
    texture += level * (1.0 - smooth)


def make_scene(seed: int, n_spheres: int = 1,
               environments: list[np.ndarray] | None = None,
               noise_std: float = 0.0, size: int = 1024,
               radius_range: tuple[float, float] = (80, 140),
               background_level: float = 0.45,
               background_span: float = 0.5,
               background_contrast: float = 0.08) -> FixtureScene:
    """Build one seeded scene. Same arguments always produce identical pixels.

    Spheres are shaded achromatically (one environment drives all three
    channels); environments cycle through the given list or are sampled.
    The background is a wide smooth luminance ramp plus mild texture: wide
    so global histogram equalization stays close to the identity (a narrow
    unimodal background would be stretched into edges stronger than the
    sphere rims), smooth so the rims remain the dominant gradients. Each
    sphere additionally sits on a locally darkened apron so its rim keeps
    a guaranteed luminance gap to the surrounding pixels.
    """
    rng = np.random.default_rng(seed)
    circles = _place_circles(rng, n_spheres, size, radius_range)
    ramp = bilinear_resize(rng.random((3, 3)), size, size)
    texture = (background_level + background_span * (ramp - 0.5)
               + background_contrast * (value_noise(rng, size) - 0.5))
    texture = np.clip(texture, 0.02, 0.98)
    for circle in circles:
        _darken_apron(texture, circle)
    image = np.repeat(texture[:, :, None], 3, axis=2)
    # faint warm tint keeps channels distinct without adding edges
    image[:, :, 2] *= 0.97
    spheres = []
    for k, circle in enumerate(circles):
        if environments is not None:
            env = np.asarray(environments[k % len(environments)], dtype=float)
        else:
            env = random_environment(rng)
        _paint_sphere(image, env, circle)
        spheres.append((circle, env))
    if noise_std > 0:
        image = np.clip(image + rng.normal(0.0, noise_std, image.shape), 0.0, 1.0)
    return FixtureScene(seed=seed, image=image, spheres=spheres,
                        noise_std=noise_std, size=size)


def annotation_jitter(rng: np.random.Generator, circle: Circle,
                      center_px: float = 3.0, radius_frac: float = 0.04) -> Circle:
    """A plausibly sloppy manual annotation of the true circle."""
    return Circle(
        float(np.round(circle.cx + rng.uniform(-center_px, center_px))),
        float(np.round(circle.cy + rng.uniform(-center_px, center_px))),
        float(np.round(circle.r * (1.0 + rng.uniform(-radius_frac, radius_frac)))),
    )


def write_scene(scene: FixtureScene, workspace, image_id: str) -> dict:
    """Persist a scene into a workspace: image, truth sidecar, annotations.

    Sphere k gets annotation id "<image_id>@<k>" so multi-sphere scenes
    group naturally in within-image reports. Returns the written paths.
    """
    from .imgio import save_image  # local import: fixtures stay usable without Pillow

    ws = Path(workspace)
    image_path = ws / "images" / f"{image_id}.png"
    truth_path = ws / "truth" / f"{image_id}.json"
    save_image(image_path, scene.image)
    truth_path.parent.mkdir(parents=True, exist_ok=True)
    truth_path.write_text(json.dumps(scene.truth_dict(), sort_keys=True, indent=2))
    rng = np.random.default_rng(scene.seed + 1)
    ann_dir = ws / "annotations"
    ann_dir.mkdir(parents=True, exist_ok=True)
    ann_paths = []
    for k, (circle, _env) in enumerate(scene.spheres):
        ann = {
            "imageId": f"{image_id}@{k}",
            "approx": annotation_jitter(rng, circle).to_dict(),
        }
        path = ann_dir / f"{image_id}@{k}.json"
        path.write_text(json.dumps(ann, sort_keys=True, indent=2))
        ann_paths.append(str(path))
    return {"image": str(image_path), "truth": str(truth_path), "annotations": ann_paths}
