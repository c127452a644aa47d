"""Tests for forward sphere rendering."""

import numpy as np
import pytest
from hypothesis import given, strategies as st

from lumisphere.errors import InvalidInputError, InvalidSpecError
from lumisphere.lighting import estimate_channel
from lumisphere.render import RenderSpec, render_sphere, shade_disk
from lumisphere.shcore import Circle, radiance

AMBIENT = np.array([1.0, 0, 0, 0, 0, 0, 0, 0, 0])


def spec(size=64, circle=None, **kw):
    return RenderSpec(size=size, circle=circle or Circle(31.5, 31.5, 25.0), **kw)


# ---------------------------------------------------------------- shade_disk


def test_shade_disk_mask_is_strict_interior():
    c = Circle(31.5, 31.5, 25.0)
    _, mask = shade_disk(AMBIENT, c, (64, 64))
    gy, gx = np.mgrid[0:64, 0:64]
    d2 = (gx - c.cx) ** 2 + (gy - c.cy) ** 2
    assert np.array_equal(mask, d2 < c.r ** 2)


def test_shade_disk_matches_pointwise_radiance(rng):
    env = rng.standard_normal(9) * 0.3
    c = Circle(20.0, 24.0, 15.0)
    values, mask = shade_disk(env, c, (48, 48))
    gy, gx = np.mgrid[0:48, 0:48]
    pick = rng.choice(int(mask.sum()), size=25, replace=False)
    xs, ys = gx[mask][pick], gy[mask][pick]
    dx, dy = xs - c.cx, ys - c.cy
    z = np.sqrt(c.r ** 2 - dx ** 2 - dy ** 2)
    n = np.stack([dx, dy, z], axis=1) / c.r
    assert np.allclose(values[pick], radiance(env, n), atol=1e-12)


def test_shade_disk_values_may_be_negative():
    env = np.array([-0.5, 0, 0, 0, 0, 0, 0, 0, 0])
    values, _ = shade_disk(env, Circle(31.5, 31.5, 25), (64, 64))
    assert np.all(values < 0)


def test_shade_disk_validates_env():
    with pytest.raises(InvalidInputError):
        shade_disk(np.zeros(4), Circle(31.5, 31.5, 25), (64, 64))


# ---------------------------------------------------------------- render


def test_render_ambient_unit_disk():
    out = render_sphere(AMBIENT, spec())
    assert out.image.shape == (64, 64)
    assert out.clamped_count == 0
    # self-scaling maps the constant disk to exactly 1
    _, mask = shade_disk(AMBIENT, Circle(31.5, 31.5, 25.0), (64, 64))
    assert np.allclose(out.image[mask], 1.0)
    assert np.all(out.image[~mask] == 0.0)


def test_render_background_level():
    out = render_sphere(AMBIENT, spec(background=0.25))
    assert out.image[0, 0] == 0.25


def test_render_self_scale_peaks_at_one():
    env = np.array([0.6, 0, 0.3, 0, 0, 0, 0, 0, 0])
    out = render_sphere(env, spec())
    assert abs(out.image.max() - 1.0) < 1e-12
    assert out.raw_max > 0


def test_render_counts_clamped_pixels():
    # strong -z light: radiance negative over part of the disk
    env = np.array([0.2, 0, -0.6, 0, 0, 0, 0, 0, 0])
    values, _ = shade_disk(env, Circle(31.5, 31.5, 25.0), (64, 64))
    out = render_sphere(env, spec())
    assert out.clamped_count == int(np.count_nonzero(values < 0))
    assert out.clamped_count > 0
    assert out.image.min() >= 0.0


def test_render_all_negative_gives_flat_zero_disk():
    env = np.array([-1.0, 0, 0, 0, 0, 0, 0, 0, 0])
    out = render_sphere(env, spec())
    assert out.raw_max < 0
    assert np.all(out.image == 0.0)
    assert out.clamped_count == int(np.sum(
        shade_disk(env, Circle(31.5, 31.5, 25.0), (64, 64))[1]))


def test_render_shared_scale_unit_range_is_identity():
    # (0, 1) shared range reproduces clamped radiance values directly
    env = np.array([0.5, 0, 0.2, 0, 0, 0, 0, 0, 0])
    out_shared = render_sphere(env, spec(shared_scale=(0.0, 1.0)))
    values, mask = shade_disk(env, Circle(31.5, 31.5, 25.0), (64, 64))
    assert np.allclose(out_shared.image[mask], np.clip(values, 0, 1), atol=1e-12)


def test_render_shared_scale_comparable_pair():
    # the brighter environment renders strictly brighter under a shared range
    dim = AMBIENT * 0.3
    bright = AMBIENT * 0.9
    hi = render_sphere(bright, spec()).raw_max
    a = render_sphere(dim, spec(shared_scale=(0.0, hi)))
    b = render_sphere(bright, spec(shared_scale=(0.0, hi)))
    _, mask = shade_disk(AMBIENT, Circle(31.5, 31.5, 25.0), (64, 64))
    assert np.all(a.image[mask] < b.image[mask])
    assert np.allclose(b.image[mask], 1.0)


def test_render_deterministic():
    env = np.array([0.5, 0.1, 0.2, -0.1, 0, 0.05, -0.02, 0, 0.04])
    a = render_sphere(env, spec())
    b = render_sphere(env, spec())
    assert np.array_equal(a.image, b.image)


@given(st.floats(0.05, 2.0))
def test_render_self_scale_invariant_under_gain(gain):
    # scaling the environment leaves the self-scaled display unchanged
    env = np.array([0.5, 0.1, 0.2, -0.1, 0, 0.05, -0.02, 0, 0.04])
    a = render_sphere(env, spec())
    b = render_sphere(env * gain, spec())
    assert np.max(np.abs(a.image - b.image)) < 1e-9


def test_render_estimate_round_trip():
    # rendering with a unit shared range then re-estimating returns the env
    env = np.array([0.55, 0.05, 0.18, -0.08, 0.02, 0.01, -0.03, 0.02, 0.04])
    c = Circle(127.5, 127.5, 100.0)
    out = render_sphere(env, RenderSpec(size=256, circle=c, shared_scale=(0.0, 1.0)))
    assert out.clamped_count == 0
    est = estimate_channel(out.image, c, stride=2)
    assert np.max(np.abs(est - env)) < 0.02


# ---------------------------------------------------------------- validation


def test_spec_rejects_protruding_circle():
    with pytest.raises(InvalidSpecError):
        RenderSpec(size=64, circle=Circle(5.0, 31.5, 25.0))


def test_spec_rejects_bad_background():
    with pytest.raises(InvalidSpecError):
        spec(background=1.5)


def test_render_rejects_inverted_shared_scale():
    with pytest.raises(InvalidSpecError):
        render_sphere(AMBIENT, spec(shared_scale=(1.0, 1.0)))
