"""Acceptance suite: the toolkit's core numerical guarantees, one test each.

Each test states a guarantee end to end at its stated tolerance, with a
runtime budget where the guarantee is about batch behavior. Run with -v
for one pass/fail line per guarantee.
"""

import math
import time

import numpy as np

from lumisphere.analysis import within_image_report
from lumisphere.circlefit import EdgeSet, EmParams, fit_circle_em_edges, m_step
from lumisphere.cli import main as cli_main
from lumisphere.fixtures import make_scene, random_environment
from lumisphere.lighting import (SampleSet, estimate_all_channels,
                                 normalize_env, sample_sphere, solve_lighting)
from lumisphere.render import RenderSpec, render_sphere
from lumisphere.shcore import (DESIGN_FACTORS, Circle, design_row,
                               disk_normals, sh_basis)

POLE = np.array([0.0, 0.0, 1.0])
X_EQ = np.array([1.0, 0.0, 0.0])
Y_EQ = np.array([0.0, 1.0, 0.0])


def test_basis_closed_forms_and_design_factors():
    start = time.perf_counter()
    # independent closed forms of the nine basis functions at the axes
    c0 = 0.5 * math.sqrt(1.0 / math.pi)
    c1 = math.sqrt(3.0 / (4.0 * math.pi))
    c20 = 0.25 * math.sqrt(5.0 / math.pi)
    c22 = 0.25 * math.sqrt(15.0 / math.pi)
    closed = {
        "pole": (POLE, [c0, 0, c1, 0, 0, 0, 2 * c20, 0, 0]),
        "x": (X_EQ, [c0, 0, 0, c1, 0, 0, -c20, 0, c22]),
        "y": (Y_EQ, [c0, c1, 0, 0, 0, 0, -c20, 0, -c22]),
    }
    for normal, expected in closed.values():
        assert np.max(np.abs(sh_basis(normal) - np.array(expected))) < 1e-9
    # six-decimal reference renderings of the same values
    printed = {
        "pole": [0.282095, 0, 0.488603, 0, 0, 0, 0.630783, 0, 0],
        "x": [0.282095, 0, 0, 0.488603, 0, 0, -0.315392, 0, 0.546274],
        "y": [0.282095, 0.488603, 0, 0, 0, 0, -0.315392, 0, -0.546274],
    }
    for key, (normal, _) in closed.items():
        assert np.max(np.abs(sh_basis(normal) - np.array(printed[key]))) < 1e-6
    # the design row applies the order factors pi, 2pi/3, pi/4 exactly
    expected_factors = np.array([math.pi] + [2 * math.pi / 3] * 3
                                + [math.pi / 4] * 5)
    assert np.array_equal(DESIGN_FACTORS, expected_factors)
    row = design_row(POLE)
    assert np.max(np.abs(row - np.array(
        [0.886227, 0, 1.023327, 0, 0, 0, 0.495416, 0, 0]))) < 1e-6
    row_x = design_row(X_EQ)
    assert abs(row_x[3] - 1.023327) < 1e-6
    assert abs(row_x[6] - -0.247708) < 1e-6
    assert abs(row_x[8] - 0.429043) < 1e-6
    assert np.max(np.abs(row_x[[1, 2, 4, 5, 7]])) < 1e-12
    rng = np.random.default_rng(0)
    v = rng.normal(size=(500, 3))
    v /= np.linalg.norm(v, axis=1, keepdims=True)
    assert np.max(np.abs(design_row(v)[:, 0] - 0.886227)) < 1e-6
    assert time.perf_counter() - start < 1.0


def test_noiseless_round_trip_recovers_100_environments():
    start = time.perf_counter()
    circle = Circle(127.5, 127.5, 100.0)
    for seed in range(100):
        env = random_environment(np.random.default_rng(seed))
        out = render_sphere(env, RenderSpec(size=256, circle=circle,
                                            shared_scale=(0.0, 1.0)))
        assert out.clamped_count == 0
        got = solve_lighting(sample_sphere(out.image, circle, stride=2))
        rel = np.linalg.norm(got - env) / np.linalg.norm(env)
        assert rel < 1e-6
    assert time.perf_counter() - start < 30.0


def test_noisy_round_trip_median_error_under_five_percent():
    start = time.perf_counter()
    circle = Circle(127.5, 127.5, 100.0)
    errors = []
    for seed in range(100):
        rng = np.random.default_rng(seed)
        env = random_environment(rng)
        out = render_sphere(env, RenderSpec(size=256, circle=circle,
                                            shared_scale=(0.0, 1.0)))
        noisy = out.image + rng.normal(0.0, 0.01, out.image.shape)
        got = solve_lighting(sample_sphere(noisy, circle, stride=2))
        errors.append(np.linalg.norm(got - env) / np.linalg.norm(env))
    assert np.median(errors) < 0.05
    assert time.perf_counter() - start < 60.0


def test_production_solver_matches_orthogonal_decomposition():
    rng = np.random.default_rng(77)
    for _ in range(50):
        dx, dy = (rng.random((2, 150)) - 0.5) * 1.6
        keep = dx ** 2 + dy ** 2 < 0.98
        normals = disk_normals(dx[keep], dy[keep], 1.0)
        intensities = rng.random(int(keep.sum()))
        got = solve_lighting(SampleSet(normals, intensities))
        ref, *_ = np.linalg.lstsq(design_row(normals), intensities, rcond=None)
        assert np.max(np.abs(got - ref)) < 1e-6


def test_m_step_reproduces_exact_circles():
    # four symmetric points admit the analytic solution directly
    four = EdgeSet(np.array([1.0, -1.0, 0.0, 0.0]),
                   np.array([0.0, 0.0, 1.0, -1.0]), np.ones(4))
    fit = m_step(four)
    assert abs(fit.cx) < 1e-12 and abs(fit.cy) < 1e-12 and abs(fit.r - 1.0) < 1e-12
    rng = np.random.default_rng(5)
    for _ in range(25):
        truth = Circle(float(rng.uniform(-50, 50)), float(rng.uniform(-50, 50)),
                       float(rng.uniform(5, 80)))
        ang = rng.uniform(0, 2 * np.pi, 40)
        edges = EdgeSet(truth.cx + truth.r * np.cos(ang),
                        truth.cy + truth.r * np.sin(ang),
                        rng.uniform(0.1, 1.0, 40))
        got = m_step(edges)
        assert abs(got.cx - truth.cx) < 1e-9
        assert abs(got.cy - truth.cy) < 1e-9
        assert abs(got.r - truth.r) < 1e-9


def test_em_recovers_circles_among_uniform_clutter():
    start = time.perf_counter()
    hits = 0
    for seed in range(100):
        rng = np.random.default_rng(seed)
        truth = Circle(300.0, 300.0, float(rng.uniform(80, 140)))
        ang = rng.uniform(0, 2 * np.pi, 200)
        rad = truth.r + rng.normal(0.0, 1.0, 200)
        annotation = Circle(truth.cx + rng.uniform(-20, 20),
                            truth.cy + rng.uniform(-20, 20),
                            truth.r * (1.0 + rng.uniform(-0.2, 0.2)))
        xs_out = rng.uniform(truth.cx - 2 * truth.r, truth.cx + 2 * truth.r, 200)
        ys_out = rng.uniform(truth.cy - 2 * truth.r, truth.cy + 2 * truth.r, 200)
        edges = EdgeSet(
            np.concatenate([truth.cx + rad * np.cos(ang), xs_out]),
            np.concatenate([truth.cy + rad * np.sin(ang), ys_out]),
            np.ones(400))
        fit = fit_circle_em_edges(edges, annotation, EmParams())
        assert fit.iterations < 100
        err = max(abs(fit.circle.cx - truth.cx), abs(fit.circle.cy - truth.cy),
                  abs(fit.circle.r - truth.r))
        if err < 0.5:
            hits += 1
    assert hits >= 95
    assert time.perf_counter() - start < 60.0


def test_five_environments_make_ten_pairs():
    rng = np.random.default_rng(9)
    envs = np.array([0.6, 0.1, 0.2, -0.05, 0.02, -0.01, 0.04, 0.0, -0.03])
    group = envs + 0.05 * rng.standard_normal((5, 9))
    report = within_image_report([group])
    assert report.points_by_order[0].shape[0] == 10
    assert report.points_by_order[1].shape[0] == 30
    assert report.points_by_order[2].shape[0] == 50


def test_shared_environment_perfect_consistency_mixed_imperfect():
    # spheres lit identically must score r2 = 1 per order; independently lit
    # spheres must not
    shared_groups = []
    for seed in (11, 12, 13):
        env = random_environment(np.random.default_rng(1000 + seed))
        scene = make_scene(seed, n_spheres=2, environments=[env], size=1024,
                          radius_range=(100, 100), background_span=0.0,
                          background_contrast=0.0)
        shared_groups.append([estimate_all_channels(scene.image, c, stride=2).gray
                              for c, _ in scene.spheres])
    shared = within_image_report(shared_groups)
    for r2 in shared.r2_by_order:
        assert abs(r2 - 1.0) <= 1e-6
    mixed_groups = []
    for seed in (21, 22):
        scene = make_scene(seed, n_spheres=2, size=1024,
                          radius_range=(100, 100), background_span=0.0,
                          background_contrast=0.0)
        mixed_groups.append([estimate_all_channels(scene.image, c, stride=2).gray
                             for c, _ in scene.spheres])
    mixed = within_image_report(mixed_groups)
    for r2 in mixed.r2_by_order:
        assert r2 < 1.0


def test_intensity_scaling_scales_coefficients_only():
    scene = make_scene(61, size=512, radius_range=(60, 90))
    circle, _ = scene.spheres[0]
    base = estimate_all_channels(scene.image, circle, stride=2)
    scaled = estimate_all_channels(scene.image * 3.0, circle, stride=2)
    for name in ("red", "green", "blue", "gray"):
        a = getattr(base, name)
        b = getattr(scaled, name)
        rel = np.abs(b - 3.0 * a) / np.maximum(np.abs(3.0 * a), 1e-12)
        assert np.max(rel) < 1e-6
    assert np.max(np.abs(normalize_env(scaled.gray)
                         - normalize_env(base.gray))) < 1e-9


def test_cli_runs_are_byte_identical(tmp_path, capsys):
    outputs = []
    for run in ("one", "two"):
        ws = tmp_path / run
        assert cli_main(["fixture", "--out", str(ws), "--seed", "160",
                         "--scenes", "2", "--size", "512"]) == 0
        assert cli_main(["report", str(ws)]) == 0
        capsys.readouterr()
        outputs.append((
            (ws / "reports" / "records.json").read_bytes(),
            (ws / "reports" / "records.csv").read_bytes(),
        ))
    assert outputs[0][0] == outputs[1][0]
    assert outputs[0][1] == outputs[1][1]
