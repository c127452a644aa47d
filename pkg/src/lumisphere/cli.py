"""Command-line front end for the sphere-lighting pipeline.

Subcommands mirror the stages: fit a circle, estimate lighting, render a
sphere, generate synthetic fixtures, run the batch report, analyze record
sets, and serve the local annotation API. Structured errors go to stderr
as JSON; the process exits nonzero only on input or io problems, never on
a recorded non-converged fit.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from pathlib import Path

import numpy as np

from .analysis import cross_set_report, within_image_report
from .circlefit import EmParams, fit_circle_em
from .errors import InvalidInputError, LumisphereError, WorkspaceIOError
from .fixtures import make_scene, random_environment, write_scene
from .imageops import crop_resize
from .imgio import load_image, save_image
from .lighting import estimate_all_channels, normalize_env
from .pipeline import (Annotation, emit_report, group_for_within,
                       load_annotation, load_records, normalized_set,
                       run_batch, run_image_pipeline, scan_workspace)
from .render import RenderSpec, render_sphere
from .shcore import Circle


def _dump(payload: dict, out: str | None) -> None:
    text = json.dumps(payload, sort_keys=True, indent=2) + "\n"
    if out and out != "-":
        Path(out).parent.mkdir(parents=True, exist_ok=True)
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


def _load_json(path) -> dict:
    p = Path(path)
    if not p.is_file():
        raise WorkspaceIOError(f"file not found: {p}")
    return json.loads(p.read_text())


def _em_params(args) -> EmParams:
    """EmParams from --params file overlaid with any direct flags."""
    fields = {}
    if getattr(args, "params", None):
        raw = _load_json(args.params)
        allowed = {"epsilon", "sigma0", "sigma_min", "max_iter",
                   "converge_tol", "gate_fraction", "tau"}
        unknown = set(raw) - allowed
        if unknown:
            raise InvalidInputError(f"unknown EM parameter(s): {sorted(unknown)}")
        fields.update(raw)
    if getattr(args, "tau", None) is not None:
        fields["tau"] = args.tau
    if getattr(args, "epsilon", None) is not None:
        fields["epsilon"] = args.epsilon
    return EmParams(**fields)


def _read_circle(args) -> Circle:
    if args.circle:
        d = _load_json(args.circle)
        # accept either a bare circle or a fit result carrying one
        return Circle.from_dict(d["circle"] if "circle" in d else d)
    if None in (args.cx, args.cy, args.r):
        raise InvalidInputError("provide --circle FILE or all of --cx --cy --r")
    return Circle(args.cx, args.cy, args.r)


def _read_env(path) -> np.ndarray:
    d = _load_json(path)
    values = d["env"] if isinstance(d, dict) else d
    env = np.asarray(values, dtype=float)
    if env.shape != (9,):
        raise InvalidInputError("environment file must hold 9 coefficients")
    return env


def cmd_fit(args) -> int:
    ann = load_annotation(args.annotation)
    if args.full:
        record = run_image_pipeline(args.image, ann, _em_params(args),
                                    stride=args.stride)
        _dump(record.to_dict(), args.out)
        return 0
    image = load_image(args.image)
    if ann.crop_box is not None:
        image = crop_resize(image, ann.crop_box)
    fit = fit_circle_em(image, ann.approx, _em_params(args))
    _dump(fit.to_dict(), args.out)
    return 0


def cmd_estimate(args) -> int:
    circle = _read_circle(args)
    image = load_image(args.image)
    channels = estimate_all_channels(image, circle, stride=args.stride)
    payload = {
        "channels": channels.to_dict(),
        "normalized": [float(v) for v in normalize_env(channels.gray)],
    }
    _dump(payload, args.out)
    return 0


def cmd_render(args) -> int:
    env = _read_env(args.env)
    circle = _read_circle(args)
    shared = None
    if args.shared:
        lo, hi = (float(v) for v in args.shared.split(","))
        shared = (lo, hi)
    spec = RenderSpec(size=args.size, circle=circle,
                      background=args.background, shared_scale=shared)
    result = render_sphere(env, spec)
    save_image(args.out, result.image)
    _dump({"out": args.out, "clampedCount": result.clamped_count,
           "rawMax": result.raw_max}, "-")
    return 0


def cmd_fixture(args) -> int:
    rng = np.random.default_rng(args.seed)
    manifest = {"workspace": args.out, "scenes": []}
    for k in range(args.scenes):
        # one environment shared by every sphere of a scene, fresh per scene,
        # so scenes stay distinguishable in cross-scene statistics
        envs = [random_environment(rng)] if args.shared_env else None
        scene = make_scene(seed=args.seed + k, n_spheres=args.spheres,
                           environments=envs, noise_std=args.noise_std,
                           size=args.size)
        image_id = f"scene{args.seed + k:04d}"
        paths = write_scene(scene, args.out, image_id)
        manifest["scenes"].append({"imageId": image_id, "seed": scene.seed,
                                   "spheres": len(scene.spheres), **paths})
    _dump(manifest, "-")
    return 0


def cmd_report(args) -> int:
    jobs = scan_workspace(args.workspace)
    records, failures = run_batch(jobs, _em_params(args), stride=args.stride)
    reports = {}
    groups = group_for_within(records)
    if groups:
        reports["within"] = within_image_report(groups).to_dict()
    out_dir = args.out or str(Path(args.workspace) / "reports")
    paths = emit_report(records, out_dir, reports=reports or None, failures=failures)
    _dump({"records": len(records), "failures": len(failures), **paths}, "-")
    return 0


def _cross_csv(report) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["coeff", "q35A", "q50A", "q65A", "q35B", "q50B", "q65B", "r2"])
    for name in report.set_a:
        a, b = report.set_a[name], report.set_b[name]
        writer.writerow([name, *[repr(v) for v in (a.q35, a.q50, a.q65,
                                                   b.q35, b.q50, b.q65)],
                         repr(report.r2)])
    return buf.getvalue()


def _within_csv(report) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["order", "x", "y", "r2"])
    for order, (pts, r2) in enumerate(zip(report.points_by_order,
                                          report.r2_by_order)):
        for x, y in pts:
            writer.writerow([order, repr(float(x)), repr(float(y)), repr(r2)])
    return buf.getvalue()


def cmd_analyze(args) -> int:
    if args.mode == "cross":
        set_a = normalized_set(load_records(args.records_a))
        set_b = normalized_set(load_records(args.records_b))
        report = cross_set_report(set_a, set_b, r2_mode=args.r2_mode)
        text = _cross_csv(report) if args.format == "csv" else None
    else:
        records = load_records(args.records)
        groups = group_for_within(records)
        if not groups:
            raise InvalidInputError(
                "no image contributes 2 or more records; within-image "
                "analysis needs multi-sphere images")
        report = within_image_report(groups, mirror=not args.no_mirror)
        text = _within_csv(report) if args.format == "csv" else None
    if args.format == "csv":
        if args.out and args.out != "-":
            Path(args.out).parent.mkdir(parents=True, exist_ok=True)
            Path(args.out).write_text(text)
        else:
            sys.stdout.write(text)
    else:
        _dump(report.to_dict(), args.out)
    return 0


def cmd_serve(args) -> int:
    import uvicorn

    from .server import create_app

    app = create_app(args.workspace)
    uvicorn.run(app, host=args.host, port=args.port, log_level="warning")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="lumisphere",
        description="Sphere lighting estimation and consistency analysis.")
    sub = parser.add_subparsers(dest="command", required=True)

    def add_em_flags(p):
        p.add_argument("--params", help="JSON file of EM parameter overrides")
        p.add_argument("--tau", type=float, default=None,
                       help="edge threshold fraction of peak gradient")
        p.add_argument("--epsilon", type=float, default=None,
                       help="EM uniform-outlier mixing weight")

    def add_circle_flags(p):
        p.add_argument("--circle", help="JSON file with cx, cy, r (or a fit result)")
        p.add_argument("--cx", type=float, default=None)
        p.add_argument("--cy", type=float, default=None)
        p.add_argument("--r", type=float, default=None)

    p = sub.add_parser("fit", help="fit a circle to an annotated sphere image")
    p.add_argument("image")
    p.add_argument("--annotation", required=True, help="annotation JSON file")
    p.add_argument("--stride", type=int, default=2)
    p.add_argument("--full", action="store_true",
                   help="also estimate lighting and emit the full record")
    p.add_argument("--out", help="output file (default stdout)")
    add_em_flags(p)
    p.set_defaults(func=cmd_fit)

    p = sub.add_parser("estimate", help="estimate lighting inside a known circle")
    p.add_argument("image")
    add_circle_flags(p)
    p.add_argument("--stride", type=int, default=2)
    p.add_argument("--out", help="output file (default stdout)")
    p.set_defaults(func=cmd_estimate)

    p = sub.add_parser("render", help="render a sphere under an environment")
    p.add_argument("--env", required=True, help="JSON file with 9 coefficients")
    add_circle_flags(p)
    p.add_argument("--size", type=int, default=600)
    p.add_argument("--background", type=float, default=0.0)
    p.add_argument("--shared", help="display scale as 'lo,hi' shared across renders")
    p.add_argument("--out", required=True, help="output PNG path")
    p.set_defaults(func=cmd_render)

    p = sub.add_parser("fixture", help="generate seeded synthetic scenes")
    p.add_argument("--out", required=True, help="workspace directory")
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--scenes", type=int, default=1)
    p.add_argument("--spheres", type=int, default=1)
    p.add_argument("--noise-std", type=float, default=0.0)
    p.add_argument("--size", type=int, default=1024)
    p.add_argument("--shared-env", action="store_true",
                   help="one environment shared by every sphere")
    p.set_defaults(func=cmd_fixture)

    p = sub.add_parser("report", help="run the batch pipeline over a workspace")
    p.add_argument("workspace")
    p.add_argument("--out", help="report directory (default <workspace>/reports)")
    p.add_argument("--stride", type=int, default=2)
    p.add_argument("--format", choices=("json", "csv"), default="json",
                   help="kept for symmetry; both files are always written")
    add_em_flags(p)
    p.set_defaults(func=cmd_report)

    p = sub.add_parser("analyze", help="consistency statistics over record files")
    mode = p.add_subparsers(dest="mode", required=True)

    pc = mode.add_parser("cross", help="compare two record sets")
    # two separate positionals: a tuple metavar on one nargs=2 positional
    # crashes argparse help formatting (cpython issue 58282)
    pc.add_argument("records_a", metavar="RECORDS_A")
    pc.add_argument("records_b", metavar="RECORDS_B")
    pc.add_argument("--r2-mode", choices=("median", "matched"), default="median")
    pc.add_argument("--format", choices=("json", "csv"), default="json")
    pc.add_argument("--out", help="output file (default stdout)")
    pc.set_defaults(func=cmd_analyze)

    pw = mode.add_parser("within", help="pairwise spheres within each image")
    pw.add_argument("records", metavar="RECORDS")
    pw.add_argument("--no-mirror", action="store_true",
                    help="single-orientation scatter R^2")
    pw.add_argument("--format", choices=("json", "csv"), default="json")
    pw.add_argument("--out", help="output file (default stdout)")
    pw.set_defaults(func=cmd_analyze)

    p = sub.add_parser("serve", help="serve the annotation API over HTTP")
    p.add_argument("workspace")
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=8472)
    p.set_defaults(func=cmd_serve)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except LumisphereError as exc:
        json.dump({"error": exc.kind, "detail": str(exc)}, sys.stderr)
        sys.stderr.write("\n")
        return 1
    except OSError as exc:
        json.dump({"error": "io", "detail": str(exc)}, sys.stderr)
        sys.stderr.write("\n")
        return 1


if __name__ == "__main__":
    sys.exit(main())
