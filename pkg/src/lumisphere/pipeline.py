"""Batch orchestration: annotations in, fitted circles and environments out.

Workspace layout shared by the CLI and the local service:

    images/<id>.png           source images
    annotations/<rid>.json    one file per annotated sphere
    truth/<id>.json           fixture ground truth (when synthetic)
    results/<rid>.json        fit + lighting per annotated sphere
    reports/                  emitted report files

A record id <rid> is "<imageId>" for single-sphere images or
"<imageId>@<k>" for sphere k of a multi-sphere image; the part before
"@" names the image file and groups records for within-image analysis.
"""

from __future__ import annotations

import csv
import io
import json
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .circlefit import EmParams, FitResult, fit_circle_em
from .errors import EmptyInputError, InvalidInputError, WorkspaceIOError
from .imageops import crop_resize
from .imgio import load_image
from .lighting import ChannelLighting, estimate_all_channels, normalize_env
from .shcore import COEFF_NAMES, Circle

THREADS_ENV_VAR = "LUMISPHERE_THREADS"


@dataclass(frozen=True)
class Annotation:
    """Analyst-supplied approximate circle, optionally after a crop."""

    image_id: str
    approx: Circle
    crop_box: tuple[int, int, int, int] | None = None

    def to_dict(self) -> dict:
        d = {"imageId": self.image_id, "approx": self.approx.to_dict()}
        if self.crop_box is not None:
            x, y, w, h = self.crop_box
            d["cropBox"] = {"x": int(x), "y": int(y), "w": int(w), "h": int(h)}
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "Annotation":
        if "imageId" not in d or "approx" not in d:
            raise InvalidInputError("annotation requires imageId and approx")
        box = None
        if d.get("cropBox") is not None:
            cb = d["cropBox"]
            box = (int(cb["x"]), int(cb["y"]), int(cb["w"]), int(cb["h"]))
        return cls(image_id=str(d["imageId"]), approx=Circle.from_dict(d["approx"]),
                   crop_box=box)


@dataclass(frozen=True)
class ImageRecord:
    """Everything the pipeline learned about one annotated sphere."""

    image_id: str
    fit: FitResult
    channels: ChannelLighting
    normalized: np.ndarray  # normalize_env(channels.gray)

    def to_dict(self) -> dict:
        return {
            "imageId": self.image_id,
            "fit": self.fit.to_dict(),
            "channels": self.channels.to_dict(),
            "normalized": [float(v) for v in self.normalized],
        }

    @classmethod
    def from_dict(cls, d: dict) -> "ImageRecord":
        return cls(
            image_id=str(d["imageId"]),
            fit=FitResult.from_dict(d["fit"]),
            channels=ChannelLighting.from_dict(d["channels"]),
            normalized=np.asarray(d["normalized"], dtype=float),
        )


def base_image_id(record_id: str) -> str:
    """Image file id for a record id ("scene@2" -> "scene")."""
    return record_id.split("@", 1)[0]


def load_annotation(path) -> Annotation:
    p = Path(path)
    if not p.is_file():
        raise WorkspaceIOError(f"annotation file not found: {p}")
    return Annotation.from_dict(json.loads(p.read_text()))


def run_image_pipeline(path, annotation: Annotation,
                       params: EmParams | None = None,
                       stride: int = 2) -> ImageRecord:
    """Load, optionally crop/resize, fit the circle, estimate all channels.

    A non-converged fit is recorded in the result, not raised.
    """
    image = load_image(path)
    if annotation.crop_box is not None:
        image = crop_resize(image, annotation.crop_box)
    return run_pipeline_on_array(image, annotation, params, stride)


def run_pipeline_on_array(image: np.ndarray, annotation: Annotation,
                          params: EmParams | None = None,
                          stride: int = 2) -> ImageRecord:
    """Pipeline body for an already-loaded (post-crop) image."""
    fit = fit_circle_em(image, annotation.approx, params or EmParams())
    channels = estimate_all_channels(image, fit.circle, stride=stride)
    return ImageRecord(image_id=annotation.image_id, fit=fit, channels=channels,
                       normalized=normalize_env(channels.gray))


def batch_threads() -> int:
    raw = os.environ.get(THREADS_ENV_VAR, "")
    try:
        n = int(raw)
    except ValueError:
        n = 0
    return n if n > 0 else min(8, os.cpu_count() or 1)


def run_batch(jobs: list[tuple[str, Annotation]],
              params: EmParams | None = None,
              stride: int = 2) -> tuple[list[ImageRecord], list[dict]]:
    """Run the pipeline over (image path, annotation) jobs, possibly in parallel.

    Returns records sorted by image id plus a failure list; per-image
    errors never abort the batch.
    """
    records: list[ImageRecord] = []
    failures: list[dict] = []

    def one(job):
        path, ann = job
        return run_image_pipeline(path, ann, params, stride)

    with ThreadPoolExecutor(max_workers=min(batch_threads(), max(1, len(jobs)))) as pool:
        futures = [(ann.image_id, pool.submit(one, (path, ann))) for path, ann in jobs]
        for image_id, fut in futures:
            try:
                records.append(fut.result())
            except Exception as exc:  # recorded, batch continues
                failures.append({
                    "imageId": image_id,
                    "error": getattr(exc, "kind", "error"),
                    "detail": str(exc),
                })
    records.sort(key=lambda r: r.image_id)
    failures.sort(key=lambda f: f["imageId"])
    return records, failures


def records_to_csv(records: list[ImageRecord]) -> str:
    """Flat export: one row per (record, channel) with the nine coefficients."""
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["imageId", "channel", *COEFF_NAMES])
    for rec in records:
        for channel in ("red", "green", "blue", "gray"):
            env = getattr(rec.channels, channel)
            writer.writerow([rec.image_id, channel, *[repr(float(v)) for v in env]])
    return buf.getvalue()


def emit_report(records: list[ImageRecord], out_dir,
                reports: dict | None = None,
                failures: list[dict] | None = None) -> dict:
    """Write records.json and records.csv (plus any analysis reports).

    Output is deterministic: records ordered by image id, keys sorted,
    coefficients in canonical order. Returns the written paths.
    """
    if not records:
        raise EmptyInputError("no records to report")
    out = Path(out_dir)
    try:
        out.mkdir(parents=True, exist_ok=True)
    except OSError as exc:
        raise WorkspaceIOError(f"cannot create report directory {out}: {exc}") from exc
    ordered = sorted(records, key=lambda r: r.image_id)
    payload = {"records": [r.to_dict() for r in ordered]}
    if failures:
        payload["failures"] = sorted(failures, key=lambda f: f["imageId"])
    if reports:
        payload["analysis"] = reports
    paths = {}
    try:
        json_path = out / "records.json"
        json_path.write_text(json.dumps(payload, sort_keys=True, indent=2))
        paths["json"] = str(json_path)
        csv_path = out / "records.csv"
        csv_path.write_text(records_to_csv(ordered))
        paths["csv"] = str(csv_path)
    except OSError as exc:
        raise WorkspaceIOError(f"cannot write report files: {exc}") from exc
    return paths


def scan_workspace(workspace) -> list[tuple[str, Annotation]]:
    """Collect (image path, annotation) jobs from a workspace directory.

    Every annotations/<rid>.json must name an image that exists under
    images/ as "<base id>.png"; a dangling annotation is an io error so
    batches never silently shrink.
    """
    ws = Path(workspace)
    ann_dir = ws / "annotations"
    if not ann_dir.is_dir():
        raise WorkspaceIOError(f"no annotations directory under {ws}")
    jobs = []
    for ann_path in sorted(ann_dir.glob("*.json")):
        ann = load_annotation(ann_path)
        image_path = ws / "images" / f"{base_image_id(ann.image_id)}.png"
        if not image_path.is_file():
            raise WorkspaceIOError(
                f"annotation {ann_path.name} names missing image {image_path}")
        jobs.append((str(image_path), ann))
    return jobs


def normalized_set(records: list[ImageRecord]) -> list[np.ndarray]:
    """The records' normalized gray environments, ordered by image id."""
    return [r.normalized for r in sorted(records, key=lambda r: r.image_id)]


def load_records(path) -> list[ImageRecord]:
    p = Path(path)
    if not p.is_file():
        raise WorkspaceIOError(f"records file not found: {p}")
    payload = json.loads(p.read_text())
    return [ImageRecord.from_dict(d) for d in payload["records"]]


def group_for_within(records: list[ImageRecord]) -> list[list[np.ndarray]]:
    """Gray environments grouped by base image id, for images with >= 2 spheres."""
    groups: dict[str, list[np.ndarray]] = {}
    for rec in sorted(records, key=lambda r: r.image_id):
        groups.setdefault(base_image_id(rec.image_id), []).append(rec.channels.gray)
    return [envs for _base, envs in sorted(groups.items()) if len(envs) >= 2]
