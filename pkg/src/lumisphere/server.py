"""Local HTTP service around the pipeline for the annotation UI.

State lives in the workspace directory (same layout the CLI uses), so the
service and the CLI interoperate freely:

    images/<id>.png           served rasters
    annotations/<rid>.json    latest annotation per record id
    results/<rid>.json        fit + lighting, keyed by annotation hash

Every computation delegates to the core modules; responses are pure
functions of workspace content plus the submitted annotations. Fit runs
are serialized per record id: a second request while one is in flight
gets a busy error rather than a duplicate computation.
"""

from __future__ import annotations

import hashlib
import json
import threading
from pathlib import Path

from fastapi import FastAPI, Request
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import JSONResponse, Response

from .analysis import cross_set_report, within_image_report
from .errors import (BusyError, InvalidInputError, LumisphereError,
                     MissingAnnotationError, WorkspaceIOError)
from .imgio import image_size, png_bytes
from .pipeline import (Annotation, ImageRecord, base_image_id,
                       group_for_within, run_image_pipeline)
from .render import RenderSpec, render_sphere
from .shcore import Circle

# HTTP status by error kind; anything unlisted is a 422 domain failure.
STATUS_BY_KIND = {
    "io": 404,
    "missing-annotation": 409,
    "busy": 409,
    "invalid-input": 400,
    "invalid-crop": 400,
    "invalid-spec": 400,
    "empty-input": 400,
}

RENDER_SIZE = 600


class Session:
    """Workspace catalog plus per-record fit locks."""

    def __init__(self, workspace):
        self.root = Path(workspace)
        if not self.root.is_dir():
            raise WorkspaceIOError(f"workspace is not a directory: {self.root}")
        self._locks: dict[str, threading.Lock] = {}
        self._locks_guard = threading.Lock()

    # -- paths ---------------------------------------------------------
    def image_path(self, image_id: str) -> Path:
        return self.root / "images" / f"{base_image_id(image_id)}.png"

    def annotation_path(self, record_id: str) -> Path:
        return self.root / "annotations" / f"{record_id}.json"

    def result_path(self, record_id: str) -> Path:
        return self.root / "results" / f"{record_id}.json"

    def lock_for(self, record_id: str) -> threading.Lock:
        with self._locks_guard:
            return self._locks.setdefault(record_id, threading.Lock())

    # -- catalog -------------------------------------------------------
    def list_images(self) -> list[dict]:
        images_dir = self.root / "images"
        records: dict[str, list[str]] = {}
        for sub in ("annotations", "results"):
            d = self.root / sub
            if d.is_dir():
                for p in d.glob("*.json"):
                    records.setdefault(base_image_id(p.stem), []).append(p.stem)
        entries = []
        for path in sorted(images_dir.glob("*.png")) if images_dir.is_dir() else []:
            width, height = image_size(path)
            rids = sorted(set(records.get(path.stem, [path.stem])))
            entries.append({
                "id": path.stem,
                "width": width,
                "height": height,
                "records": [{
                    "recordId": rid,
                    "annotated": self.annotation_path(rid).is_file(),
                    "fitted": self.result_path(rid).is_file(),
                } for rid in rids],
            })
        return entries

    # -- state ---------------------------------------------------------
    def read_annotation(self, record_id: str) -> Annotation:
        p = self.annotation_path(record_id)
        if not p.is_file():
            raise MissingAnnotationError(
                f"no annotation submitted for {record_id!r}")
        return Annotation.from_dict(json.loads(p.read_text()))

    def write_annotation(self, record_id: str, payload: dict) -> Annotation:
        ann = Annotation.from_dict(payload)
        if ann.image_id != record_id:
            raise InvalidInputError(
                f"annotation imageId {ann.image_id!r} does not match path id "
                f"{record_id!r}")
        if not self.image_path(record_id).is_file():
            raise WorkspaceIOError(f"no image file for {record_id!r}")
        p = self.annotation_path(record_id)
        p.parent.mkdir(parents=True, exist_ok=True)
        p.write_text(json.dumps(ann.to_dict(), sort_keys=True, indent=2))
        return ann

    def read_result(self, record_id: str) -> dict:
        p = self.result_path(record_id)
        if not p.is_file():
            raise WorkspaceIOError(
                f"no fit result for {record_id!r}; run the fit first")
        return json.loads(p.read_text())

    def run_fit(self, record_id: str) -> dict:
        """Fit + estimate for one record, cached by annotation content."""
        ann = self.read_annotation(record_id)
        ann_hash = hashlib.sha256(
            json.dumps(ann.to_dict(), sort_keys=True).encode()).hexdigest()
        lock = self.lock_for(record_id)
        if not lock.acquire(blocking=False):
            raise BusyError(f"a fit for {record_id!r} is already running")
        try:
            p = self.result_path(record_id)
            if p.is_file():
                cached = json.loads(p.read_text())
                if cached.get("annotationHash") == ann_hash:
                    return cached
            record = run_image_pipeline(self.image_path(record_id), ann)
            payload = {"annotationHash": ann_hash, **record.to_dict()}
            p.parent.mkdir(parents=True, exist_ok=True)
            p.write_text(json.dumps(payload, sort_keys=True, indent=2))
            return payload
        finally:
            lock.release()

    def all_records(self) -> list[ImageRecord]:
        d = self.root / "results"
        records = []
        for p in sorted(d.glob("*.json")) if d.is_dir() else []:
            records.append(ImageRecord.from_dict(json.loads(p.read_text())))
        return records


def _error_response(exc: LumisphereError) -> JSONResponse:
    status = STATUS_BY_KIND.get(exc.kind, 422)
    return JSONResponse(status_code=status,
                        content={"error": exc.kind, "detail": str(exc)})


def create_app(workspace) -> FastAPI:
    session = Session(workspace)
    app = FastAPI(title="lumisphere", docs_url=None, redoc_url=None)
    app.state.session = session
    # the annotator page is usually served from a separate static origin
    app.add_middleware(CORSMiddleware, allow_origins=["*"],
                       allow_methods=["*"], allow_headers=["*"])

    @app.exception_handler(LumisphereError)
    def handle_domain_error(_request: Request, exc: LumisphereError):
        return _error_response(exc)

    @app.get("/images")
    def list_images():
        return session.list_images()

    @app.get("/images/{record_id}/raw")
    def raw_image(record_id: str):
        path = session.image_path(record_id)
        if not path.is_file():
            raise WorkspaceIOError(f"no image file for {record_id!r}")
        return Response(content=path.read_bytes(), media_type="image/png")

    @app.put("/images/{record_id}/annotation")
    def put_annotation(record_id: str, payload: dict):
        ann = session.write_annotation(record_id, payload)
        return {"stored": ann.to_dict()}

    @app.post("/images/{record_id}/fit")
    def post_fit(record_id: str):
        return session.run_fit(record_id)

    @app.get("/images/{record_id}/lighting")
    def get_lighting(record_id: str):
        result = session.read_result(record_id)
        return {key: result[key] for key in
                ("imageId", "fit", "channels", "normalized")}

    @app.get("/images/{record_id}/render")
    def get_render(record_id: str, channel: str = "gray",
                   shared: str | None = None):
        if channel not in ("red", "green", "blue", "gray"):
            raise InvalidInputError(f"unknown channel {channel!r}")

        preview_circle = Circle((RENDER_SIZE - 1) / 2, (RENDER_SIZE - 1) / 2,
                                RENDER_SIZE * 0.45)

        def rendered(rid: str, scale=None):
            result = session.read_result(rid)
            env = result["channels"][channel]
            return render_sphere(env, RenderSpec(size=RENDER_SIZE,
                                                 circle=preview_circle,
                                                 shared_scale=scale))

        first = rendered(record_id)
        if shared is None:
            return Response(content=png_bytes(first.image),
                            media_type="image/png")
        other = rendered(shared)
        scale = (0.0, max(first.raw_max, other.raw_max))
        return Response(content=png_bytes(rendered(record_id, scale).image),
                        media_type="image/png")

    @app.get("/report/cross")
    def report_cross(a: str = "", b: str = "", r2_mode: str = "median"):
        if not a or not b:
            raise InvalidInputError(
                "pass a=<prefix[,prefix...]> and b=<prefix[,prefix...]> to "
                "split records into two sets")
        records = session.all_records()

        def pick(prefixes: str):
            pres = [p for p in prefixes.split(",") if p]
            chosen = [r.normalized for r in records
                      if any(r.image_id.startswith(p) for p in pres)]
            if not chosen:
                raise InvalidInputError(f"no records match prefixes {prefixes!r}")
            return chosen

        return cross_set_report(pick(a), pick(b), r2_mode=r2_mode).to_dict()

    @app.get("/report/within")
    def report_within():
        groups = group_for_within(session.all_records())
        if not groups:
            raise InvalidInputError(
                "no image carries 2 or more fitted spheres yet")
        return within_image_report(groups).to_dict()

    return app
