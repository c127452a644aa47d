"""HTTP service tests via the in-process test client."""

import json

import numpy as np
import pytest
from fastapi.testclient import TestClient

from lumisphere.fixtures import make_scene, write_scene
from lumisphere.server import create_app


@pytest.fixture()
def ws(tmp_path):
    write_scene(make_scene(150, size=512, radius_range=(60, 90)),
                tmp_path, "solo")
    write_scene(make_scene(151, n_spheres=2, size=640, radius_range=(70, 90)),
                tmp_path, "duo")
    return tmp_path


@pytest.fixture()
def client(ws):
    return TestClient(create_app(ws))


def truth_circle(ws, image_id, k=0):
    truth = json.loads((ws / "truth" / f"{image_id}.json").read_text())
    return truth["spheres"][k]["circle"]


# ---------------------------------------------------------------- catalog


def test_list_images_catalog(client):
    entries = client.get("/images").json()
    assert [e["id"] for e in entries] == ["duo", "solo"]
    duo = entries[0]
    assert duo["width"] == duo["height"] == 640
    assert [r["recordId"] for r in duo["records"]] == ["duo@0", "duo@1"]
    assert all(r["annotated"] and not r["fitted"] for r in duo["records"])


def test_catalog_tracks_fit_state(client):
    assert client.post("/images/solo@0/fit").status_code == 200
    entries = {e["id"]: e for e in client.get("/images").json()}
    assert entries["solo"]["records"][0]["fitted"] is True


def test_raw_image_bytes(client, ws):
    resp = client.get("/images/solo@0/raw")
    assert resp.status_code == 200
    assert resp.headers["content-type"] == "image/png"
    assert resp.content == (ws / "images" / "solo.png").read_bytes()


def test_raw_image_missing(client):
    resp = client.get("/images/ghost/raw")
    assert resp.status_code == 404
    assert resp.json()["error"] == "io"


# ---------------------------------------------------------------- annotation


def test_put_annotation_round_trip(client, ws):
    c = truth_circle(ws, "solo")
    payload = {"imageId": "solo@0",
               "approx": {"cx": c["cx"] + 2, "cy": c["cy"] - 1, "r": c["r"] + 3}}
    resp = client.put("/images/solo@0/annotation", json=payload)
    assert resp.status_code == 200
    assert resp.json()["stored"]["approx"]["r"] == c["r"] + 3
    stored = json.loads((ws / "annotations" / "solo@0.json").read_text())
    assert stored["imageId"] == "solo@0"


def test_put_annotation_id_mismatch(client):
    payload = {"imageId": "other", "approx": {"cx": 10, "cy": 10, "r": 5}}
    resp = client.put("/images/solo@0/annotation", json=payload)
    assert resp.status_code == 400
    assert resp.json()["error"] == "invalid-input"


def test_put_annotation_missing_image(client):
    payload = {"imageId": "ghost", "approx": {"cx": 10, "cy": 10, "r": 5}}
    resp = client.put("/images/ghost/annotation", json=payload)
    assert resp.status_code == 404


def test_put_annotation_invalid_circle(client):
    payload = {"imageId": "solo@0", "approx": {"cx": 10, "cy": 10, "r": -5}}
    resp = client.put("/images/solo@0/annotation", json=payload)
    assert resp.status_code == 400


# ---------------------------------------------------------------- fit


def test_fit_requires_annotation(client, ws):
    (ws / "annotations" / "solo@0.json").unlink()
    resp = client.post("/images/solo@0/fit")
    assert resp.status_code == 409
    assert resp.json()["error"] == "missing-annotation"


def test_fit_matches_truth(client, ws):
    resp = client.post("/images/solo@0/fit")
    assert resp.status_code == 200
    body = resp.json()
    assert body["fit"]["converged"] is True
    c = truth_circle(ws, "solo")
    for key in ("cx", "cy", "r"):
        assert abs(body["fit"]["circle"][key] - c[key]) < 0.5
    assert len(body["normalized"]) == 8


def test_fit_cached_for_unchanged_annotation(client, ws):
    first = client.post("/images/solo@0/fit").json()
    # plant a sentinel in the stored result; a cache hit returns it verbatim
    p = ws / "results" / "solo@0.json"
    stored = json.loads(p.read_text())
    stored["fit"]["iterations"] = 777
    p.write_text(json.dumps(stored, sort_keys=True))
    again = client.post("/images/solo@0/fit").json()
    assert again["fit"]["iterations"] == 777
    assert again["annotationHash"] == first["annotationHash"]


def test_fit_recomputes_when_annotation_changes(client, ws):
    first = client.post("/images/solo@0/fit").json()
    c = truth_circle(ws, "solo")
    payload = {"imageId": "solo@0",
               "approx": {"cx": c["cx"] - 2, "cy": c["cy"] + 2, "r": c["r"] - 2}}
    assert client.put("/images/solo@0/annotation", json=payload).status_code == 200
    second = client.post("/images/solo@0/fit").json()
    assert second["annotationHash"] != first["annotationHash"]
    # both annotations converge to the same true circle
    assert abs(second["fit"]["circle"]["r"] - first["fit"]["circle"]["r"]) < 0.5


def test_fit_busy_while_lock_held(client):
    session = client.app.state.session
    lock = session.lock_for("solo@0")
    assert lock.acquire(blocking=False)
    try:
        resp = client.post("/images/solo@0/fit")
        assert resp.status_code == 409
        assert resp.json()["error"] == "busy"
    finally:
        lock.release()
    assert client.post("/images/solo@0/fit").status_code == 200


# ---------------------------------------------------------------- lighting + render


def test_lighting_requires_prior_fit(client):
    resp = client.get("/images/solo@0/lighting")
    assert resp.status_code == 404


def test_lighting_payload(client):
    client.post("/images/solo@0/fit")
    body = client.get("/images/solo@0/lighting").json()
    assert set(body) == {"imageId", "fit", "channels", "normalized"}
    assert set(body["channels"]) == {"red", "green", "blue", "gray"}


def test_render_png(client):
    client.post("/images/solo@0/fit")
    resp = client.get("/images/solo@0/render")
    assert resp.status_code == 200
    assert resp.headers["content-type"] == "image/png"
    assert resp.content[:8] == b"\x89PNG\r\n\x1a\n"


def test_render_channel_and_shared(client):
    client.post("/images/duo@0/fit")
    client.post("/images/duo@1/fit")
    solo = client.get("/images/duo@0/render", params={"channel": "blue"})
    assert solo.status_code == 200
    shared = client.get("/images/duo@0/render",
                        params={"channel": "blue", "shared": "duo@1"})
    assert shared.status_code == 200
    # shared scaling references the pair's joint maximum, so bytes differ
    assert shared.content != solo.content


def test_render_unknown_channel(client):
    client.post("/images/solo@0/fit")
    resp = client.get("/images/solo@0/render", params={"channel": "alpha"})
    assert resp.status_code == 400


def test_render_requires_fit(client):
    resp = client.get("/images/solo@0/render")
    assert resp.status_code == 404


# ---------------------------------------------------------------- reports


def fit_everything(client):
    for rid in ("solo@0", "duo@0", "duo@1"):
        assert client.post(f"/images/{rid}/fit").status_code == 200


def test_report_cross_by_prefix(client):
    fit_everything(client)
    resp = client.get("/report/cross", params={"a": "solo", "b": "duo"})
    assert resp.status_code == 200
    body = resp.json()
    assert set(body) == {"setA", "setB", "r2"}
    assert 0.0 <= body["r2"] <= 1.0


def test_report_cross_needs_both_sets(client):
    fit_everything(client)
    assert client.get("/report/cross", params={"a": "solo"}).status_code == 400
    resp = client.get("/report/cross", params={"a": "solo", "b": "nomatch"})
    assert resp.status_code == 400


def test_report_within(client):
    fit_everything(client)
    body = client.get("/report/within").json()
    assert len(body["r2ByOrder"]) == 3
    assert len(body["orders"]["0"]["points"]) == 1  # one pair from duo


def test_report_within_needs_multi_sphere(client):
    client.post("/images/solo@0/fit")
    resp = client.get("/report/within")
    assert resp.status_code == 400
