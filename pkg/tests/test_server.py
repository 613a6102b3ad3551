import glob
import json
import os
import time

import pytest
from fastapi.testclient import TestClient

from confluence.server import create_app
from confluence.server.store import DocumentStore, RunRecord, TransitionError

PREY = "ecosystem_prey__population_density"
PREDATOR = "ecosystem_predator__population_density"


def lv_doc(**overrides):
    doc = {
        "title": "lv",
        "clock": {"start": 0.0, "stop": 0.1, "step": 0.01},
        "components": [
            {"id": "prey", "class": "lv_prey"},
            {"id": "predator", "class": "lv_predator"},
        ],
        "links": [
            {"from": "prey." + PREY, "to": "predator." + PREY},
            {"from": "predator." + PREDATOR, "to": "prey." + PREDATOR},
        ],
        "outputs": [
            {"id": "prey", "var": PREY, "file": "prey.csv"},
            {"id": "predator", "var": PREDATOR, "file": "predator.csv"},
        ],
    }
    doc.update(overrides)
    return doc


@pytest.fixture()
def client(tmp_path):
    app = create_app(root=str(tmp_path / "store"), workers=2)
    with TestClient(app) as c:
        yield c


def poll_run(client, run_id, deadline=30.0):
    statuses = []
    end = time.time() + deadline
    while time.time() < end:
        record = client.get("/api/runs/{}".format(run_id)).json()
        if not statuses or statuses[-1] != record["status"]:
            statuses.append(record["status"])
        if record["status"] in ("succeeded", "failed"):
            return record, statuses
        time.sleep(0.02)
    raise AssertionError("run {} never finished: {}".format(run_id, statuses))


class TestStore:
    def test_transitions(self):
        record = RunRecord("r1", "c1")
        record.transition("running")
        assert record.started is not None and record.finished is None
        record.transition("succeeded", outputs=["a.csv"])
        assert record.finished is not None
        assert record.outputs == ["a.csv"]

    def test_illegal_transitions(self):
        record = RunRecord("r1", "c1")
        with pytest.raises(TransitionError):
            record.transition("succeeded")
        record.transition("running")
        record.transition("failed", "boom")
        with pytest.raises(TransitionError):
            record.transition("running")

    def test_round_trip(self, tmp_path):
        store = DocumentStore(str(tmp_path))
        record = RunRecord("r1", "c1", owner="ada")
        store.save_run(record)
        back = store.load_run("r1")
        assert back.as_dict() == record.as_dict()

    def test_traversal_ids_rejected(self, tmp_path):
        store = DocumentStore(str(tmp_path))
        assert store.load_run("../etc") is None
        assert store.load_composition("a/b") is None

    def test_composition_bytes_preserved(self, tmp_path):
        store = DocumentStore(str(tmp_path))
        body = b'{"title": "x",   "weird":\t[1, 2]}'
        store.save_composition("abc", body, {"owner": "o", "shared": False})
        assert store.load_composition("abc") == body


class TestComponentEndpoints:
    def test_listing(self, client):
        got = client.get("/api/components")
        assert got.status_code == 200
        classes = [meta["class"] for meta in got.json()]
        assert classes == ["forcing", "heat2d", "lv_predator", "lv_prey"]

    def test_detail(self, client):
        got = client.get("/api/components/heat2d").json()
        keys = {p["key"]: p for p in got["parameters"]}
        assert keys["alpha"]["default"] == 1.0

    def test_unknown_class(self, client):
        assert client.get("/api/components/nope").status_code == 404


class TestCompositionEndpoints:
    def test_post_and_byte_equal_get(self, client):
        body = json.dumps(lv_doc(), indent=3).encode()
        got = client.post(
            "/api/compositions", content=body, headers={"X-User": "ada"}
        )
        assert got.status_code == 201
        payload = got.json()
        assert payload["findings"] == []
        back = client.get(
            "/api/compositions/{}".format(payload["id"]), headers={"X-User": "ada"}
        )
        assert back.status_code == 200
        assert back.content == body

    def test_post_malformed_json(self, client):
        got = client.post("/api/compositions", content=b"{nope")
        assert got.status_code == 400

    def test_post_duplicate_instance_id(self, client):
        doc = lv_doc()
        doc["components"][1]["id"] = "prey"
        got = client.post("/api/compositions", content=json.dumps(doc).encode())
        assert got.status_code == 400
        assert "prey" in got.json()["error"]

    def test_findings_returned_not_fatal(self, client):
        doc = lv_doc(links=[])
        got = client.post("/api/compositions", content=json.dumps(doc).encode())
        assert got.status_code == 201
        kinds = {f["kind"] for f in got.json()["findings"]}
        assert kinds == {"unsatisfied-input"}

    def test_sharing_rules(self, client):
        body = json.dumps(lv_doc()).encode()
        comp_id = client.post(
            "/api/compositions", content=body, headers={"X-User": "ada"}
        ).json()["id"]

        url = "/api/compositions/{}".format(comp_id)
        assert client.get(url, headers={"X-User": "grace"}).status_code == 403
        assert client.get(url, headers={"X-User": "ada"}).status_code == 200

        share = url + "/share"
        assert client.post(share, headers={"X-User": "grace"}).status_code == 403
        assert client.post(share, headers={"X-User": "ada"}).status_code == 200
        assert client.get(url, headers={"X-User": "grace"}).status_code == 200

    def test_put_replaces(self, client):
        comp_id = client.post(
            "/api/compositions",
            content=json.dumps(lv_doc()).encode(),
            headers={"X-User": "ada"},
        ).json()["id"]
        url = "/api/compositions/{}".format(comp_id)

        updated = json.dumps(lv_doc(title="lv two")).encode()
        refused = client.put(url, content=updated, headers={"X-User": "grace"})
        assert refused.status_code == 403
        accepted = client.put(url, content=updated, headers={"X-User": "ada"})
        assert accepted.status_code == 200
        back = client.get(url, headers={"X-User": "ada"})
        assert back.content == updated

    def test_put_bad_document(self, client):
        comp_id = client.post(
            "/api/compositions", content=json.dumps(lv_doc()).encode()
        ).json()["id"]
        doc = lv_doc()
        doc["components"][1]["id"] = "prey"
        got = client.put(
            "/api/compositions/{}".format(comp_id),
            content=json.dumps(doc).encode(),
        )
        assert got.status_code == 400
        assert "prey" in got.json()["error"]

    def test_unknown_composition(self, client):
        assert client.get("/api/compositions/zzzz").status_code == 404


class TestRunEndpoints:
    def submit(self, client, doc=None):
        comp_id = client.post(
            "/api/compositions", content=json.dumps(doc or lv_doc()).encode()
        ).json()["id"]
        got = client.post(
            "/api/runs", content=json.dumps({"composition_id": comp_id}).encode()
        )
        return comp_id, got

    def test_lifecycle(self, client):
        _, got = self.submit(client)
        assert got.status_code == 201
        run_id = got.json()["id"]
        record, statuses = poll_run(client, run_id)
        assert record["status"] == "succeeded"
        assert sorted(record["outputs"]) == ["predator.csv", "prey.csv"]

        listing = client.get("/api/runs/{}/outputs".format(run_id)).json()
        assert sorted(listing["outputs"]) == ["predator.csv", "prey.csv"]

        text = client.get("/api/runs/{}/outputs/prey.csv".format(run_id)).text
        assert text.splitlines()[0] == "time," + PREY

    def test_status_order(self, client):
        _, got = self.submit(client)
        _, statuses = poll_run(client, got.json()["id"])
        order = {"queued": 0, "running": 1, "succeeded": 2, "failed": 2}
        ranks = [order[s] for s in statuses]
        assert ranks == sorted(ranks)
        assert statuses[-1] == "succeeded"

    def test_submit_with_findings_is_409(self, client):
        _, got = self.submit(client, doc=lv_doc(links=[]))
        assert got.status_code == 409
        payload = got.json()
        assert any(
            f["kind"] == "unsatisfied-input" for f in payload["findings"]
        )

    def test_submit_unknown_composition(self, client):
        got = client.post(
            "/api/runs", content=json.dumps({"composition_id": "zzz"}).encode()
        )
        assert got.status_code == 404

    def test_bad_body(self, client):
        assert client.post("/api/runs", content=b"[]").status_code == 400

    def test_unknown_run(self, client):
        assert client.get("/api/runs/zzz").status_code == 404
        assert client.get("/api/runs/zzz/outputs").status_code == 404

    def test_unknown_output_name(self, client):
        _, got = self.submit(client)
        run_id = got.json()["id"]
        poll_run(client, run_id)
        missing = client.get("/api/runs/{}/outputs/nope.csv".format(run_id))
        assert missing.status_code == 404

    def test_failed_run_reports_reason(self, client, tmp_path):
        # queue a run with no workers, delete its composition, then let a
        # fresh instance pick it up: the run must fail, not crash a worker
        root = str(tmp_path / "broken-store")
        idle = create_app(root=root, workers=0)
        with TestClient(idle) as first:
            comp_id = first.post(
                "/api/compositions", content=json.dumps(lv_doc()).encode()
            ).json()["id"]
            run_id = first.post(
                "/api/runs", content=json.dumps({"composition_id": comp_id}).encode()
            ).json()["id"]
            status = first.get("/api/runs/{}".format(run_id)).json()["status"]
            assert status == "queued"
        for path in glob.glob(os.path.join(root, "compositions", comp_id + "*")):
            os.unlink(path)
        with TestClient(create_app(root=root, workers=2)) as second:
            record, _ = poll_run(second, run_id)
        assert record["status"] == "failed"
        assert "gone" in record["message"]


class TestRestartRecovery:
    def test_queued_runs_survive_restart(self, tmp_path):
        root = str(tmp_path / "store")
        with TestClient(create_app(root=root, workers=0)) as idle:
            comp_id = idle.post(
                "/api/compositions", content=json.dumps(lv_doc()).encode()
            ).json()["id"]
            run_ids = [
                idle.post(
                    "/api/runs",
                    content=json.dumps({"composition_id": comp_id}).encode(),
                ).json()["id"]
                for _ in range(3)
            ]
            for run_id in run_ids:
                assert (
                    idle.get("/api/runs/{}".format(run_id)).json()["status"]
                    == "queued"
                )
        # process "dies"; a fresh instance on the same root picks them up
        with TestClient(create_app(root=root, workers=2)) as revived:
            for run_id in run_ids:
                record, _ = poll_run(revived, run_id)
                assert record["status"] == "succeeded"

    def test_mid_flight_runs_fail_on_restart(self, tmp_path):
        root = str(tmp_path / "store")
        store = DocumentStore(root)
        record = RunRecord("stuck1", "ghost")
        record.transition("running")
        store.save_run(record)
        with TestClient(create_app(root=root, workers=1)) as revived:
            got = revived.get("/api/runs/stuck1").json()
        assert got["status"] == "failed"
        assert "restart" in got["message"]


class TestCitationEndpoint:
    def test_template(self, client):
        doc = {
            "class": "example",
            "name": "Name of the model",
            "version": "Model Version",
            "authors": [
                {"family": "Developer", "initials": "A"},
                {"family": "Developer", "initials": "B"},
            ],
            "year": 2014,
            "identifier": "Identifier",
        }
        got = client.post("/api/citation", content=json.dumps(doc).encode())
        assert got.status_code == 200
        assert got.json()["citation"] == (
            "Developer, A., Developer, B. (2014). "
            "Name of the model, Model Version. Identifier."
        )

    def test_metadata_error(self, client):
        doc = {"class": "x", "name": "X", "version": "1", "authors": [], "year": 2020}
        assert client.post(
            "/api/citation", content=json.dumps(doc).encode()
        ).status_code == 400


class TestUiMount:
    def test_serves_client_files_alongside_the_api(self, tmp_path):
        ui = tmp_path / "ui"
        ui.mkdir()
        (ui / "index.html").write_text("<!doctype html><title>composer</title>")
        (ui / "app.js").write_text("export const x = 1;\n")
        app = create_app(root=str(tmp_path / "store"), workers=0, ui=str(ui))
        with TestClient(app) as c:
            page = c.get("/")
            assert page.status_code == 200
            assert "composer" in page.text
            assert c.get("/app.js").text == "export const x = 1;\n"
            assert c.get("/api/components").status_code == 200

    def test_no_ui_by_default(self, client):
        assert client.get("/").status_code == 404
