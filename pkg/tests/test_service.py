"""HTTP API contract: persistence round-trips, conflicts, compute endpoints."""

from __future__ import annotations

import json
import threading

import pytest
from fastapi.testclient import TestClient

from onda.model_io import ProjectDocument, document_from_obj, document_to_obj, emit_project
from onda.service import create_app
from onda.store import ProjectStore

from conftest import build_university


@pytest.fixture
def client(tmp_path):
    app = create_app(tmp_path / "data")
    with TestClient(app) as c:
        yield c


def university_doc_obj() -> dict:
    return document_to_obj(ProjectDocument(diagram=build_university()))


def empty_doc_obj() -> dict:
    return {"format_version": 1, "meta": {}, "diagram": {"name": "empty"}}


class TestProjects:
    def test_create_starts_at_version_one(self, client):
        response = client.post("/api/projects", json={"name": "u", "document": empty_doc_obj()})
        assert response.status_code == 201
        body = response.json()
        assert body["version"] == 1
        assert body["name"] == "u"
        assert body["id"]

    def test_round_trip_is_byte_identical(self, client):
        doc_obj = university_doc_obj()
        canonical = emit_project(document_from_obj(doc_obj))
        created = client.post("/api/projects", json={"name": "u", "document": doc_obj}).json()
        fetched = client.get(f"/api/projects/{created['id']}").json()
        assert emit_project(document_from_obj(fetched["document"])) == canonical

    def test_put_bumps_version_by_one(self, client):
        created = client.post("/api/projects", json={"name": "u", "document": empty_doc_obj()}).json()
        response = client.put(
            f"/api/projects/{created['id']}",
            json={"document": university_doc_obj(), "expected_version": 1},
        )
        assert response.status_code == 200
        assert response.json()["version"] == 2

    def test_stale_version_conflicts(self, client):
        created = client.post("/api/projects", json={"name": "u", "document": empty_doc_obj()}).json()
        pid = created["id"]
        client.put(f"/api/projects/{pid}", json={"document": empty_doc_obj(), "expected_version": 1})
        stale = client.put(
            f"/api/projects/{pid}", json={"document": empty_doc_obj(), "expected_version": 1}
        )
        assert stale.status_code == 409
        body = stale.json()
        assert body["error"]["code"] == "version_conflict"
        assert body["error"]["details"]["current_version"] == 2

    def test_unknown_id_404(self, client):
        assert client.get("/api/projects/missing").status_code == 404
        response = client.put(
            "/api/projects/missing", json={"document": empty_doc_obj(), "expected_version": 1}
        )
        assert response.status_code == 404

    def test_malformed_document_422_with_position(self, client):
        response = client.post(
            "/api/projects", json={"name": "u", "document": {"format_version": 1, "diagram": {"oops": 1}}}
        )
        assert response.status_code == 422
        body = response.json()
        assert body["error"]["code"] == "invalid_document"
        assert "oops" in body["error"]["message"]

    def test_list_and_delete(self, client):
        a = client.post("/api/projects", json={"name": "a", "document": empty_doc_obj()}).json()
        b = client.post("/api/projects", json={"name": "b", "document": empty_doc_obj()}).json()
        listed = client.get("/api/projects").json()
        assert [p["name"] for p in listed] == ["a", "b"]
        assert all(set(p) == {"id", "name", "version", "updated_at"} for p in listed)
        assert client.delete(f"/api/projects/{a['id']}").status_code == 204
        assert client.get(f"/api/projects/{a['id']}").status_code == 404
        assert [p["name"] for p in client.get("/api/projects").json()] == ["b"]

    def test_concurrent_retrying_savers(self, client):
        created = client.post("/api/projects", json={"name": "c", "document": empty_doc_obj()}).json()
        pid = created["id"]
        workers = 12

        def save_with_retry():
            while True:
                current = client.get(f"/api/projects/{pid}").json()["version"]
                response = client.put(
                    f"/api/projects/{pid}",
                    json={"document": empty_doc_obj(), "expected_version": current},
                )
                if response.status_code == 200:
                    return
                assert response.status_code == 409

        threads = [threading.Thread(target=save_with_retry) for _ in range(workers)]
        for t in threads:
            t.start()
        for t in threads:
            t.join()
        assert client.get(f"/api/projects/{pid}").json()["version"] == 1 + workers


class TestStoreDurability:
    def test_restart_rebuilds_index_from_disk(self, tmp_path):
        root = tmp_path / "data"
        store = ProjectStore(root)
        doc = ProjectDocument(diagram=build_university())
        record = store.create("persisted", doc)

        reopened = ProjectStore(root)
        again = reopened.get(record.id)
        assert again == record

    def test_leftover_temp_and_junk_files_ignored(self, tmp_path):
        root = tmp_path / "data"
        store = ProjectStore(root)
        record = store.create("ok", ProjectDocument(diagram=build_university()))
        (root / "partial.json.tmp").write_text("{")
        (root / "junk.json").write_text("not a record")

        reopened = ProjectStore(root)
        assert [r.id for r in reopened.list()] == [record.id]

    def test_failed_put_leaves_previous_version(self, tmp_path):
        store = ProjectStore(tmp_path / "data")
        record = store.create("p", ProjectDocument(diagram=build_university()))
        from onda.store import VersionConflictError

        with pytest.raises(VersionConflictError):
            store.put(record.id, ProjectDocument(diagram=build_university()), expected_version=99)
        assert store.get(record.id).version == 1


class TestCompute:
    def test_physical_matches_transform(self, client):
        response = client.post("/api/physical?mode=normal", json=university_doc_obj())
        assert response.status_code == 200
        body = response.json()
        assert body["valid"] is True
        names = [t["name"] for t in body["model"]["tables"]]
        assert "professor_course" in names

    def test_physical_simplified_drops_association(self, client):
        body = client.post("/api/physical?mode=simplified", json=university_doc_obj()).json()
        names = [t["name"] for t in body["model"]["tables"]]
        assert "professor_course" not in names
        course = next(t for t in body["model"]["tables"] if t["name"] == "course")
        fk_col = next(c for c in course["columns"] if c["name"] == "professor_person_card_number")
        assert fk_col["nullable"] is True

    def test_physical_invalid_returns_findings_payload(self, client):
        doc = {
            "format_version": 1,
            "meta": {},
            "diagram": {
                "name": "bad",
                "entities": [{"id": "e", "name": "E", "attributes": [
                    {"name": "x", "type": {"kind": "integer"}}
                ]}],
            },
        }
        response = client.post("/api/physical?mode=normal", json=doc)
        assert response.status_code == 200
        body = response.json()
        assert body["valid"] is False
        assert any(f["code"] == "MISSING_IDENTIFIER" for f in body["findings"])

    def test_sql_returns_plain_text(self, client):
        response = client.post("/api/sql?mode=normal&dialect=postgresql", json=university_doc_obj())
        assert response.status_code == 200
        assert response.headers["content-type"].startswith("text/plain")
        assert "CREATE TABLE professor_course" in response.text

    def test_sql_empty_document(self, client):
        response = client.post("/api/sql?mode=normal&dialect=sqlite", json=empty_doc_obj())
        assert response.status_code == 200
        assert response.text == ""

    def test_sql_unknown_dialect_lists_supported(self, client):
        response = client.post("/api/sql?mode=normal&dialect=db2", json=empty_doc_obj())
        assert response.status_code == 422
        message = response.json()["error"]["message"]
        for dialect in ("postgresql", "oracle", "mysql", "mariadb", "sqlite"):
            assert dialect in message

    def test_unknown_mode_rejected(self, client):
        response = client.post("/api/physical?mode=turbo", json=empty_doc_obj())
        assert response.status_code == 422
        assert response.json()["error"]["code"] == "invalid_mode"

    def test_compute_does_not_touch_store(self, client):
        client.post("/api/physical?mode=normal", json=university_doc_obj())
        client.post("/api/sql?mode=normal&dialect=sqlite", json=university_doc_obj())
        assert client.get("/api/projects").json() == []
