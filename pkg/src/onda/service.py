"""HTTP API: project persistence plus stateless transform/emit endpoints.

REST over JSON; errors use the envelope {"error": {"code", "message",
"details"}}. The compute endpoints never touch the store, and validation
findings come back as a structured payload (HTTP 200) so the editor can
render diagnostics in place.

Configuration via environment: ONDA_DATA_DIR (project files), ONDA_STATIC_DIR
(optional built frontend to serve), ONDA_HOST / ONDA_PORT for the runner.
"""

from __future__ import annotations

import os
from pathlib import Path
from typing import Any

from fastapi import FastAPI, Request, Response
from fastapi.responses import JSONResponse, PlainTextResponse

from .er_model import validate
from .model_io import (
    ProjectDocument,
    ProjectParseError,
    document_from_obj,
    document_to_obj,
)
from .sql_emit import Dialect, EmitError, emit_sql
from .store import ProjectNotFoundError, ProjectStore, VersionConflictError
from .transform import GenerationMode, model_to_obj, transform

__all__ = ["create_app", "main"]


def _error(status: int, code: str, message: str, details: Any = None) -> JSONResponse:
    return JSONResponse(
        status_code=status,
        content={"error": {"code": code, "message": message, "details": details}},
    )


def _findings_payload(report) -> dict:
    return {
        "valid": False,
        "findings": [
            {
                "severity": f.severity.value,
                "code": f.code,
                "path": list(f.element_path),
                "message": f.message,
            }
            for f in report.findings
        ],
    }


def _record_payload(record) -> dict:
    return {**record.summary(), "document": document_to_obj(record.document)}


def _parse_mode(token: str | None) -> GenerationMode:
    try:
        return GenerationMode((token or "normal").lower())
    except ValueError:
        raise ValueError(
            f"unknown mode {token!r}; supported modes: "
            + ", ".join(m.value for m in GenerationMode)
        ) from None


def _parse_dialect(token: str | None) -> Dialect:
    try:
        return Dialect((token or "").lower())
    except ValueError:
        raise ValueError(
            f"unknown dialect {token!r}; supported dialects: "
            + ", ".join(d.value for d in Dialect)
        ) from None


def create_app(data_dir: str | Path | None = None) -> FastAPI:
    app = FastAPI(title="onda", docs_url=None, redoc_url=None)
    store = ProjectStore(data_dir or os.environ.get("ONDA_DATA_DIR", "onda_data"))
    app.state.store = store

    @app.exception_handler(ProjectParseError)
    async def _parse_error(request: Request, exc: ProjectParseError):
        details = {"path": exc.path, "line": exc.line, "column": exc.column}
        return _error(422, "invalid_document", str(exc), details)

    @app.exception_handler(ProjectNotFoundError)
    async def _not_found(request: Request, exc: ProjectNotFoundError):
        return _error(404, "not_found", f"no project with id {exc.args[0]!r}")

    @app.exception_handler(VersionConflictError)
    async def _conflict(request: Request, exc: VersionConflictError):
        return _error(
            409, "version_conflict", str(exc), {"current_version": exc.current_version}
        )

    def _document_from_body(body: Any) -> ProjectDocument:
        return document_from_obj(body)

    @app.get("/api/projects")
    def list_projects() -> list[dict]:
        return [record.summary() for record in store.list()]

    @app.post("/api/projects", status_code=201)
    async def create_project(request: Request):
        body = await request.json()
        if not isinstance(body, dict) or "document" not in body:
            return _error(422, "invalid_request", "body must carry 'name' and 'document'")
        name = body.get("name", "untitled")
        if not isinstance(name, str):
            return _error(422, "invalid_request", "'name' must be a string")
        record = store.create(name, _document_from_body(body["document"]))
        return _record_payload(record)

    @app.get("/api/projects/{project_id}")
    def get_project(project_id: str) -> dict:
        return _record_payload(store.get(project_id))

    @app.put("/api/projects/{project_id}")
    async def save_project(project_id: str, request: Request):
        body = await request.json()
        if not isinstance(body, dict) or "document" not in body or "expected_version" not in body:
            return _error(
                422, "invalid_request", "body must carry 'document' and 'expected_version'"
            )
        expected = body["expected_version"]
        if isinstance(expected, bool) or not isinstance(expected, int):
            return _error(422, "invalid_request", "'expected_version' must be an integer")
        record = store.put(project_id, _document_from_body(body["document"]), expected)
        return _record_payload(record)

    @app.delete("/api/projects/{project_id}", status_code=204)
    def delete_project(project_id: str) -> Response:
        store.delete(project_id)
        return Response(status_code=204)

    @app.post("/api/physical")
    async def compute_physical(request: Request, mode: str | None = None):
        try:
            generation_mode = _parse_mode(mode)
        except ValueError as exc:
            return _error(422, "invalid_mode", str(exc))
        document = _document_from_body(await request.json())
        report = validate(document.diagram, generation_mode)
        if not report.is_valid:
            return _findings_payload(report)
        model = transform(document.diagram, generation_mode)
        return {"valid": True, "model": model_to_obj(model)}

    @app.post("/api/sql")
    async def compute_sql(request: Request, mode: str | None = None, dialect: str | None = None):
        try:
            generation_mode = _parse_mode(mode)
        except ValueError as exc:
            return _error(422, "invalid_mode", str(exc))
        try:
            target = _parse_dialect(dialect)
        except ValueError as exc:
            return _error(422, "invalid_dialect", str(exc))
        document = _document_from_body(await request.json())
        report = validate(document.diagram, generation_mode)
        if not report.is_valid:
            return JSONResponse(content=_findings_payload(report))
        model = transform(document.diagram, generation_mode)
        try:
            script = emit_sql(model, target)
        except EmitError as exc:
            return _error(422, exc.code.lower(), str(exc))
        return PlainTextResponse(content=script.rendered)

    static_dir = os.environ.get("ONDA_STATIC_DIR")
    if static_dir and Path(static_dir).is_dir():
        from fastapi.staticfiles import StaticFiles

        app.mount("/", StaticFiles(directory=static_dir, html=True), name="ui")

    return app


def main() -> None:
    import uvicorn

    uvicorn.run(
        create_app(),
        host=os.environ.get("ONDA_HOST", "127.0.0.1"),
        port=int(os.environ.get("ONDA_PORT", "8000")),
    )


if __name__ == "__main__":
    main()
