"""File-backed project store with optimistic versioning.

One canonical JSON file per project under a data directory; the in-memory
index is rebuilt by scanning at startup, so the directory itself is the
source of truth. Writes go through a temp file plus atomic rename, and are
serialized per project id; reads take no lock.
"""

from __future__ import annotations

import json
import os
import secrets
import threading
from dataclasses import dataclass
from datetime import datetime, timezone
from pathlib import Path

from .model_io import ProjectDocument, document_from_obj, document_to_obj

__all__ = ["ProjectRecord", "VersionConflictError", "ProjectNotFoundError", "ProjectStore"]


@dataclass(frozen=True)
class ProjectRecord:
    id: str
    name: str
    version: int
    updated_at: str
    document: ProjectDocument

    def summary(self) -> dict:
        return {
            "id": self.id,
            "name": self.name,
            "version": self.version,
            "updated_at": self.updated_at,
        }


class ProjectNotFoundError(KeyError):
    pass


class VersionConflictError(Exception):
    def __init__(self, current_version: int) -> None:
        super().__init__(f"version conflict; current version is {current_version}")
        self.current_version = current_version


def _utc_now() -> str:
    return datetime.now(timezone.utc).strftime("%Y-%m-%dT%H:%M:%S.%fZ")


class ProjectStore:
    def __init__(self, root: str | Path) -> None:
        self.root = Path(root)
        self.root.mkdir(parents=True, exist_ok=True)
        self._registry_lock = threading.Lock()
        self._locks: dict[str, threading.Lock] = {}
        self._index: dict[str, ProjectRecord] = {}
        self._scan()

    def _scan(self) -> None:
        for path in sorted(self.root.glob("*.json")):
            try:
                obj = json.loads(path.read_text(encoding="utf-8"))
                document = document_from_obj(obj["document"])
                record = ProjectRecord(
                    id=obj["id"],
                    name=obj["name"],
                    version=obj["version"],
                    updated_at=obj["updated_at"],
                    document=document,
                )
            except (KeyError, ValueError, OSError):
                continue  # skip files that are not project records
            self._index[record.id] = record

    def _lock_for(self, project_id: str) -> threading.Lock:
        with self._registry_lock:
            lock = self._locks.get(project_id)
            if lock is None:
                lock = threading.Lock()
                self._locks[project_id] = lock
            return lock

    def _path(self, project_id: str) -> Path:
        return self.root / f"{project_id}.json"

    def _persist(self, record: ProjectRecord) -> None:
        payload = {
            "id": record.id,
            "name": record.name,
            "version": record.version,
            "updated_at": record.updated_at,
            "document": document_to_obj(record.document),
        }
        text = json.dumps(payload, ensure_ascii=False, indent=2) + "\n"
        tmp = self._path(record.id).with_suffix(".json.tmp")
        tmp.write_text(text, encoding="utf-8")
        os.replace(tmp, self._path(record.id))
        with self._registry_lock:
            self._index[record.id] = record

    def list(self) -> list[ProjectRecord]:
        with self._registry_lock:
            records = list(self._index.values())
        return sorted(records, key=lambda r: (r.name, r.id))

    def get(self, project_id: str) -> ProjectRecord:
        with self._registry_lock:
            record = self._index.get(project_id)
        if record is None:
            raise ProjectNotFoundError(project_id)
        return record

    def create(self, name: str, document: ProjectDocument) -> ProjectRecord:
        while True:
            project_id = secrets.token_urlsafe(9)
            with self._registry_lock:
                if project_id not in self._index:
                    break
        record = ProjectRecord(
            id=project_id, name=name, version=1, updated_at=_utc_now(), document=document
        )
        with self._lock_for(project_id):
            self._persist(record)
        return record

    def put(self, project_id: str, document: ProjectDocument, expected_version: int) -> ProjectRecord:
        with self._lock_for(project_id):
            current = self.get(project_id)
            if current.version != expected_version:
                raise VersionConflictError(current.version)
            record = ProjectRecord(
                id=project_id,
                name=current.name,
                version=current.version + 1,
                updated_at=_utc_now(),
                document=document,
            )
            self._persist(record)
        return record

    def delete(self, project_id: str) -> None:
        with self._lock_for(project_id):
            with self._registry_lock:
                if project_id not in self._index:
                    raise ProjectNotFoundError(project_id)
                del self._index[project_id]
            self._path(project_id).unlink(missing_ok=True)
