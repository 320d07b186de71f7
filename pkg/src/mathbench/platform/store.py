"""Append-only record log with derived in-memory indexes.

The log file is the source of truth: replaying it reconstructs identical
state, so a crash between append and index update is harmless.  Records are
never rewritten; corrections append superseding records.
"""

from __future__ import annotations

import json
import threading
from dataclasses import dataclass
from pathlib import Path
from typing import Iterator, Optional

SCHEMA_VERSION = 1
RECORD_KINDS = ("run", "grade", "candidate", "fit", "snapshot")


class StoreError(Exception):
    pass


class DuplicateId(StoreError):
    pass


@dataclass(frozen=True)
class StoreRecord:
    kind: str
    id: str
    payload: dict
    created_at: str = ""
    schema_version: int = SCHEMA_VERSION

    def to_line(self) -> str:
        return json.dumps({
            "kind": self.kind, "id": self.id,
            "schema_version": self.schema_version,
            "created_at": self.created_at, "payload": self.payload,
        }, sort_keys=True)

    @classmethod
    def from_line(cls, line: str) -> "StoreRecord":
        d = json.loads(line)
        return cls(kind=d["kind"], id=d["id"], payload=d["payload"],
                   created_at=d.get("created_at", ""),
                   schema_version=d.get("schema_version", SCHEMA_VERSION))


class EventLog:
    """Single logical writer, unlimited concurrent readers."""

    def __init__(self, path: str | Path):
        self.path = Path(path)
        self.path.parent.mkdir(parents=True, exist_ok=True)
        self._lock = threading.Lock()
        self._index: dict[tuple[str, str], StoreRecord] = {}
        self._order: list[StoreRecord] = []
        if self.path.exists():
            self._replay()

    def _replay(self) -> None:
        with self.path.open() as f:
            for line in f:
                line = line.strip()
                if not line:
                    continue
                rec = StoreRecord.from_line(line)
                self._index[(rec.kind, rec.id)] = rec
                self._order.append(rec)

    def append(self, record: StoreRecord) -> str:
        if record.kind not in RECORD_KINDS:
            raise StoreError(f"unknown record kind {record.kind!r}")
        with self._lock:
            key = (record.kind, record.id)
            if key in self._index:
                raise DuplicateId(f"{record.kind}/{record.id} already stored")
            with self.path.open("a") as f:
                f.write(record.to_line() + "\n")
                f.flush()
            self._index[key] = record
            self._order.append(record)
        return record.id

    def get(self, kind: str, record_id: str) -> Optional[StoreRecord]:
        return self._index.get((kind, record_id))

    def by_kind(self, kind: str) -> Iterator[StoreRecord]:
        return (r for r in self._order if r.kind == kind)

    def watermark(self) -> int:
        return len(self._order)

    def __len__(self) -> int:
        return len(self._order)
