"""Deterministic static export of a snapshot plus raw traces.

Tree layout (stable across releases):

    out/
      leaderboard.json
      benchmarks/<benchmark-id>.json
      traces/<benchmark-id>/<problem-id>/<model-id>-<run-index>.json
      models/<model-id>.json
"""

from __future__ import annotations

import json
import os
import tempfile
from pathlib import Path

from ..runner import RunRecord
from .leaderboard import LeaderboardSnapshot
from .store import EventLog


def _write_atomic(path: Path, data: str) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=".tmp-")
    try:
        with os.fdopen(fd, "w") as f:
            f.write(data)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _dump(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True) + "\n"


def export_static(snapshot: LeaderboardSnapshot, store: EventLog,
                  out: str | Path) -> Path:
    """Byte-identical re-export for an identical snapshot and store state."""
    out = Path(out)
    doc = snapshot.to_dict()
    _write_atomic(out / "leaderboard.json", _dump(doc))

    for bench_id, rows in sorted(snapshot.per_benchmark.items()):
        _write_atomic(out / "benchmarks" / f"{bench_id}.json",
                      _dump({"benchmark_id": bench_id,
                             "rows": [vars(r) for r in rows]}))

    models: dict[str, dict] = {}
    for rec in store.by_kind("run"):
        run = RunRecord.from_dict(rec.payload)
        trace_path = (out / "traces" / run.benchmark_id / run.problem_id /
                      f"{run.model_id}-{run.run_index}.json")
        _write_atomic(trace_path, _dump(run.to_dict()))
        m = models.setdefault(run.model_id, {"model_id": run.model_id,
                                             "benchmarks": set()})
        m["benchmarks"].add(run.benchmark_id)

    for model_id, meta in sorted(models.items()):
        meta = dict(meta)
        meta["benchmarks"] = sorted(meta["benchmarks"])
        _write_atomic(out / "models" / f"{model_id}.json", _dump(meta))
    return out
