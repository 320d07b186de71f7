"""Record API responses into frontend/fixtures/ for fixture-first UI tests.

Run from the repo root after installing the package:
    python3 frontend/scripts/record_fixtures.py
"""

import json
import tempfile
from pathlib import Path

from fastapi.testclient import TestClient

from mathbench import desk
from mathbench.extraction import FILTER_STAGES, CandidateQuestion, apply_filter
from mathbench.platform import create_app
from mathbench.runner import Message, RunRecord, ScriptedClient, Usage

FIXTURES = Path(__file__).resolve().parent.parent / "fixtures"


def seeded_client():
    workdir = Path(tempfile.mkdtemp())
    store, registry, snapshot, _ = desk.run_desk_pipeline(workdir)
    cand = CandidateQuestion(
        candidate_id="cand-fixture-1", paper_id="2608.01234",
        abstract="We bound the spectral gap of a random walk.",
        kind="final-answer",
        question="What is the spectral gap bound shown for d = 3?",
        gold="1/4")
    for stage in FILTER_STAGES:
        apply_filter(cand, stage, ScriptedClient(["PASS\nclears this filter"]))
    app = create_app(store, registry, snapshot,
                     candidates={cand.candidate_id: cand})
    return TestClient(app)


def tool_cap_trace():
    """A synthetic tool-limited run that hit the call cap."""
    transcript = [Message("user", "Compute the determinant with the sandbox.")]
    for i in range(200):
        transcript.append(Message("assistant", f"call {i}",
                                  tool_call={"name": "python", "input": f"step({i})"}))
        transcript.append(Message("tool", f"result {i}", tool_result={"ok": True}))
    run = RunRecord(
        problem_id="p07", benchmark_id="toy-2026", model_id="mock-tools",
        run_index=0, transcript=transcript, final_text=None,
        usage=Usage(400000, 90000), cost="0.58", status="tool-cap",
        tool_calls=200)
    return run.to_dict()


def main():
    FIXTURES.mkdir(exist_ok=True)
    client = seeded_client()
    recordings = {
        "leaderboard.json": client.get("/api/leaderboard"),
        "benchmark.json": client.get(f"/api/benchmarks/{desk.TOY_BENCHMARK_ID}"),
        "problem_runs.json": client.get(
            f"/api/benchmarks/{desk.TOY_BENCHMARK_ID}/problems/p00/runs"),
        "model.json": client.get("/api/models/mock-a"),
        "compare.json": client.get("/api/compare?a=mock-a&b=mock-b"),
        "review_queue.json": client.get("/api/review"),
        "grades.json": client.get("/api/grades"),
        "error_404.json": client.get("/api/benchmarks/no-such-benchmark"),
    }
    for name, res in recordings.items():
        (FIXTURES / name).write_text(json.dumps(res.json(), indent=2) + "\n")
        print(f"wrote {name} ({res.status_code})")
    (FIXTURES / "trace_toolcap.json").write_text(
        json.dumps(tool_cap_trace(), indent=2) + "\n")
    print("wrote trace_toolcap.json")


if __name__ == "__main__":
    main()
