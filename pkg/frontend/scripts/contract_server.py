"""Serve a live API seeded by the desk pipeline, for UI contract tests.

Usage: python3 frontend/scripts/contract_server.py PORT
Prints "READY" on stdout once the app is constructed. Write token is
"contract-token". State lives in a temp dir and is discarded on exit.
"""

import sys
import tempfile
from pathlib import Path

import uvicorn

from mathbench import desk
from mathbench.extraction import FILTER_STAGES, CandidateQuestion, apply_filter
from mathbench.platform import create_app
from mathbench.runner import ScriptedClient


def make_candidates(n=3):
    out = {}
    for i in range(n):
        cand = CandidateQuestion(
            candidate_id=f"cand-{i}", paper_id=f"2608.0{i}",
            abstract=f"Abstract {i}.", kind="final-answer",
            question=f"Question {i}?", gold=str(i))
        for stage in FILTER_STAGES:
            apply_filter(cand, stage, ScriptedClient(["PASS\nok"]))
        out[cand.candidate_id] = cand
    return out


def main():
    port = int(sys.argv[1])
    workdir = Path(tempfile.mkdtemp())
    store, registry, snapshot, _ = desk.run_desk_pipeline(workdir)
    app = create_app(store, registry, snapshot,
                     candidates=make_candidates(),
                     write_token="contract-token")
    print("READY", flush=True)
    uvicorn.run(app, host="127.0.0.1", port=port, log_level="warning")


if __name__ == "__main__":
    main()
