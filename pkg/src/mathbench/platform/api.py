"""HTTP surface consumed by the web console and external users.

Read endpoints serve the snapshot and raw traces; the only writes are the
two human-in-the-loop actions (extraction review, grade review), and each
write appends store records, never rewriting anything.
"""

from __future__ import annotations

from decimal import Decimal
from typing import Optional

from fastapi import FastAPI, Header, HTTPException
from pydantic import BaseModel

from ..extraction import CandidateQuestion, PipelineError, ReviewDecision, \
    record_review_decision
from ..grading import GradeRecord, GradingError, record_human_review
from ..registry import Registry
from ..runner import RunRecord
from .leaderboard import LeaderboardSnapshot, final_grades, surprising_failures
from .store import EventLog, StoreRecord


class ReviewPayload(BaseModel):
    reviewer_id: str
    decision: str                   # accept | revise | reject
    revised_text: Optional[str] = None
    reason: Optional[str] = None


class GradeReviewPayload(BaseModel):
    decision: str                   # confirm | override
    score: Optional[float] = None
    note: Optional[str] = None


def create_app(store: EventLog, registry: Registry,
               snapshot: LeaderboardSnapshot,
               candidates: Optional[dict[str, CandidateQuestion]] = None,
               fitted_p: Optional[dict[tuple[str, str], float]] = None,
               write_token: Optional[str] = None) -> FastAPI:
    app = FastAPI(title="mathbench")
    candidates = candidates if candidates is not None else {}
    fitted_p = fitted_p or {}
    counters = {"review": 0, "grade-review": 0}

    def check_token(token: Optional[str]) -> None:
        if write_token is not None and token != write_token:
            raise HTTPException(401, "missing or invalid write token")

    @app.get("/api/leaderboard")
    def leaderboard():
        return snapshot.to_dict()

    @app.get("/api/benchmarks/{bench_id}")
    def benchmark(bench_id: str):
        try:
            spec = registry.benchmark(bench_id)
        except KeyError:
            raise HTTPException(404, f"unknown benchmark {bench_id}")
        rows = snapshot.per_benchmark.get(bench_id, [])
        return {"spec": spec.to_dict(), "rows": [vars(r) for r in rows]}

    @app.get("/api/benchmarks/{bench_id}/problems/{pid}/runs")
    def problem_runs(bench_id: str, pid: str):
        runs = [RunRecord.from_dict(r.payload) for r in store.by_kind("run")]
        hits = [r.to_dict() for r in runs
                if r.benchmark_id == bench_id and r.problem_id == pid]
        if not hits:
            raise HTTPException(404, "no runs for that problem")
        return {"runs": hits}

    @app.get("/api/models/{model_id}")
    def model_page(model_id: str):
        per_bench = {}
        for bench_id, rows in snapshot.per_benchmark.items():
            for row in rows:
                if row.model_id == model_id:
                    per_bench[bench_id] = vars(row)
        if not per_bench:
            raise HTTPException(404, f"no data for model {model_id}")
        ep = snapshot.expected_performance.get(model_id)
        ranking = sorted(snapshot.expected_performance.items(),
                         key=lambda kv: (-kv[1], kv[0]))
        expected_rank = next((i + 1 for i, (m, _) in enumerate(ranking)
                              if m == model_id), None)
        return {"model_id": model_id, "benchmarks": per_bench,
                "expected_performance": ep, "expected_rank": expected_rank,
                "expected_cost": snapshot.expected_cost.get(model_id)}

    @app.get("/api/compare")
    def compare(a: str, b: str):
        deltas = {}
        for bench_id, rows in snapshot.per_benchmark.items():
            ra = next((r for r in rows if r.model_id == a), None)
            rb = next((r for r in rows if r.model_id == b), None)
            if ra is None or rb is None:
                continue
            cost_delta = None
            if ra.avg_cost is not None and rb.avg_cost is not None:
                cost_delta = str(Decimal(ra.avg_cost) - Decimal(rb.avg_cost))
            deltas[bench_id] = {
                "a": vars(ra), "b": vars(rb),
                "score_delta": ra.mean_score - rb.mean_score,
                "cost_delta": cost_delta,
            }
        if not deltas:
            raise HTTPException(404, "models share no benchmark")
        return {"a": a, "b": b, "benchmarks": deltas}

    @app.get("/api/surprising")
    def surprising():
        return {"failures": surprising_failures(store, fitted_p)}

    @app.get("/api/grades")
    def grade_queue(flagged: bool = False):
        latest = sorted(final_grades(store).values(),
                        key=lambda g: (g.problem_id, g.model_id, g.run_index))
        if flagged:
            latest = [g for g in latest if g.flags]
        return {"grades": [g.to_dict() for g in latest]}

    @app.get("/api/review")
    def review_queue():
        return {"candidates": [
            {"candidate_id": c.candidate_id, "paper_id": c.paper_id,
             "question": c.question, "kind": c.kind, "state": c.state,
             "stage_history": c.stage_history}
            for c in sorted(candidates.values(), key=lambda c: c.candidate_id)
            if c.state == "awaiting-review"
        ]}

    @app.post("/api/review/{candidate_id}")
    def post_review(candidate_id: str, body: ReviewPayload,
                    x_write_token: Optional[str] = Header(default=None)):
        check_token(x_write_token)
        cand = candidates.get(candidate_id)
        if cand is None:
            raise HTTPException(404, f"unknown candidate {candidate_id}")
        try:
            decision = ReviewDecision(body.reviewer_id, body.decision,
                                      revised_text=body.revised_text,
                                      reason=body.reason)
            record_review_decision(cand, decision)
        except PipelineError as e:
            raise HTTPException(409, str(e))
        counters["review"] += 1
        store.append(StoreRecord(
            kind="candidate",
            id=f"{candidate_id}-review-{counters['review']}",
            payload={"candidate_id": candidate_id,
                     "reviewer_id": body.reviewer_id,
                     "decision": body.decision,
                     "reason": body.reason,
                     "revised_text": body.revised_text,
                     "state": cand.state}))
        return {"candidate_id": candidate_id, "state": cand.state}

    @app.post("/api/grades/{grade_id}/review")
    def post_grade_review(grade_id: str, body: GradeReviewPayload,
                          x_write_token: Optional[str] = Header(default=None)):
        check_token(x_write_token)
        latest = {g.grade_id: g for g in final_grades(store).values()}
        grade = latest.get(grade_id)
        if grade is None:
            stored = store.get("grade", grade_id)
            if stored is not None:
                raise HTTPException(409, "grade already superseded")
            raise HTTPException(404, f"unknown grade {grade_id}")
        try:
            new = record_human_review(grade, body.decision,
                                      score=body.score, note=body.note)
        except GradingError as e:
            raise HTTPException(422, str(e))
        counters["grade-review"] += 1
        store.append(StoreRecord(kind="grade", id=new.grade_id,
                                 payload=new.to_dict()))
        return {"grade_id": new.grade_id, "score": new.score,
                "supersedes": grade_id, "final": new.final}

    return app
