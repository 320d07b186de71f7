"""End-to-end desk pipeline on a mock model and a toy benchmark.

Used by the CLI demo, the acceptance suite, and as the seed for the review
console's contract tests: run -> grade -> stats -> export, with every
leaderboard number recomputable from raw store records.
"""

from __future__ import annotations

import hashlib
import json
from decimal import Decimal
from pathlib import Path

from .grading import grade_final_answer
from .platform import EventLog, StoreRecord, build_leaderboard, export_static
from .registry import (
    AnswerSpec,
    BenchmarkSpec,
    ProblemRecord,
    Registry,
    export_benchmark,
    load_benchmark,
)
from .runner import (
    ClientReply,
    FnClient,
    ModelEndpointConfig,
    RunRecord,
    Usage,
    run_campaign,
)

TOY_BENCHMARK_ID = "toy-2026"


def make_toy_benchmark(out: str | Path, size: int = 10):
    spec = BenchmarkSpec(
        benchmark_id=TOY_BENCHMARK_ID, name="Toy 2026",
        category="final-answer", family_tag="toy", size=size)
    records = [
        ProblemRecord(
            problem_id=f"p{i:02d}", benchmark_id=TOY_BENCHMARK_ID,
            statement=f"Compute {i} + {i}.",
            answer_spec=AnswerSpec("integer-range", range=(0, 999)),
            gold_answer=str(2 * i))
        for i in range(size)
    ]
    export_benchmark(spec, records, out)
    return spec, records


def mock_model_client(model_id: str, accuracy_salt: str = ""):
    """Deterministic client: answers each problem correctly or off-by-one
    based on a hash of (model, problem, attempt)."""

    def reply(messages, tools):
        prompt = messages[0].content
        # the statement embeds the two addends
        expr = prompt.split("Compute ")[1].split(".")[0]
        a, b = (int(x) for x in expr.split(" + "))
        digest = hashlib.sha256(
            f"{model_id}|{accuracy_salt}|{prompt}|{len(messages)}".encode()
        ).digest()
        correct = digest[0] < 192  # 75% of attempts succeed
        answer = a + b if correct else a + b + 1
        return ClientReply(content=f"The sum is \\boxed{{{answer}}}.",
                           usage=Usage(100, 50))

    return FnClient(reply)


def scripted_judge(gold_lookup):
    """Judge that independently recomputes toy answers (no model identity)."""

    def reply(messages, tools):
        text = messages[0].content
        gold_line = [ln for ln in text.splitlines() if ln.startswith("Gold answer:")]
        cand_line = [ln for ln in text.splitlines() if ln.startswith("Candidate answer:")]
        gold = gold_line[0].split(":", 1)[1].strip()
        cand = cand_line[0].split(":", 1)[1].strip()
        ok = gold == cand
        return ClientReply(content="CORRECT" if ok else "INCORRECT",
                           usage=Usage(10, 1))

    return FnClient(reply)


def run_desk_pipeline(workdir: str | Path, models=("mock-a", "mock-b"),
                      n: int = 4, size: int = 10):
    """Full mock pipeline; returns (store, registry, snapshot, export_dir)."""
    workdir = Path(workdir)
    bundle_dir = workdir / "bundles" / TOY_BENCHMARK_ID
    make_toy_benchmark(bundle_dir, size=size)
    spec, problems = load_benchmark(bundle_dir)
    registry = Registry()
    registry.add(spec, problems)

    store = EventLog(workdir / "store" / "log.jsonl")
    judge = scripted_judge(None)

    for model_id in models:
        endpoint = ModelEndpointConfig(
            model_id=model_id,
            price_per_input_token=Decimal("0.000001"),
            price_per_output_token=Decimal("0.000002"))
        runs = run_campaign(
            endpoint, spec.benchmark_id, problems,
            client_factory=lambda m=model_id: mock_model_client(m),
            n=n)
        for run in runs:
            store.append(StoreRecord(
                kind="run",
                id=f"{run.model_id}-{run.problem_id}-{run.run_index}",
                payload=run.to_dict()))
            problem = registry.problem(spec.benchmark_id, run.problem_id)
            grade = grade_final_answer(run, problem.gold_answer,
                                       problem.answer_spec, judge,
                                       problem.statement)
            store.append(StoreRecord(kind="grade", id=grade.grade_id,
                                     payload=grade.to_dict()))

    snapshot = build_leaderboard(store, registry)
    export_dir = workdir / "export"
    export_static(snapshot, store, export_dir)
    return store, registry, snapshot, export_dir


def recompute_row(store: EventLog, benchmark_id: str, model_id: str):
    """Independent recomputation of a leaderboard row from raw records."""
    from .platform.leaderboard import final_grades
    grades = final_grades(store)
    runs = [RunRecord.from_dict(r.payload) for r in store.by_kind("run")
            if r.payload["benchmark_id"] == benchmark_id
            and r.payload["model_id"] == model_id
            and r.payload["status"] != "failed-excluded"]
    scored = [grades[(r.problem_id, model_id, r.run_index)] for r in runs
              if (r.problem_id, model_id, r.run_index) in grades]
    fractions = [g.score / g.max_score for g in scored]
    mean = sum(fractions) / len(fractions)
    return mean, len(fractions)
