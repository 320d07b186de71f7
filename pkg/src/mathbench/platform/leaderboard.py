"""Leaderboard snapshots derived from raw store records.

Every displayed number is recomputable from run and grade records; the
snapshot carries the store watermark it was built from.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from decimal import Decimal
from typing import Optional

from ..grading import GradeRecord
from ..registry import Registry
from ..runner import RunRecord
from ..stats import ci
from .store import EventLog

SURPRISING_P_THRESHOLD = 0.9


@dataclass
class LeaderboardRow:
    model_id: str
    mean_score: float           # fraction of max points
    ci_low: float
    ci_high: float
    runs: int
    avg_cost: Optional[str]     # decimal string, per problem
    flags: list = field(default_factory=list)


@dataclass
class LeaderboardSnapshot:
    per_benchmark: dict[str, list[LeaderboardRow]]
    expected_performance: dict[str, float]
    expected_cost: dict[str, str]
    watermark: int
    notices: list = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            "per_benchmark": {
                b: [vars(r) for r in rows]
                for b, rows in self.per_benchmark.items()
            },
            "expected_performance": self.expected_performance,
            "expected_cost": self.expected_cost,
            "watermark": self.watermark,
            "notices": self.notices,
        }


def final_grades(store: EventLog) -> dict[tuple, GradeRecord]:
    """Latest grade per (problem, model, run), following supersede chains."""
    grades = [GradeRecord.from_dict(r.payload) for r in store.by_kind("grade")]
    superseded = {g.supersedes for g in grades if g.supersedes}
    latest: dict[tuple, GradeRecord] = {}
    for g in grades:
        if g.grade_id in superseded:
            continue
        latest[(g.problem_id, g.model_id, g.run_index)] = g
    return latest


def runs_by_model_benchmark(store: EventLog) -> dict[tuple[str, str], list[RunRecord]]:
    out: dict[tuple[str, str], list[RunRecord]] = {}
    for r in store.by_kind("run"):
        run = RunRecord.from_dict(r.payload)
        out.setdefault((run.model_id, run.benchmark_id), []).append(run)
    return out


def build_leaderboard(store: EventLog, registry: Registry,
                      expected_performance: Optional[dict[str, float]] = None,
                      expected_cost: Optional[dict[str, Decimal]] = None,
                      level: float = 0.95) -> LeaderboardSnapshot:
    grades = final_grades(store)
    runs = runs_by_model_benchmark(store)
    notices = []
    per_benchmark: dict[str, list[LeaderboardRow]] = {}

    for bench in registry.active_benchmarks():
        rows = []
        models = sorted({m for (m, b) in runs if b == bench.benchmark_id})
        for model in models:
            mruns = [r for r in runs[(model, bench.benchmark_id)]
                     if r.status != "failed-excluded"]
            if not mruns:
                continue  # missing is not zero: no row without usable runs
            scored = []
            for r in mruns:
                g = grades.get((r.problem_id, model, r.run_index))
                if g is not None:
                    scored.append(g.score / g.max_score)
            if not scored:
                continue
            n = len(scored)
            mean = sum(scored) / n
            interval = ci(mean, n, "pooled-normal", level)
            costs = [r.cost for r in mruns if r.cost is not None]
            avg_cost = str(sum(costs) / len(costs)) if costs else None
            rows.append(LeaderboardRow(
                model_id=model, mean_score=mean,
                ci_low=interval.low, ci_high=interval.high,
                runs=n, avg_cost=avg_cost,
                flags=(["degenerate-ci"] if interval.degenerate else [])))
        rows.sort(key=lambda r: (-r.mean_score, r.model_id))
        per_benchmark[bench.benchmark_id] = rows

    if expected_performance is None:
        notices.append("expected-performance fit unavailable; global column omitted")
        expected_performance = {}
    if expected_cost is None:
        notices.append("expected-cost fit unavailable; global column omitted")
        expected_cost = {}
    return LeaderboardSnapshot(
        per_benchmark=per_benchmark,
        expected_performance=dict(expected_performance),
        expected_cost={m: str(c) for m, c in expected_cost.items()},
        watermark=store.watermark(),
        notices=notices,
    )


def surprising_failures(store: EventLog, fitted_p: dict[tuple[str, str], float],
                        threshold: float = SURPRISING_P_THRESHOLD) -> list[dict]:
    """Runs scored 0 on questions where the model's fitted success
    probability is high."""
    grades = final_grades(store)
    out = []
    for (pid, model, idx), g in sorted(grades.items()):
        p = fitted_p.get((model, pid))
        if p is not None and p >= threshold and g.score == 0:
            out.append({"problem_id": pid, "model_id": model,
                        "run_index": idx, "fitted_p": p})
    return out
