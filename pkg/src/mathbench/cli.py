"""Command-line interface.

Live model endpoints are deliberately out of the tested path: `run` ships
with the deterministic mock client so the whole pipeline works end to end
on a laptop; a live client plugs in through the same interface.
"""

from __future__ import annotations

import json
from decimal import Decimal
from pathlib import Path

import click

from . import desk
from .answers import check_answer
from .grading import grade_final_answer
from .leanverify import FormalProblem, MockCheckerAdapter, Submission, verify
from .platform import EventLog, StoreRecord, build_leaderboard, export_static
from .registry import AnswerSpec, Registry, load_benchmark, load_registry
from .runner import ModelEndpointConfig, run_campaign, RunRecord
from .stats import (
    ResponseMatrix,
    expected_performance,
    fit_irt,
    leave_one_family_out,
    simulate_coverage,
)
from .stats.scenario import coverage_scenario, fit_from_dict, fit_to_dict


@click.group()
def main():
    """Evaluation platform for mathematical-reasoning benchmarks."""


@main.command("check-answer")
@click.argument("candidate")
@click.argument("gold")
@click.option("--spec", "spec_path", type=click.Path(exists=True),
              help="JSON answer spec file")
@click.option("--seed", default=0, show_default=True)
def check_answer_cmd(candidate, gold, spec_path, seed):
    """Decide whether CANDIDATE is equivalent to GOLD."""
    spec = None
    if spec_path:
        spec = AnswerSpec.from_dict(json.loads(Path(spec_path).read_text()))
    v = check_answer(candidate, gold, spec, seed=seed)
    click.echo(f"outcome: {v.outcome}")
    click.echo(f"evidence: {v.evidence}")
    if v.probe_seed is not None:
        click.echo(f"probe-seed: {v.probe_seed}")
    if v.detail:
        click.echo(f"detail: {v.detail}")


@main.command()
@click.option("--model", required=True)
@click.option("--benchmark", "benchmark_id", required=True)
@click.option("--bundles", type=click.Path(exists=True), required=True)
@click.option("--store", "store_path", type=click.Path(), required=True)
@click.option("--n", default=4, show_default=True)
@click.option("--resume", is_flag=True)
def run(model, benchmark_id, bundles, store_path, n, resume):
    """Run the mock model on a benchmark, appending run records."""
    registry = load_registry(bundles)
    spec = registry.benchmark(benchmark_id)
    problems = registry.problems(benchmark_id)
    store = EventLog(store_path)
    existing = []
    if resume:
        existing = [RunRecord.from_dict(r.payload) for r in store.by_kind("run")
                    if r.payload["benchmark_id"] == benchmark_id
                    and r.payload["model_id"] == model]
    endpoint = ModelEndpointConfig(
        model_id=model,
        price_per_input_token=Decimal("0.000001"),
        price_per_output_token=Decimal("0.000002"))
    runs = run_campaign(endpoint, benchmark_id, problems,
                        client_factory=lambda: desk.mock_model_client(model),
                        n=n, existing=existing)
    done = {(r.run_index, r.problem_id) for r in existing}
    new = 0
    for r in runs:
        if (r.run_index, r.problem_id) in done:
            continue
        store.append(StoreRecord(
            kind="run", id=f"{r.model_id}-{r.problem_id}-{r.run_index}",
            payload=r.to_dict()))
        new += 1
    click.echo(f"{new} new runs recorded ({len(runs)} total)")


@main.command()
@click.option("--benchmark", "benchmark_id", required=True)
@click.option("--bundles", type=click.Path(exists=True), required=True)
@click.option("--store", "store_path", type=click.Path(exists=True), required=True)
@click.option("--pipeline", default="final", show_default=True,
              type=click.Choice(["final", "jury", "broken"]))
def grade(benchmark_id, bundles, store_path, pipeline):
    """Grade stored runs (final-answer pipeline with the scripted judge)."""
    if pipeline != "final":
        raise click.ClickException(
            f"{pipeline} grading needs judge clients; wire them in code")
    registry = load_registry(bundles)
    store = EventLog(store_path)
    graded = {tuple(r.payload[k] for k in ("problem_id", "model_id", "run_index"))
              for r in store.by_kind("grade")}
    judge = desk.scripted_judge(None)
    n = 0
    for rec in list(store.by_kind("run")):
        run_ = RunRecord.from_dict(rec.payload)
        if run_.benchmark_id != benchmark_id:
            continue
        if (run_.problem_id, run_.model_id, run_.run_index) in graded:
            continue
        problem = registry.problem(benchmark_id, run_.problem_id)
        g = grade_final_answer(run_, problem.gold_answer, problem.answer_spec,
                               judge, problem.statement)
        store.append(StoreRecord(kind="grade", id=g.grade_id, payload=g.to_dict()))
        n += 1
    click.echo(f"{n} runs graded")


@main.group()
def stats():
    """Aggregation: IRT fitting, imputation, intervals, robustness."""


def _matrix_from_json(path) -> ResponseMatrix:
    d = json.loads(Path(path).read_text())
    import numpy as np
    return ResponseMatrix(
        models=d["models"], questions=d["questions"],
        successes=np.asarray(d["successes"]),
        runs=np.asarray(d["runs"]),
        mask=np.asarray(d["mask"], dtype=bool),
        family_tags=d.get("family_tags"))


@stats.command("fit-irt")
@click.option("--matrix", "matrix_path", type=click.Path(exists=True),
              help="response matrix JSON; omit for the synthetic scenario")
@click.option("--seed", default=1, show_default=True)
@click.option("--out", "out_path", type=click.Path(), required=True)
def fit_irt_cmd(matrix_path, seed, out_path):
    """Fit the capability model and write the fit as JSON."""
    if matrix_path:
        matrix = _matrix_from_json(matrix_path)
    else:
        matrix, _ = coverage_scenario(seed=seed)
    fit = fit_irt(matrix)
    Path(out_path).write_text(json.dumps(fit_to_dict(fit), indent=1))
    click.echo(f"fit written to {out_path} "
               f"({fit.iterations} iterations, ll={fit.log_likelihood:.2f})")


@stats.command("expected-performance")
@click.option("--fit", "fit_path", type=click.Path(exists=True), required=True)
def expected_performance_cmd(fit_path):
    fit = fit_from_dict(json.loads(Path(fit_path).read_text()))
    for model, v in sorted(expected_performance(fit).items(),
                           key=lambda kv: -kv[1]):
        click.echo(f"{model}\t{v:.4f}")


@stats.command("impute-costs")
@click.option("--observations", "obs_path", type=click.Path(exists=True),
              required=True,
              help="JSON list of {model, benchmark, cost} objects")
def impute_costs_cmd(obs_path):
    from .stats import CostObservation, fit_cost_model
    rows = json.loads(Path(obs_path).read_text())
    fit = fit_cost_model(CostObservation(r["model"], r["benchmark"], r["cost"])
                         for r in rows)
    for m in fit.models:
        for b in fit.benchmarks:
            click.echo(f"{m}\t{b}\t{fit.predict(m, b):.6f}")


@stats.command("coverage")
@click.option("--fit", "fit_path", type=click.Path(exists=True),
              help="IRT fit JSON; omit to fit the synthetic scenario")
@click.option("--sims", default=1000, show_default=True)
@click.option("--runs", default=4, show_default=True)
@click.option("--seed", default=123, show_default=True)
def coverage_cmd(fit_path, sims, runs, seed):
    """Empirical coverage of the five interval methods at nominal 95%."""
    if fit_path:
        fit = fit_from_dict(json.loads(Path(fit_path).read_text()))
    else:
        matrix, _ = coverage_scenario(runs=runs)
        fit = fit_irt(matrix)
    report = simulate_coverage(fit.p, n_sims=sims, runs=runs, seed=seed)
    for (method, level), cov in sorted(report.coverage.items()):
        click.echo(f"{method}\tnominal {level:.0%}\tempirical {cov:.2%}")


@stats.command("robustness")
@click.option("--matrix", "matrix_path", type=click.Path(exists=True),
              required=True)
def robustness_cmd(matrix_path):
    """Leave-one-family-out rank shifts."""
    matrix = _matrix_from_json(matrix_path)
    table = leave_one_family_out(matrix)
    click.echo(f"max rank shift: {table.max_shift()}")
    click.echo(f"top-10 retention: {table.top_k_retention(10):.0%}")
    for a in table.ablations:
        worst = max(a.rank_shift.items(), key=lambda kv: abs(kv[1]))
        click.echo(f"without {a.family}: worst shift {worst[1]:+d} ({worst[0]})")


@main.command()
@click.option("--bundles", type=click.Path(exists=True), required=True)
@click.option("--store", "store_path", type=click.Path(exists=True), required=True)
@click.option("--out", "out_dir", type=click.Path(), required=True)
def export(bundles, store_path, out_dir):
    """Build a leaderboard snapshot and export the static site tree."""
    registry = load_registry(bundles)
    store = EventLog(store_path)
    snapshot = build_leaderboard(store, registry)
    export_static(snapshot, store, out_dir)
    click.echo(f"exported snapshot (watermark {snapshot.watermark}) to {out_dir}")


@main.command()
@click.option("--bundles", type=click.Path(exists=True), required=True)
@click.option("--store", "store_path", type=click.Path(exists=True), required=True)
@click.option("--port", default=8100, show_default=True)
@click.option("--write-token", default=None)
def serve(bundles, store_path, port, write_token):
    """Serve the HTTP API over the store and a fresh snapshot."""
    import uvicorn
    from .platform import create_app
    registry = load_registry(bundles)
    store = EventLog(store_path)
    snapshot = build_leaderboard(store, registry)
    app = create_app(store, registry, snapshot, write_token=write_token)
    uvicorn.run(app, host="127.0.0.1", port=port, log_level="warning")


@main.command("demo")
@click.option("--workdir", type=click.Path(), default="desk-run",
              show_default=True)
def demo(workdir):
    """Run the full mock pipeline: run, grade, stats, export."""
    store, registry, snapshot, export_dir = desk.run_desk_pipeline(workdir)
    click.echo(f"store: {store.path}")
    for bench, rows in snapshot.per_benchmark.items():
        for r in rows:
            click.echo(f"{bench}\t{r.model_id}\t{r.mean_score:.3f} "
                       f"[{r.ci_low:.3f}, {r.ci_high:.3f}]\tcost/run {r.avg_cost}")
    click.echo(f"export: {export_dir}")


@main.command()
@click.option("--month", required=True)
@click.option("--kind", default="final-answer", show_default=True,
              type=click.Choice(["final-answer", "perturbed", "formal"]))
@click.option("--papers", "papers_path", type=click.Path(exists=True),
              required=True, help="JSON list of {paper_id, abstract}")
@click.option("--out", "out_dir", type=click.Path(), required=True)
def extract(month, kind, papers_path, out_dir):
    """Generate and filter candidates with scripted clients, then export
    the awaiting-review queue."""
    from .extraction import FILTER_STAGES, apply_filter, generate_candidates
    from .runner import ScriptedClient
    papers = json.loads(Path(papers_path).read_text())
    kind_name = {"final-answer": "final-answer", "perturbed": "perturbed-pair",
                 "formal": "formal-claim"}[kind]
    generator = ScriptedClient(["QUESTION: placeholder\nGOLD: 0"])
    filt = ScriptedClient(["PASS"])
    cands = generate_candidates(papers, generator, kind_name)
    for c in cands:
        for stage in FILTER_STAGES:
            if c.state in ("rejected", "parked"):
                break
            apply_filter(c, stage, filt)
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    queue = [c for c in cands if c.state == "awaiting-review"]
    (out / f"queue-{month}.json").write_text(json.dumps(
        [{"candidate_id": c.candidate_id, "paper_id": c.paper_id,
          "question": c.question, "state": c.state,
          "stage_history": c.stage_history} for c in queue], indent=1))
    click.echo(f"{len(queue)} candidates awaiting review "
               f"-> {out / f'queue-{month}.json'}")


@main.group()
def formal():
    """Formal-benchmark verification."""


@formal.command("verify")
@click.option("--problem", "problem_path", type=click.Path(exists=True),
              required=True, help="JSON FormalProblem")
@click.option("--submission", "submission_path", type=click.Path(exists=True),
              required=True)
@click.option("--mock-compile-ok/--mock-compile-fail", default=True,
              help="mock adapter behavior (a real adapter plugs in in code)")
def formal_verify(problem_path, submission_path, mock_compile_ok):
    d = json.loads(Path(problem_path).read_text())
    problem = FormalProblem(**d)
    sub = Submission(problem_id=problem.problem_id,
                     file=Path(submission_path).read_text())
    verdict = verify(sub, problem, MockCheckerAdapter(compile_ok=mock_compile_ok))
    click.echo(f"outcome: {verdict.outcome}")
    if verdict.checker_log:
        click.echo(f"log: {verdict.checker_log}")


if __name__ == "__main__":
    main()
