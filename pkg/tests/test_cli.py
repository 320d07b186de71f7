import json

from click.testing import CliRunner

from mathbench.cli import main


def invoke(*args):
    return CliRunner().invoke(main, args, catch_exceptions=False)


def test_check_answer_command():
    r = invoke("check-answer", r"\frac{\sqrt{2}}{2}", r"1/\sqrt{2}")
    assert r.exit_code == 0
    assert "outcome: equivalent" in r.output


def test_check_answer_with_spec(tmp_path):
    spec = tmp_path / "spec.json"
    spec.write_text(json.dumps({"kind": "integer-range", "range": [0, 999]}))
    r = invoke("check-answer", "1000", "4", "--spec", str(spec))
    assert "outcome: different" in r.output
    assert "outside [0, 999]" in r.output


def test_full_cli_flow(tmp_path):
    desk_dir = tmp_path / "desk"
    r = invoke("demo", "--workdir", str(desk_dir))
    assert r.exit_code == 0
    assert "toy-2026" in r.output

    bundles = str(desk_dir / "bundles")
    store = str(desk_dir / "store" / "log.jsonl")

    r = invoke("run", "--model", "mock-c", "--benchmark", "toy-2026",
               "--bundles", bundles, "--store", store, "--n", "2")
    assert "20 new runs" in r.output
    # resume finds nothing left to do
    r = invoke("run", "--model", "mock-c", "--benchmark", "toy-2026",
               "--bundles", bundles, "--store", store, "--n", "2", "--resume")
    assert "0 new runs" in r.output

    r = invoke("grade", "--benchmark", "toy-2026",
               "--bundles", bundles, "--store", store)
    assert "20 runs graded" in r.output

    out = tmp_path / "site"
    r = invoke("export", "--bundles", bundles, "--store", store,
               "--out", str(out))
    assert r.exit_code == 0
    doc = json.loads((out / "leaderboard.json").read_text())
    models = {row["model_id"] for row in doc["per_benchmark"]["toy-2026"]}
    assert models == {"mock-a", "mock-b", "mock-c"}


def test_stats_coverage_command(tmp_path):
    # tiny fit so the command stays fast; the acceptance suite runs the
    # full-size study
    from mathbench.stats import fit_irt
    from mathbench.stats.scenario import coverage_scenario, fit_to_dict
    matrix, _ = coverage_scenario(n_models=6, n_questions=30, seed=2)
    fit = fit_irt(matrix)
    fit_path = tmp_path / "fit.json"
    fit_path.write_text(json.dumps(fit_to_dict(fit)))

    r = invoke("stats", "coverage", "--fit", str(fit_path), "--sims", "50")
    assert r.exit_code == 0
    assert "pooled-normal" in r.output and "wilson" in r.output

    r = invoke("stats", "expected-performance", "--fit", str(fit_path))
    assert r.exit_code == 0 and len(r.output.splitlines()) == 6
