# tests/test_app.py
import json

import pytest
from click.testing import CliRunner

from app.app import EXIT_INTERNAL, EXIT_USAGE, EXIT_VERIFICATION, cli
from backend.config.config import Config
from backend.engines import unitary_dd, verification
from backend.engines.errors import InternalConsistencyError
from backend.models.models import CheckResult, Suite, SuiteResult


@pytest.fixture
def runner(monkeypatch):
    for name in ("EO_SEED", "EO_PRIME", "EO_SAMPLES", "EO_LOG_LEVEL"):
        monkeypatch.delenv(name, raising=False)
    return CliRunner(mix_stderr=False)


def run_json(runner, args):
    result = runner.invoke(cli, args + ["--format", "json"])
    assert result.exit_code == 0, result.output + result.stderr
    return json.loads(result.output)


def test_orth_json_report(runner):
    report = run_json(runner, ["orth", "--n", "3", "--p", "5"])
    assert report["schema"] == "eo-report/v1"
    assert report["command"] == "orth"
    assert report["ok"] is True
    strata = report["tables"]["strata"]
    assert [row["dim"] for row in strata] == [0, 1, 2, 3]
    assert [row["a_number"] for row in strata] == [8, 4, 4, 0]
    assert report["inputs"]["p"] == 5


def test_report_matches_published_schema(runner):
    with open(Config(load_env=False).get_schema_path()) as f:
        schema = json.load(f)
    report = run_json(runner, ["orth", "--n", "2"])
    assert set(schema["required"]) <= set(report)
    assert report["schema"] == schema["properties"]["schema"]["const"]
    assert report["command"] in schema["properties"]["command"]["enum"]


def test_orth_dot_has_dashed_covers(runner):
    result = runner.invoke(cli, ["orth", "--n", "2", "--format", "dot"])
    assert result.exit_code == 0
    assert result.output.startswith("digraph {")
    assert result.output.count("style=dashed") == 4


def test_orth_table_prints_status(runner):
    result = runner.invoke(cli, ["orth", "--n", "1"])
    assert result.exit_code == 0
    assert "strata" in result.output
    assert result.output.strip().endswith("orth: OK")
    # ANSI codes are stripped when the output is not a terminal
    assert "\x1b[" not in result.output


def test_orth_rejects_bad_arguments(runner):
    assert runner.invoke(cli, ["orth", "--n", "0"]).exit_code == EXIT_USAGE
    assert runner.invoke(cli, ["orth", "--n", "3", "--p", "4"]).exit_code == EXIT_USAGE
    assert runner.invoke(cli, ["orth", "--n", "3", "--p", "2"]).exit_code == EXIT_USAGE
    assert runner.invoke(cli, ["orth", "--n", "3", "--ambient", "split"]).exit_code == EXIT_USAGE
    assert runner.invoke(cli, ["orth", "--n", "4", "--source", "nonsplit"]).exit_code == EXIT_USAGE
    assert runner.invoke(cli, ["orth", "--n", "3", "--subcase", "II"]).exit_code == EXIT_USAGE


def test_embed_orth_split_source(runner):
    report = run_json(runner, ["embed", "orth", "--n", "3", "--source", "split"])
    rows = report["tables"]["embedding"]
    assert sorted((row["source_dim"], row["target_dim"]) for row in rows) == [(0, 0), (1, 2), (1, 2), (2, 3)]
    assert all(row["agree"] for row in rows)


def test_embed_orth_even_cases(runner):
    for flags in (["--c", "square"], ["--c", "nonsquare"], ["--ambient", "nonsplit"]):
        report = run_json(runner, ["embed", "orth", "--n", "4", "--p", "7"] + flags)
        assert report["ok"] is True


def test_embed_orth_dot(runner):
    result = runner.invoke(cli, ["embed", "orth", "--n", "1", "--format", "dot"])
    assert result.exit_code == 0
    assert "subgraph cluster_source" in result.output
    assert "style=solid" in result.output


def test_embed_unitary_inert(runner):
    report = run_json(runner, ["embed", "unitary", "--n", "4", "--inert"])
    assert [row["closed_form"] for row in report["tables"]["embedding"]] == [0, 1, 2, 4, 5]


def test_embed_unitary_split(runner):
    report = run_json(runner, ["embed", "unitary", "--n", "2", "--split"])
    assert [row["closed_form"] for row in report["tables"]["embedding"]] == [1, 2, 3]


def test_embed_unitary_internal_error(runner, monkeypatch):
    def broken(n, a, behavior):
        raise InternalConsistencyError("routes disagree", trace={"a": a})

    monkeypatch.setattr(unitary_dd, "embed_image_unitary", broken)
    result = runner.invoke(cli, ["embed", "unitary", "--n", "2"])
    assert result.exit_code == EXIT_INTERNAL
    assert "routes disagree" in result.stderr


def test_newton_n1(runner):
    report = run_json(runner, ["newton", "--n", "1"])
    rows = {row["name"]: row for row in report["tables"]["newton"]}
    assert rows["b_1"]["slopes"] == {"0": 2, "1": 2}
    assert rows["b_1"]["route"] == "clifford"
    assert rows["basic"]["slopes"] == {"1/2": 4}


def test_newton_primed_matches_unprimed(runner):
    report = run_json(runner, ["newton", "--n", "2", "--even-split"])
    rows = {row["name"]: row for row in report["tables"]["newton"]}
    assert rows["b_2"]["slopes"] == rows["b'_2"]["slopes"]
    nonsplit = run_json(runner, ["newton", "--n", "2", "--even-nonsplit"])
    assert [row["name"] for row in nonsplit["tables"]["newton"]] == ["b_1", "basic"]


def test_newton_has_no_dot_output(runner):
    result = runner.invoke(cli, ["newton", "--n", "3", "--format", "dot"])
    assert result.exit_code == EXIT_USAGE


def test_unitary_catalog(runner):
    report = run_json(runner, ["unitary", "--n", "3"])
    rows = report["tables"]["strata"]
    assert [row["p_rank"] for row in rows] == [0, 0, 0, 2]
    assert all(row["slopes"] for row in rows)
    split = run_json(runner, ["unitary", "--n", "3", "--split"])
    assert all(row["slopes"] is None for row in split["tables"]["strata"])


def test_json_output_is_deterministic(runner):
    args = ["embed", "orth", "--n", "4", "--format", "json"]
    first = runner.invoke(cli, args)
    second = runner.invoke(cli, args)
    assert first.exit_code == second.exit_code == 0
    assert first.output == second.output


def test_verify_frames(runner):
    report = run_json(
        runner, ["verify", "frames", "--n", "4", "--p", "7", "--samples", "2", "--seed", "11"]
    )
    assert report["tables"]["summary"] == [{"suite": "frames", "checks": 2, "failed": 0}]
    assert report["inputs"]["seed"] == 11


def test_verify_uses_env_defaults(runner, monkeypatch):
    monkeypatch.setenv("EO_SEED", "3")
    monkeypatch.setenv("EO_SAMPLES", "2")
    report = run_json(runner, ["verify", "frames", "--n", "2", "--p", "3"])
    assert report["inputs"]["seed"] == 3
    assert report["inputs"]["samples"] == 2


def test_verify_rejects_bad_prime(runner):
    result = runner.invoke(cli, ["verify", "frames", "--p", "9"])
    assert result.exit_code == EXIT_USAGE


def test_verify_failure_exit_code(runner, monkeypatch):
    def failing(suite, seed, samples, n_values=None, primes=None):
        return [
            SuiteResult(
                suite=Suite.UNITARY,
                checks=[CheckResult(name="unitary n=1 inert", passed=False, detail="broken")],
            )
        ]

    monkeypatch.setattr(verification, "run_suites", failing)
    result = runner.invoke(cli, ["verify", "unitary"])
    assert result.exit_code == EXIT_VERIFICATION
    assert "unitary n=1 inert" in result.stderr


def test_invalid_env_is_usage_error(runner, monkeypatch):
    monkeypatch.setenv("EO_PRIME", "9")
    assert runner.invoke(cli, ["orth", "--n", "1"]).exit_code == EXIT_USAGE


def test_newton_n6_uses_the_clifford_route(runner):
    report = run_json(runner, ["newton", "--n", "6", "--even-split"])
    routes = {row["name"]: row["route"] for row in report["tables"]["newton"]}
    assert routes.pop("basic") == "closed-form"
    assert set(routes.values()) == {"clifford"}
