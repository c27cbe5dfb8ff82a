import json

import pytest
from click.testing import CliRunner

from cli.commands import EXIT_FALSE, EXIT_INTERNAL, EXIT_OK, EXIT_USAGE, cli, run_command
from subgroups.tables import is_table_cached, save_tables


@pytest.fixture
def invoke(tmp_path, tables):
    runner = CliRunner()
    base = ["--log-level", "ERROR", "--output-dir", str(tmp_path / "out"), "--cache-dir", str(tmp_path / "cache")]

    def _invoke(*args):
        return runner.invoke(cli, base + list(args))
    return _invoke


def test_verify_core_set(invoke):
    result = invoke("verify", "--set", "c17")
    assert result.exit_code == EXIT_OK
    assert "30/30 relations hold" in result.output


def test_verify_level_set_as_json(invoke):
    result = invoke("--format", "json", "verify", "--set", "level", "--n", "2")
    assert result.exit_code == EXIT_OK
    assert json.loads(result.stdout)["total"] == 11


def test_verify_needs_exactly_one_source(invoke, tmp_path):
    assert invoke("verify").exit_code == EXIT_USAGE
    path = tmp_path / "r.txt"
    path.write_text("S0 = S0\n", encoding="utf-8")
    assert invoke("verify", "--set", "c17", "--file", str(path)).exit_code == EXIT_USAGE


def test_failing_user_file_is_a_false_answer(invoke, tmp_path):
    path = tmp_path / "r.txt"
    path.write_text("S0 S0 S0 S0 = ε\nS0 = S1\n", encoding="utf-8")
    assert invoke("verify", "--file", str(path)).exit_code == EXIT_FALSE


def test_equiv_exit_codes(invoke):
    same = invoke("equiv", "S0", "S0 S0 S0 S0 S0")
    assert same.exit_code == EXIT_OK and "Equal" in same.output
    different = invoke("equiv", "S0", "S1")
    assert different.exit_code == EXIT_FALSE
    assert "NotEqual: entry (2, 2)" in different.output


def test_unknown_token_is_a_usage_error(invoke):
    assert invoke("eval", "S0 Q9").exit_code == EXIT_USAGE


def test_eval_json(invoke):
    result = invoke("--format", "json", "eval", "CS01 CS01")
    assert result.exit_code == EXIT_OK
    data = json.loads(result.stdout)
    assert data["cs_count"] == 2 and data["length"] == 2


def test_factor_ccz(invoke):
    result = invoke("--format", "json", "factor", "--group", "D", "CCZ")
    assert result.exit_code == EXIT_OK
    data = json.loads(result.stdout)
    assert data["member"] and data["tuple"] == {"n7": 1} and data["word"] == "CCZ"


def test_factor_non_member(invoke):
    result = invoke("factor", "--group", "P", "S0")
    assert result.exit_code == EXIT_FALSE
    assert "not in P" in result.output


def test_enumerate(invoke):
    result = invoke("--format", "json", "enumerate", "--group", "C", "--show", "3")
    assert result.exit_code == EXIT_OK
    data = json.loads(result.stdout)
    assert data["order"] == 24 and data["words"][0] == "ε" and len(data["words"]) == 3


def test_normalize_text(invoke):
    result = invoke("normalize", "K0 S1")
    assert result.exit_code == EXIT_OK
    assert "passes" in result.output


def test_step_cap_flag_bounds_the_power_pass(invoke):
    capped = invoke("--format", "json", "--step-cap", "1", "normalize", "K0 K0 K0 K0")
    assert capped.exit_code == EXIT_OK
    assert json.loads(capped.stdout)["stats"]["simplify_steps"] == 1
    free = invoke("--format", "json", "normalize", "K0 K0 K0 K0")
    assert json.loads(free.stdout)["stats"]["simplify_steps"] > 1


def test_check_every_flag(invoke):
    result = invoke("--format", "json", "--check-every", "0", "normalize", "K0 S1")
    assert result.exit_code == EXIT_OK
    assert invoke("--step-cap", "0", "normalize", "K0").exit_code == EXIT_USAGE
    assert invoke("--check-every", "-1", "normalize", "K0").exit_code == EXIT_USAGE


def test_rs_demo(invoke):
    result = invoke("--format", "json", "rs", "demo")
    assert result.exit_code == EXIT_OK
    toys = json.loads(result.stdout)["toys"]
    assert toys[0]["presented_order"] == toys[0]["oracle_order"] == 2
    assert invoke("rs", "demo").exit_code == EXIT_OK


def test_rs_run_writes_the_kernel(invoke, tmp_path):
    source = tmp_path / "z4.json"
    source.write_text(json.dumps({"generators": ["a"], "relations": [[["a", "a", "a", "a"], []]],
                                  "grading": {"a": 1}}), encoding="utf-8")
    out = tmp_path / "kernel.json"
    result = invoke("rs", "run", str(source), "--output", str(out))
    assert result.exit_code == EXIT_OK
    assert json.loads(out.read_text(encoding="utf-8"))["generators"] == ["a@1"]


def test_rs_run_without_grading_is_a_usage_error(invoke, tmp_path):
    source = tmp_path / "plain.json"
    source.write_text(json.dumps({"generators": ["a"], "relations": []}), encoding="utf-8")
    assert invoke("rs", "run", str(source)).exit_code == EXIT_USAGE


def test_selftest_subset(invoke):
    result = invoke("--format", "json", "selftest", "--quick", "--only", "upside_down")
    assert result.exit_code == EXIT_OK
    assert json.loads(result.stdout)["steps"]["upside_down"]["passed"]
    assert invoke("selftest", "--only", "nope").exit_code == EXIT_USAGE


def test_bad_config_file_is_a_usage_error(invoke, tmp_path):
    path = tmp_path / "config.json"
    path.write_text(json.dumps({"no_such_key": 1}), encoding="utf-8")
    assert invoke("--config", str(path), "eval", "S0").exit_code == EXIT_USAGE


def test_run_command_returns_exit_codes(tables, tmp_path):
    base = ["--log-level", "ERROR", "--output-dir", str(tmp_path)]
    assert run_command(base + ["equiv", "S0", "S0"]) == EXIT_OK
    assert run_command(base + ["equiv", "S0", "S1"]) == EXIT_FALSE
    assert run_command(base + ["eval", "nope"]) == EXIT_USAGE


def test_internal_exit_code_constant():
    assert EXIT_INTERNAL == 3


def test_tables_clear(invoke, tables, tmp_path):
    assert invoke("tables", "clear").exit_code == EXIT_FALSE
    save_tables(tables, tmp_path / "cache")
    result = invoke("--format", "json", "tables", "clear")
    assert result.exit_code == EXIT_OK
    assert json.loads(result.stdout)["removed"] is True
    assert not is_table_cached(tmp_path / "cache")


def test_tables_build_reports_a_replaced_cache(invoke, tables, tmp_path):
    save_tables(tables, tmp_path / "cache")
    result = invoke("--format", "json", "tables", "build")
    assert result.exit_code == EXIT_OK
    data = json.loads(result.stdout)
    assert data["replaced"] is True and data["coset_representatives"] == 105
    assert is_table_cached(tmp_path / "cache")
