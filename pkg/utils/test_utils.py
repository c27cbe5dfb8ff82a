import json

import pytest
from pydantic import ValidationError

from utils.config import ENV_LOG_LEVEL, ENV_WORKERS, RunConfig, deep_update, load_run_config
from utils.file_utils import FileUtils
from utils.logger import setup_session_logging


def test_defaults():
    config = RunConfig()
    assert config.log_level == "WARNING"
    assert config.resolved_cache_dir == config.output_dir / "cache"


def test_layering_file_environment_flags(tmp_path, monkeypatch):
    path = tmp_path / "config.json"
    path.write_text(json.dumps({"seed": 7, "workers": 2, "log_level": "INFO"}), encoding="utf-8")
    monkeypatch.setenv(ENV_WORKERS, "3")
    monkeypatch.setenv(ENV_LOG_LEVEL, "debug")
    config = load_run_config(path, {"log_level": "ERROR", "pass_cap": None})
    assert config.seed == 7
    assert config.workers == 3
    assert config.log_level == "ERROR"
    assert config.pass_cap == RunConfig().pass_cap


def test_rewrite_limits_layer_like_other_fields(tmp_path):
    path = tmp_path / "config.json"
    path.write_text(json.dumps({"step_cap": 50, "check_every": 8}), encoding="utf-8")
    config = load_run_config(path, {"check_every": 0})
    assert config.step_cap == 50
    assert config.check_every == 0
    assert RunConfig().check_every > 0
    with pytest.raises(ValidationError):
        RunConfig(step_cap=0)


def test_unknown_keys_are_rejected(tmp_path):
    path = tmp_path / "config.json"
    path.write_text(json.dumps({"sead": 7}), encoding="utf-8")
    with pytest.raises(ValidationError):
        load_run_config(path)


def test_missing_config_file(tmp_path):
    with pytest.raises(FileNotFoundError):
        load_run_config(tmp_path / "absent.json")


def test_range_checks():
    with pytest.raises(ValidationError):
        RunConfig(workers=0)


def test_deep_update():
    assert deep_update({"a": {"b": 1, "c": 2}}, {"a": {"c": 3}}) == {"a": {"b": 1, "c": 3}}


def test_json_is_deterministic(tmp_path):
    utils = FileUtils(tmp_path)
    utils.save_json({"b": 1, "a": [1, 2]}, tmp_path / "x.json")
    first = (tmp_path / "x.json").read_bytes()
    utils.save_json({"a": [1, 2], "b": 1}, tmp_path / "x.json")
    assert (tmp_path / "x.json").read_bytes() == first
    assert utils.load_json(tmp_path / "x.json") == {"a": [1, 2], "b": 1}


def test_malformed_json_loads_as_none(tmp_path):
    (tmp_path / "bad.json").write_text("{", encoding="utf-8")
    assert FileUtils(tmp_path).load_json(tmp_path / "bad.json") is None


def test_cache_version_header(tmp_path):
    utils = FileUtils(tmp_path)
    utils.save_to_cache({"x": 1}, "k", "fmt", 1)
    assert utils.load_from_cache("k", "fmt", 1) == {"x": 1}
    assert utils.load_from_cache("k", "fmt", 2) is None
    assert utils.load_from_cache("k", "other", 1) is None
    utils.clear_cache("k")
    assert not utils.is_cached("k")


def test_text_lines_drop_comments(tmp_path):
    path = tmp_path / "rels.txt"
    path.write_text("# header\nS0 = S0  # trailing\n\n  K0 = K0\n", encoding="utf-8")
    assert FileUtils(tmp_path).read_text_lines(path) == ["S0 = S0", "K0 = K0"]


def test_session_dir(tmp_path):
    session = FileUtils(tmp_path).create_session_dir("abc")
    assert session == tmp_path / "sessions" / "abc" and session.is_dir()


def test_session_logging_writes_a_file(tmp_path):
    session_logger = setup_session_logging("s1", str(tmp_path), "INFO")
    session_logger.log_step_start("demo", n=3)
    session_logger.log_step_complete("demo", 0.5, passed=True)
    assert (tmp_path / "s1.log").exists()
