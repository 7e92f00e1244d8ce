"""Tests for run configuration and the thread helpers."""
import pytest

from src.utils.config import RunConfig, load_config
from src.utils.errors import DomainError
from src.utils.parallel import ordered_map, resolve_threads


@pytest.fixture
def in_tmp(tmp_path, monkeypatch):
    monkeypatch.chdir(tmp_path)
    return tmp_path


def test_defaults(in_tmp):
    cfg = load_config(use_env=False)
    assert cfg == RunConfig()
    assert cfg.tol == 1e-10
    assert cfg.probes == 100
    assert cfg.output == "json"
    assert cfg.threads == "auto"


def test_file_round_trip(in_tmp):
    cfg = RunConfig(tol=1e-8, quad_nodes=128, probes=25, epsilon=0.05, seed=11, output="csv", threads=3)
    path = in_tmp / "run.yaml"
    cfg.to_file(path)
    assert load_config(path, use_env=False) == cfg


def test_run_section_is_read(in_tmp):
    (in_tmp / "config.yaml").write_text("run:\n  probes: 16\n  epsilon: 0.02\n")
    cfg = load_config(use_env=False)
    assert cfg.probes == 16
    assert cfg.epsilon == 0.02


def test_precedence(in_tmp, monkeypatch):
    (in_tmp / "config.yaml").write_text("run:\n  threads: 2\n  seed: 5\n")
    monkeypatch.setenv("GPFP_THREADS", "4")
    cfg = load_config()
    assert cfg.threads == 4
    assert cfg.seed == 5
    cfg = load_config(overrides={"threads": 1, "seed": None})
    assert cfg.threads == 1
    assert cfg.seed == 5


def test_env_auto(in_tmp, monkeypatch):
    monkeypatch.setenv("GPFP_THREADS", "auto")
    assert load_config().threads == "auto"


def test_bad_env_value(in_tmp, monkeypatch):
    monkeypatch.setenv("GPFP_THREADS", "lots")
    with pytest.raises(DomainError):
        load_config()


@pytest.mark.parametrize(
    "overrides",
    [
        {"tol": 0.0},
        {"quad_nodes": 4},
        {"probes": 0},
        {"epsilon": 1.5},
        {"epsilon": 0.5},
        {"epsilon": 0.7},
        {"threads": 0},
        {"output": "xml"},
    ],
)
def test_invalid_values(in_tmp, overrides):
    with pytest.raises(DomainError):
        load_config(overrides=overrides, use_env=False)


def test_unknown_keys_rejected(in_tmp):
    (in_tmp / "config.yaml").write_text("run:\n  colour: red\n")
    with pytest.raises(DomainError):
        load_config(use_env=False)


def test_missing_file(in_tmp):
    with pytest.raises(DomainError):
        load_config(in_tmp / "absent.yaml", use_env=False)


def test_rule_from_config():
    rule = RunConfig(tol=1e-8, quad_nodes=64, max_quad_nodes=1024).rule()
    assert (rule.kind, rule.nodes, rule.tol, rule.max_nodes) == ("cosine", 64, 1e-8, 1024)


def test_thread_resolution():
    assert resolve_threads(3) == 3
    assert resolve_threads("auto") >= 1
    with pytest.raises(ValueError):
        resolve_threads(0)


def test_ordered_map_keeps_order():
    items = list(range(50))
    assert ordered_map(lambda x: x * x, items, threads=4) == [x * x for x in items]
    assert ordered_map(str, [], threads=4) == []
