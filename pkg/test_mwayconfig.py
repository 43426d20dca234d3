from dataclasses import fields
from pathlib import Path

import pytest
import yaml

from mwayconfig import EngineConfig, ENV_MAX_STATES, check_params
from mwaymisc import human_count, stable_digest


def test_defaults(monkeypatch):
    monkeypatch.delenv(ENV_MAX_STATES, raising=False)
    config = EngineConfig.from_yaml_file(None)
    assert config == EngineConfig()
    assert config.max_states == 200000
    assert config.interreduce


def test_shipped_yaml_matches_the_defaults(monkeypatch):
    monkeypatch.delenv(ENV_MAX_STATES, raising=False)
    config = EngineConfig.from_yaml_file(str(Path(__file__).parent / "multiway.yaml"))
    assert config == EngineConfig()


def test_shipped_yaml_sets_every_field():
    data = yaml.safe_load((Path(__file__).parent / "multiway.yaml").read_text())
    assert set(data["engine"]) == {f.name for f in fields(EngineConfig)} - {"palette"}
    assert set(data["palette"]) == set(EngineConfig().palette)


def test_precedence(tmp_path, monkeypatch):
    yaml_file = tmp_path / "engine.yaml"
    yaml_file.write_text("engine:\n  max_states: 10\n  workers: 2\npalette:\n  causal: red\n")
    monkeypatch.delenv(ENV_MAX_STATES, raising=False)

    config = EngineConfig.from_yaml_file(str(yaml_file))
    assert (config.max_states, config.workers) == (10, 2)
    assert config.color('causal') == 'red'

    monkeypatch.setenv(ENV_MAX_STATES, "20")
    assert EngineConfig.from_yaml_file(str(yaml_file)).max_states == 20

    config = EngineConfig.from_yaml_file(str(yaml_file), param_overrides={'max_states': 30, 'workers': None})
    assert (config.max_states, config.workers) == (30, 2)


def test_bad_configurations(tmp_path, monkeypatch):
    monkeypatch.delenv(ENV_MAX_STATES, raising=False)
    with pytest.raises(FileNotFoundError):
        EngineConfig.from_yaml_file(str(tmp_path / "missing.yaml"))

    broken = tmp_path / "broken.yaml"
    broken.write_text("engine: [1, 2\n")
    with pytest.raises(ValueError):
        EngineConfig.from_yaml_file(str(broken))

    not_bool = tmp_path / "not_bool.yaml"
    not_bool.write_text("engine:\n  interreduce: maybe\n")
    with pytest.raises(ValueError):
        EngineConfig.from_yaml_file(str(not_bool))

    with pytest.raises(ValueError):
        EngineConfig(workers=0)

    monkeypatch.setenv(ENV_MAX_STATES, "lots")
    with pytest.raises(ValueError):
        EngineConfig.from_yaml_file(None)


def test_unexpected_fields_are_dropped(tmp_path, monkeypatch):
    monkeypatch.delenv(ENV_MAX_STATES, raising=False)
    params = {'max_states': 5, 'colour': 'red'}
    assert not check_params(params, required=[], optional=['max_states'])
    assert params == {'max_states': 5}
    with pytest.raises(ValueError):
        check_params({}, required=['max_states'], optional=[])

    yaml_file = tmp_path / "extra.yaml"
    yaml_file.write_text("engine:\n  max_states: 7\n  frobnicate: 1\n  max_paths: 3\n")
    config = EngineConfig.from_yaml_file(str(yaml_file))
    assert config.max_states == 7
    assert not hasattr(config, "max_paths")


def test_level_colors():
    config = EngineConfig()
    assert config.color('evolution') == 'gray'
    assert config.color('evolution', 1) == 'purple'
    assert config.color('evolution', 7) == 'blue'
    assert config.color('unknown') == 'gray'


# ----------------------------------------------------------------------------
def test_misc_helpers():
    assert human_count(999) == "999"
    assert human_count(1500) == "1.5k"
    assert stable_digest(b"AA", "A->AB") == stable_digest(b"AA", "A->AB")
    assert stable_digest(b"AA", "A->AB") != stable_digest(b"AB", "A->AB")
