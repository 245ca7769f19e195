"""Tests for cap resolution."""

import json

import pytest

from cubex import config
from cubex.config import Caps, active_caps, load_caps, parallel_enabled, parse_caps_option, use_caps
from cubex.errors import CubexError

_real_find_config = config._find_config


def test_defaults():
    caps = load_caps()
    assert caps == Caps()
    assert caps.apex_cap == 1_000_000
    assert caps.cube_dim_cap == 6
    assert caps.section_search_cap == 100_000
    assert caps.contraction_search_cap == 100_000
    assert caps.audit_instance_cap == 200_000
    assert caps.default_seed == 7


def test_env_overrides_defaults(monkeypatch):
    monkeypatch.setenv("CUBEX_APEX_CAP", "50")
    monkeypatch.setenv("CUBEX_SEED", "11")
    caps = load_caps()
    assert caps.apex_cap == 50
    assert caps.default_seed == 11


def test_config_file(tmp_path, monkeypatch):
    path = tmp_path / "cubex.json"
    path.write_text(json.dumps({"caps": {"cube_dim_cap": 4, "apex_cap": 99}}))
    monkeypatch.setattr("cubex.config._find_config", lambda: path)
    caps = load_caps()
    assert caps.cube_dim_cap == 4
    assert caps.apex_cap == 99


def test_env_takes_precedence_over_file(tmp_path, monkeypatch):
    path = tmp_path / "cubex.json"
    path.write_text(json.dumps({"caps": {"apex_cap": 99}}))
    monkeypatch.setattr("cubex.config._find_config", lambda: path)
    monkeypatch.setenv("CUBEX_APEX_CAP", "7")
    assert load_caps().apex_cap == 7


def test_explicit_overrides_win(monkeypatch):
    monkeypatch.setenv("CUBEX_APEX_CAP", "7")
    assert load_caps(apex_cap=3).apex_cap == 3


def test_config_file_found_via_env(tmp_path, monkeypatch):
    path = tmp_path / "elsewhere.json"
    path.write_text(json.dumps({"caps": {"default_seed": 42}}))
    monkeypatch.setenv("CUBEX_CONFIG", str(path))
    assert _real_find_config() == path
    monkeypatch.setattr("cubex.config._find_config", _real_find_config)
    assert load_caps().default_seed == 42


def test_unreadable_config_file(tmp_path, monkeypatch):
    path = tmp_path / "cubex.json"
    path.write_text("{not json")
    monkeypatch.setattr("cubex.config._find_config", lambda: path)
    with pytest.raises(CubexError, match="Unreadable config file"):
        load_caps()


def test_caps_must_be_an_object(tmp_path, monkeypatch):
    path = tmp_path / "cubex.json"
    path.write_text(json.dumps({"caps": [1, 2]}))
    monkeypatch.setattr("cubex.config._find_config", lambda: path)
    with pytest.raises(CubexError, match="'caps' must be an object"):
        load_caps()


def test_invalid_cap_value():
    with pytest.raises(CubexError, match="Invalid caps"):
        load_caps(apex_cap=0)


def test_parse_caps_option():
    assert parse_caps_option("apex_cap=10, cube-dim-cap=3") == {"apex_cap": "10", "cube_dim_cap": "3"}
    assert parse_caps_option(None) == {}
    assert parse_caps_option("") == {}


@pytest.mark.parametrize("raw", ["nope=1", "apex_cap", "seed=3"])
def test_parse_caps_option_rejects_unknown(raw):
    with pytest.raises(CubexError, match="Unknown cap setting"):
        parse_caps_option(raw)


def test_use_caps_is_scoped():
    inner = Caps(apex_cap=5)
    with use_caps(inner):
        assert active_caps() is inner
    assert active_caps().apex_cap == 1_000_000


def test_parallel_flag(monkeypatch):
    assert parallel_enabled() is True
    monkeypatch.setenv("CUBEX_PARALLEL", "0")
    assert parallel_enabled() is False
    monkeypatch.setenv("CUBEX_PARALLEL", "yes")
    assert parallel_enabled() is True
