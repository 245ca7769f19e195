"""Shared fixtures."""

from pathlib import Path

import pytest

from cubex import dsl
from cubex.classes import extension_class
from cubex.config import load_caps, use_caps

FIXTURES = Path(__file__).parent / "fixtures"


@pytest.fixture(autouse=True)
def _isolated_config(monkeypatch):
    """Tests never read a developer's cubex.json or CUBEX_* variables."""
    for name in (
        "CUBEX_CONFIG",
        "CUBEX_APEX_CAP",
        "CUBEX_CUBE_DIM_CAP",
        "CUBEX_SECTION_SEARCH_CAP",
        "CUBEX_CONTRACTION_SEARCH_CAP",
        "CUBEX_AUDIT_INSTANCE_CAP",
        "CUBEX_SEED",
        "CUBEX_PARALLEL",
    ):
        monkeypatch.delenv(name, raising=False)
    monkeypatch.setattr("cubex.config._find_config", lambda: None)


@pytest.fixture
def caps():
    caps = load_caps()
    with use_caps(caps):
        yield caps


@pytest.fixture
def surj():
    return extension_class("surjections")


@pytest.fixture
def load_fixture():
    def _load(name: str):
        return dsl.load(FIXTURES / name)
    return _load
