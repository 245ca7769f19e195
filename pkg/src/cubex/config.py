"""Resource caps and run configuration.

Caps resolve in this order:
1. explicit overrides (``load_caps(apex_cap=...)``, the CLI ``--caps`` flag)
2. environment variables (``CUBEX_APEX_CAP`` and friends)
3. a config file: ``$CUBEX_CONFIG``, ``./cubex.json`` or ``~/.config/cubex/config.json``
4. built-in defaults
"""

from __future__ import annotations

import json
import os
from collections.abc import Iterator
from contextlib import contextmanager
from contextvars import ContextVar
from pathlib import Path

from pydantic import BaseModel, Field, ValidationError

from cubex.errors import CubexError

_TRUE_VALUES = {"1", "true", "yes", "on"}

_ENV_NAMES = {
    "apex_cap": "CUBEX_APEX_CAP",
    "cube_dim_cap": "CUBEX_CUBE_DIM_CAP",
    "section_search_cap": "CUBEX_SECTION_SEARCH_CAP",
    "contraction_search_cap": "CUBEX_CONTRACTION_SEARCH_CAP",
    "audit_instance_cap": "CUBEX_AUDIT_INSTANCE_CAP",
    "default_seed": "CUBEX_SEED",
}


class Caps(BaseModel):
    apex_cap: int = Field(1_000_000, ge=1)
    cube_dim_cap: int = Field(6, ge=0)
    section_search_cap: int = Field(100_000, ge=1)
    contraction_search_cap: int = Field(100_000, ge=1)
    audit_instance_cap: int = Field(200_000, ge=1)
    default_seed: int = 7

    model_config = {"frozen": True, "extra": "forbid"}


_active: ContextVar[Caps | None] = ContextVar("cubex_caps", default=None)


def _env_flag(name: str, default: bool = False) -> bool:
    raw = os.environ.get(name)
    if raw is None:
        return default
    return raw.strip().lower() in _TRUE_VALUES


def parallel_enabled() -> bool:
    """Whether the theorem runner may fan jobs out to worker threads."""
    return _env_flag("CUBEX_PARALLEL", default=True)


def _find_config() -> Path | None:
    env_path = os.environ.get("CUBEX_CONFIG")
    if env_path:
        p = Path(env_path)
        if p.exists():
            return p
    search_paths = [
        Path.cwd() / "cubex.json",
        Path.home() / ".config" / "cubex" / "config.json",
    ]
    for p in search_paths:
        if p.exists():
            return p
    return None


def _file_values() -> dict:
    path = _find_config()
    if not path:
        return {}
    try:
        data = json.loads(path.read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise CubexError(f"Unreadable config file {path}: {exc}") from exc
    caps = data.get("caps", {})
    if not isinstance(caps, dict):
        raise CubexError(f"Config file {path}: 'caps' must be an object")
    return caps


def _env_values() -> dict:
    values = {}
    for field, env_name in _ENV_NAMES.items():
        raw = os.environ.get(env_name, "").strip()
        if raw:
            values[field] = raw
    return values


def load_caps(**overrides) -> Caps:
    """Build caps from defaults, config file, environment and overrides."""
    values = _file_values()
    values.update(_env_values())
    values.update({k: v for k, v in overrides.items() if v is not None})
    try:
        return Caps.model_validate(values)
    except ValidationError as exc:
        raise CubexError(f"Invalid caps: {exc}") from exc


def active_caps() -> Caps:
    """Caps installed by ``use_caps``, else freshly loaded ones."""
    caps = _active.get()
    if caps is not None:
        return caps
    return load_caps()


@contextmanager
def use_caps(caps: Caps) -> Iterator[Caps]:
    token = _active.set(caps)
    try:
        yield caps
    finally:
        _active.reset(token)


def parse_caps_option(raw: str | None) -> dict:
    """Parse ``key=value[,key=value]`` into caps overrides."""
    if not raw:
        return {}
    overrides = {}
    for part in raw.split(","):
        part = part.strip()
        if not part:
            continue
        key, sep, value = part.partition("=")
        key = key.strip().replace("-", "_")
        if not sep or key not in Caps.model_fields:
            raise CubexError(f"Unknown cap setting: {part!r}")
        overrides[key] = value.strip()
    return overrides
