"""Lightweight .env loader so SIGCALC_* settings can live next to the repo."""

from __future__ import annotations

import os
from pathlib import Path
from typing import Iterable

ENV_FILE_VARIABLE = "SIGCALC_ENV_FILE"


def _parse_line(line: str) -> tuple[str, str] | None:
    stripped = line.strip()
    if not stripped or stripped.startswith("#"):
        return None
    if stripped.startswith("export "):
        stripped = stripped[len("export ") :].strip()
    if "=" not in stripped:
        return None
    key, value = stripped.split("=", 1)
    key = key.strip()
    if not key:
        return None
    return key, _clean_value(value.strip())


def _clean_value(raw: str) -> str:
    if not raw:
        return ""
    quote_chars = {"'", '"'}
    if raw[0] in quote_chars and raw[-1] == raw[0] and len(raw) >= 2:
        return raw[1:-1]
    # unquoted values may carry a trailing comment
    if " #" in raw:
        raw = raw.split(" #", 1)[0].rstrip()
    return raw


def default_env_path() -> Path:
    override = os.getenv(ENV_FILE_VARIABLE)
    if override:
        return Path(override)
    return Path(__file__).resolve().parents[2] / ".env"


def load_env_file(path: Path | None = None) -> list[str]:
    """Populate os.environ from a .env file without overriding real values.

    Returns the keys that were actually applied.
    """

    env_path = path or default_env_path()
    if not env_path.exists():
        return []

    lines: Iterable[str]
    with env_path.open("r", encoding="utf-8") as handle:
        lines = handle.readlines()

    applied: list[str] = []
    for line in lines:
        parsed = _parse_line(line)
        if not parsed:
            continue
        key, value = parsed
        if key in os.environ:
            continue
        os.environ[key] = value
        applied.append(key)
    return applied


__all__ = ["ENV_FILE_VARIABLE", "default_env_path", "load_env_file"]
