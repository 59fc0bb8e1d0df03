"""Application configuration helpers."""

from __future__ import annotations

import os
from dataclasses import dataclass
from functools import lru_cache
from pathlib import Path

from app.core.env_loader import load_env_file

load_env_file()

_PACKAGE_DIR = Path(__file__).resolve().parents[1]


def _env_bool(key: str, default: str = "false") -> bool:
    value = os.getenv(key, default)
    return value.lower() in {"1", "true", "yes", "on"}


@dataclass(frozen=True)
class Settings:
    """Runtime configuration resolved from environment variables."""

    data_dir: Path = Path(os.getenv("SIGCALC_DATA_DIR", "data"))
    convention_file_override: str = os.getenv("SIGCALC_CONVENTION_FILE", "")
    twist_sign_setting: str = os.getenv("SIGCALC_TWIST_SIGN", "auto")
    provisional_twist_sign: int = int(
        os.getenv("SIGCALC_PROVISIONAL_TWIST_SIGN", "-1")
    )
    resource_dir: Path = Path(
        os.getenv("SIGCALC_RESOURCE_DIR", str(_PACKAGE_DIR / "resources"))
    )
    atlas_path: str = os.getenv("SIGCALC_ATLAS_PATH", "")
    log_level: str = os.getenv("SIGCALC_LOG_LEVEL", "WARNING")
    log_format: str = os.getenv(
        "SIGCALC_LOG_FORMAT",
        "%(asctime)s %(levelname)s %(name)s: %(message)s",
    )
    default_output_format: str = os.getenv("SIGCALC_FORMAT", "json")
    write_convention_cache: bool = _env_bool("SIGCALC_WRITE_CACHE", "true")

    @property
    def convention_file(self) -> Path:
        if self.convention_file_override:
            return Path(self.convention_file_override)
        return self.data_dir / "convention.json"

    @property
    def atlas_dirs(self) -> list[Path]:
        """User atlas directories first, then the shipped atlases."""

        extra = [
            Path(entry.strip())
            for entry in self.atlas_path.split(os.pathsep)
            if entry.strip()
        ]
        return [*extra, self.resource_dir / "atlases"]

    @property
    def fibration_dir(self) -> Path:
        return self.resource_dir / "fibrations"

    @property
    def pipeline_dir(self) -> Path:
        return self.resource_dir / "pipelines"

    @property
    def twist_sign_override(self) -> int | None:
        """Return the forced twist sign, or None when calibration decides."""

        value = self.twist_sign_setting.strip().lower()
        if value in {"", "auto"}:
            return None
        sign = int(value)
        if sign not in (1, -1):
            raise ValueError(
                f"SIGCALC_TWIST_SIGN must be auto, 1 or -1 (got {value!r})."
            )
        return sign


@lru_cache(maxsize=1)
def get_settings() -> Settings:
    """Return a cached Settings instance."""

    return Settings()
