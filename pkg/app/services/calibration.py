"""Choosing the Dehn-twist sign convention and caching the choice on disk."""

from __future__ import annotations

import json
import logging
from dataclasses import dataclass
from pathlib import Path
from typing import Dict, List, Tuple

from app.core.config import Settings, get_settings
from app.core.errors import CalibrationError, SignatureCalcError
from app.services.fibration import complement_signature, ensure_valid, signature
from app.services.loader import load_fibration
from app.services.sympl import LEFT_TO_RIGHT, Convention

logger = logging.getLogger(__name__)

# fibration -> (signature, complement signature)
CALIBRATION_TARGETS: Dict[str, Tuple[int, int]] = {
    "single_twist_nonsep": (-1, -1),
    "single_twist_sep": (-1, 0),
    "twist_square": (-2, -2),
    "twist_fourth": (-4, -4),
    "torus_chain": (-6, -6),
}


@dataclass(frozen=True)
class CalibrationAttempt:
    """Container holding the values one candidate sign produced."""

    twist_sign: int
    passed: bool
    values: Tuple[Tuple[str, int | None, int | None], ...] = ()
    detail: str = ""


@dataclass(frozen=True)
class CalibrationResult:
    convention: Convention
    attempts: Tuple[CalibrationAttempt, ...]
    source: str


def try_convention(twist_sign: int) -> CalibrationAttempt:
    """Evaluate every calibration fibration under one sign."""

    convention = Convention(twist_sign=twist_sign)
    values: List[Tuple[str, int | None, int | None]] = []
    failures: List[str] = []
    for name, (expected_total, expected_complement) in CALIBRATION_TARGETS.items():
        try:
            fibration = ensure_valid(load_fibration(name, convention=convention))
            total = signature(fibration)
            complement = complement_signature(fibration)
        except SignatureCalcError as exc:
            values.append((name, None, None))
            failures.append(f"{name}: {exc}")
            continue
        values.append((name, total, complement))
        if (total, complement) != (expected_total, expected_complement):
            failures.append(
                f"{name}: signature {total}/{complement}, "
                f"expected {expected_total}/{expected_complement}"
            )
    attempt = CalibrationAttempt(
        twist_sign=twist_sign,
        passed=not failures,
        values=tuple(values),
        detail="; ".join(failures),
    )
    logger.info(
        "Twist sign %s %s%s",
        twist_sign,
        "accepted" if attempt.passed else "rejected",
        f" ({attempt.detail})" if attempt.detail else "",
    )
    return attempt


def calibrate(preferred: int | None = None) -> CalibrationResult:
    """Evaluate both signs, preferred one first; exactly one of them must reproduce."""

    first = preferred if preferred is not None else get_settings().provisional_twist_sign
    if first not in (1, -1):
        raise CalibrationError(f"Twist sign must be 1 or -1 (got {first}).")
    attempts = tuple(try_convention(sign) for sign in (first, -first))
    passing = [attempt.twist_sign for attempt in attempts if attempt.passed]
    if len(passing) == 2:
        raise CalibrationError(
            "Both twist signs reproduce the calibration values; the targets do not fix a convention."
        )
    if not passing:
        details = " | ".join(f"sign {a.twist_sign}: {a.detail}" for a in attempts)
        raise CalibrationError(f"No twist convention reproduces the calibration values ({details})")
    convention = Convention(
        twist_sign=passing[0],
        word_order=LEFT_TO_RIGHT,
        calibrated_against=tuple(CALIBRATION_TARGETS),
    )
    return CalibrationResult(convention, attempts, "calibrated")



def _convention_to_dict(convention: Convention) -> Dict[str, object]:
    return {
        "twist_sign": convention.twist_sign,
        "word_order": convention.word_order,
        "calibrated_against": list(convention.calibrated_against),
    }


def _dict_to_convention(payload: Dict[str, object]) -> Convention:
    return Convention(
        twist_sign=int(payload["twist_sign"]),
        word_order=str(payload["word_order"]),
        calibrated_against=tuple(str(item) for item in payload.get("calibrated_against", [])),
    )


def read_cache(path: Path) -> Convention | None:
    """Cached convention, or None if the file is missing or unusable."""

    if not path.exists():
        return None
    try:
        return _dict_to_convention(json.loads(path.read_text(encoding="utf-8")))
    except Exception:  # noqa: BLE001
        logger.exception("Ignoring unreadable convention cache %s", path)
        return None


def write_cache(path: Path, convention: Convention) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    tmp_path = path.with_suffix(".tmp")
    tmp_path.write_text(
        json.dumps(_convention_to_dict(convention), indent=2, sort_keys=True),
        encoding="utf-8",
    )
    tmp_path.replace(path)


def resolve_convention(
    settings: Settings | None = None,
    path: Path | None = None,
    *,
    preferred: int | None = None,
    refresh: bool = False,
) -> CalibrationResult:
    """Convention for this run: forced sign, cached calibration, or a fresh one.

    A `preferred` sign always recalibrates, starting from that sign.
    """

    settings = settings or get_settings()
    cache_path = path or settings.convention_file
    forced = settings.twist_sign_override
    if forced is not None and preferred is None:
        return CalibrationResult(Convention(twist_sign=forced), (), "override")

    if not refresh and preferred is None:
        cached = read_cache(cache_path)
        if cached is not None and cached.calibrated_against:
            logger.debug("Using cached convention from %s", cache_path)
            return CalibrationResult(cached, (), "cache")

    logger.info("Calibrating twist convention")
    result = calibrate(preferred if preferred is not None else settings.provisional_twist_sign)
    if settings.write_convention_cache:
        write_cache(cache_path, result.convention)
    logger.info("Calibrated twist convention (sign=%s)", result.convention.twist_sign)
    return result


__all__ = [
    "CALIBRATION_TARGETS",
    "CalibrationAttempt",
    "CalibrationResult",
    "calibrate",
    "read_cache",
    "resolve_convention",
    "try_convention",
    "write_cache",
]
