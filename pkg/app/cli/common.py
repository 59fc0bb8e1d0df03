"""Shared argument groups, convention handling and report conversion for the CLI."""

from __future__ import annotations

import argparse
import json
from pathlib import Path
from typing import Any, Dict, Iterable, List

from sympy import Rational

from app.core.config import Settings
from app.models.dto import (
    BundleCertificateModel,
    CheckResult,
    ConventionRecord,
    ProvenanceModel,
    Report,
    SectionModel,
    SignatureResult,
    SingularFiberModel,
)
from app.services.bounds import BundleCertificate
from app.services.calibration import CalibrationResult, resolve_convention
from app.services.fibration import CheckResult as FibrationCheck
from app.services.fibration import FibrationSummary, ProvenanceStep, SectionData
from app.services.sympl import Convention

FORMATS = ("json", "text")


def add_common_args(parser: argparse.ArgumentParser, settings: Settings) -> None:
    parser.add_argument(
        "--format",
        choices=FORMATS,
        default=settings.default_output_format if settings.default_output_format in FORMATS else "json",
        help="output format (default: %(default)s)",
    )
    parser.add_argument(
        "--config",
        type=Path,
        default=None,
        help="convention cache file (default: SIGCALC_CONVENTION_FILE or data/convention.json)",
    )
    parser.add_argument(
        "-v",
        "--verbose",
        action="count",
        default=0,
        help="log progress to stderr (-vv for per-term detail)",
    )
    parser.add_argument(
        "--twist-sign",
        type=int,
        choices=(1, -1),
        default=None,
        help="force the twist sign instead of the calibrated one",
    )


def resolve(args: argparse.Namespace, settings: Settings) -> CalibrationResult:
    """Convention for a command; --twist-sign forces it without calibrating."""

    if args.twist_sign is not None:
        return CalibrationResult(Convention(twist_sign=args.twist_sign), (), "override")
    return resolve_convention(settings, args.config)


def convention_record(convention: Convention) -> ConventionRecord:
    return ConventionRecord(
        twist_sign=convention.twist_sign,
        word_order=convention.word_order,
        calibrated_against=list(convention.calibrated_against),
    )


def rational(value: Any) -> str:
    """Exact rationals as "p/q" (integers stay bare)."""

    return str(Rational(value))


def check_models(checks: Iterable[FibrationCheck]) -> List[CheckResult]:
    return [CheckResult(name=c.name, passed=c.passed, detail=c.detail) for c in checks]


def provenance_models(steps: Iterable[ProvenanceStep]) -> List[ProvenanceModel]:
    return [
        ProvenanceModel(operation=step.operation, inputs=list(step.inputs), note=step.note)
        for step in steps
    ]


def section_model(section: SectionData | None) -> SectionModel | None:
    if section is None:
        return None
    return SectionModel(
        exists=section.exists,
        self_intersection=section.self_intersection,
        lifts=section.lifts,
        note=section.note,
    )


def summary_model(
    summary: FibrationSummary, *, complement: int | None = None
) -> SignatureResult:
    return SignatureResult(
        name=summary.name,
        h=summary.h,
        base_genus=summary.base_genus,
        signature=summary.signature,
        complement_signature=complement,
        euler=summary.euler,
        mu_comb=list(summary.mu_comb.counts),
        fibers=[
            SingularFiberModel(
                label=fiber.label,
                homology=list(fiber.homology),
                sep_type=fiber.sep_type,
                chirality=fiber.chirality,
            )
            for fiber in summary.fibers
        ],
        section=section_model(summary.section),
        provenance=provenance_models(summary.provenance),
    )


def certificate_model(certificate: BundleCertificate) -> BundleCertificateModel:
    return BundleCertificateModel(
        id=certificate.identifier,
        h=certificate.h,
        g=certificate.g,
        sigma=certificate.sigma,
        chain=provenance_models(certificate.chain),
        assumptions=list(certificate.assumptions),
    )


def render_json(report: Report) -> str:
    return json.dumps(report.model_dump(mode="json"), indent=2, sort_keys=True, ensure_ascii=False)


def _flatten(prefix: str, value: Any, lines: List[str]) -> None:
    if isinstance(value, dict):
        for key in sorted(value):
            _flatten(f"{prefix}.{key}" if prefix else key, value[key], lines)
    elif isinstance(value, list) and value and isinstance(value[0], dict):
        for index, item in enumerate(value):
            _flatten(f"{prefix}[{index}]", item, lines)
    else:
        rendered = json.dumps(value, ensure_ascii=False) if isinstance(value, list) else value
        lines.append(f"{prefix}: {rendered}")


def render_text(report: Report) -> str:
    data: Dict[str, Any] = report.model_dump(mode="json")
    lines = [f"command: {report.command}"]
    if report.convention is not None:
        lines.append(
            f"convention: twist_sign={report.convention.twist_sign} "
            f"word_order={report.convention.word_order}"
        )
    _flatten("", data["results"], lines)
    for check in report.checks:
        status = "PASS" if check.passed else "FAIL"
        lines.append(f"[{status}] {check.name}" + (f" - {check.detail}" if check.detail else ""))
    if report.error:
        lines.append(f"error: {report.error}")
    lines.append(f"exit_status: {report.exit_status}")
    return "\n".join(lines)


_NOT_ECHOED = {"handler", "verbose", "format"}


def echo_arguments(args: argparse.Namespace) -> Dict[str, Any]:
    echoed: Dict[str, Any] = {}
    for key, value in sorted(vars(args).items()):
        if key in _NOT_ECHOED:
            continue
        echoed[key] = str(value) if isinstance(value, Path) else value
    return echoed


def render(report: Report, fmt: str) -> str:
    return render_text(report) if fmt == "text" else render_json(report)


__all__ = [
    "FORMATS",
    "add_common_args",
    "certificate_model",
    "check_models",
    "convention_record",
    "echo_arguments",
    "provenance_models",
    "rational",
    "render",
    "render_json",
    "render_text",
    "resolve",
    "section_model",
    "summary_model",
]
