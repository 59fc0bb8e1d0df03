"""`bounds`, `reproduce` and `calibrate` subcommands."""

from __future__ import annotations

import argparse

from app.cli.common import (
    add_common_args,
    certificate_model,
    convention_record,
    echo_arguments,
    rational,
    resolve,
)
from app.core.config import Settings
from app.models.dto import BoundRow, CalibrationAttemptModel, ClaimRow, Report
from app.services.bounds import build_signature_four, genus_bound_table, pullback_cover
from app.services.calibration import resolve_convention
from app.services.reproduce import reproduce


def _bounds_command(args: argparse.Namespace, settings: Settings) -> Report:
    convention = resolve(args, settings).convention
    seed = build_signature_four(3, convention=convention)
    rows = [
        BoundRow(
            h=row.h,
            lower=rational(row.lower),
            upper=rational(row.upper),
            source=row.source,
            residue=rational(row.residue),
            historical=rational(row.historical),
            kodaira=rational(row.kodaira),
            g_at_one=row.g_at_one,
            witnesses=list(row.witnesses),
        )
        for row in genus_bound_table(args.h_max, seed=seed, convention=convention)
    ]
    certificates = [
        certificate_model(pullback_cover(seed, n)).model_dump(mode="json")
        for n in range(1, args.pullbacks + 1)
    ]
    return Report(
        command="bounds",
        arguments=echo_arguments(args),
        convention=convention_record(convention),
        results={
            "rows": [row.model_dump(mode="json") for row in rows],
            "certificates": certificates,
        },
    )


def _reproduce_command(args: argparse.Namespace, settings: Settings) -> Report:
    report = reproduce(preferred=args.twist_sign, h_max=args.h_max, cache_path=args.config)
    rows = [
        ClaimRow(claim=r.claim, expected=r.expected, computed=r.computed, match=r.match)
        for r in report.rows
    ]
    mismatched = [row.claim for row in rows if not row.match]
    return Report(
        command="reproduce",
        arguments=echo_arguments(args),
        convention=convention_record(report.convention),
        results={
            "claims": [row.model_dump(mode="json") for row in rows],
            "calibration": [
                CalibrationAttemptModel(
                    twist_sign=a.twist_sign, passed=a.passed, detail=a.detail
                ).model_dump(mode="json")
                for a in report.attempts
            ],
            "matched": len(rows) - len(mismatched),
            "total": len(rows),
        },
        ok=not mismatched,
        exit_status=0 if not mismatched else 1,
        error=None if not mismatched else "Mismatched claims: " + ", ".join(mismatched),
    )


def _calibrate_command(args: argparse.Namespace, settings: Settings) -> Report:
    result = resolve_convention(
        settings, args.config, preferred=args.twist_sign, refresh=True
    )
    return Report(
        command="calibrate",
        arguments=echo_arguments(args),
        convention=convention_record(result.convention),
        results={
            "attempts": [
                CalibrationAttemptModel(
                    twist_sign=a.twist_sign, passed=a.passed, detail=a.detail
                ).model_dump(mode="json")
                for a in result.attempts
            ],
        },
    )


def register(subparsers: argparse._SubParsersAction, settings: Settings) -> None:
    bounds = subparsers.add_parser("bounds", help="bounds on G_h and g_h(n) certificates")
    bounds.add_argument("--h-max", type=int, default=12)
    bounds.add_argument("--pullbacks", type=int, default=5, help="pullback certificates for n = 1..N")
    add_common_args(bounds, settings)
    bounds.set_defaults(handler=_bounds_command)

    repro = subparsers.add_parser(
        "reproduce",
        help="recompute every headline value",
        description="--twist-sign picks the sign calibration starts from.",
    )
    repro.add_argument("--h-max", type=int, default=12)
    add_common_args(repro, settings)
    repro.set_defaults(handler=_reproduce_command)

    calib = subparsers.add_parser("calibrate", help="calibrate the twist sign and write the cache")
    add_common_args(calib, settings)
    calib.set_defaults(handler=_calibrate_command)


__all__ = ["register"]
