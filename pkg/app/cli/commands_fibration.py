"""`sig`, `verify`, `subtract` and `fibersum` subcommands."""

from __future__ import annotations

import argparse
from typing import Dict

from app.cli.common import (
    add_common_args,
    certificate_model,
    check_models,
    convention_record,
    echo_arguments,
    resolve,
    summary_model,
)
from app.core.config import Settings
from app.core.errors import InputParseError
from app.models.dto import CheckResult, Report
from app.services.atlas import check_constraints, load_atlas
from app.services.bounds import certify
from app.services.fibration import (
    FibrationSummary,
    ProvenanceStep,
    complement_signature,
    euler_characteristic,
    fiber_sum,
    local_signature,
    parse_groups,
    subtract,
    summarize,
    trivial_bundle,
    validate,
)
from app.services.loader import load_fibration, run_pipeline
from app.services.sympl import Convention


def _failed_report(command: str, args: argparse.Namespace, convention: Convention, checks) -> Report:
    failed = [check for check in checks if not check.passed]
    kind = "RelatorViolation" if any(check.name == "relator" for check in failed) else "ConstraintViolation"
    return Report(
        command=command,
        arguments=echo_arguments(args),
        convention=convention_record(convention),
        checks=check_models(checks),
        ok=False,
        exit_status=1,
        error=f"{kind}: failed checks: "
        + "; ".join(f"{check.name} ({check.detail})" if check.detail else check.name for check in failed),
    )


def _sig_command(args: argparse.Namespace, settings: Settings) -> Report:
    convention = resolve(args, settings).convention
    fibration = load_fibration(args.file, genus=args.genus, convention=convention)
    checks = validate(fibration)
    if not all(check.passed for check in checks):
        return _failed_report("sig", args, convention, checks)

    complement = complement_signature(fibration)
    total = complement + sum(local_signature(letter) for letter in fibration.factorization.letters)
    summary = FibrationSummary(
        name=fibration.name,
        h=fibration.h,
        base_genus=fibration.base_genus,
        signature=total,
        fibers=fibration.factorization.letters,
        section=fibration.section,
        provenance=(ProvenanceStep("construction", (fibration.name,), f"signature {total}"),),
    )
    model = summary_model(summary, complement=complement)
    model.euler = euler_characteristic(fibration)
    results = model.model_dump(mode="json")
    results["boundary_count"] = fibration.boundary_count
    return Report(
        command="sig",
        arguments=echo_arguments(args),
        convention=convention_record(convention),
        results=results,
        checks=check_models(checks),
    )


def _verify_command(args: argparse.Namespace, settings: Settings) -> Report:
    convention = resolve(args, settings).convention
    if args.atlas:
        atlas = load_atlas(args.atlas, genus=args.genus, convention=convention)
        checks = [
            CheckResult(name=r.constraint.describe(), passed=r.passed, detail=r.detail)
            for r in check_constraints(atlas, convention=convention)
        ]
        subject = atlas.name
    elif args.file:
        fibration = load_fibration(args.file, genus=args.genus, convention=convention)
        checks = check_models(validate(fibration))
        subject = fibration.name
    else:
        raise InputParseError("verify needs a fibration file or --atlas NAME.")
    ok = all(check.passed for check in checks)
    return Report(
        command="verify",
        arguments=echo_arguments(args),
        convention=convention_record(convention),
        results={"subject": subject, "passed": sum(c.passed for c in checks), "total": len(checks)},
        checks=checks,
        ok=ok,
        exit_status=0 if ok else 1,
        error=None if ok else "Failed checks: " + ", ".join(c.name for c in checks if not c.passed),
    )


def _bundle_results(summary: FibrationSummary) -> Dict[str, object]:
    results: Dict[str, object] = {"summary": summary_model(summary).model_dump(mode="json")}
    if summary.is_bundle:
        results["certificate"] = certificate_model(certify(summary)).model_dump(mode="json")
    return results


def _subtract_command(args: argparse.Namespace, settings: Settings) -> Report:
    convention = resolve(args, settings).convention
    if args.pipeline:
        summary = run_pipeline(args.pipeline, genus=args.genus, convention=convention)
    else:
        if len(args.files) != 2 or not args.groups:
            raise InputParseError("subtract needs two fibration files and --groups (or --pipeline).")
        first = load_fibration(args.files[0], genus=args.genus, convention=convention)
        second = load_fibration(args.files[1], genus=args.genus, convention=convention)
        summary = subtract(
            first,
            second,
            parse_groups(args.groups),
            assert_isomorphic=args.assert_isomorphic,
            assert_coinciding_lifts=args.assert_coinciding_lifts,
        )
    return Report(
        command="subtract",
        arguments=echo_arguments(args),
        convention=convention_record(convention),
        results=_bundle_results(summary),
    )


def _load_operand(token: str, args: argparse.Namespace, convention: Convention) -> FibrationSummary:
    """`product:H:G`, `pipeline:NAME` or a fibration file."""

    kind, _, rest = token.partition(":")
    if kind == "product" and rest:
        try:
            h, g = (int(part) for part in rest.split(":"))
        except ValueError as exc:
            raise InputParseError(f"product operand reads product:H:G (got {token!r}).") from exc
        return trivial_bundle(h, g)
    if kind == "pipeline" and rest:
        return run_pipeline(rest, genus=args.genus, convention=convention)
    return summarize(load_fibration(token, genus=args.genus, convention=convention))


def _fibersum_command(args: argparse.Namespace, settings: Settings) -> Report:
    convention = resolve(args, settings).convention
    first = _load_operand(args.first, args, convention)
    second = _load_operand(args.second, args, convention)
    summary = fiber_sum(first, second)
    return Report(
        command="fibersum",
        arguments=echo_arguments(args),
        convention=convention_record(convention),
        results=_bundle_results(summary),
    )


def register(subparsers: argparse._SubParsersAction, settings: Settings) -> None:
    sig = subparsers.add_parser("sig", help="signature, Euler characteristic and mu_comb of a fibration")
    sig.add_argument("file", help="fibration file or shipped fibration name")
    sig.add_argument("--genus", type=int, default=None, help="stabilize to this fiber genus")
    add_common_args(sig, settings)
    sig.set_defaults(handler=_sig_command)

    verify = subparsers.add_parser("verify", help="run relator and atlas checks")
    verify.add_argument("file", nargs="?", default=None)
    verify.add_argument("--atlas", default=None, help="check an atlas instead of a fibration")
    verify.add_argument("--genus", type=int, default=None)
    add_common_args(verify, settings)
    verify.set_defaults(handler=_verify_command)

    sub = subparsers.add_parser("subtract", help="subtract one fibration from another")
    sub.add_argument("files", nargs="*", help="minuend and subtrahend fibration files")
    sub.add_argument("--groups", default=None, help="grouping such as [8,9]:[0,1];[2]:[0]")
    sub.add_argument("--pipeline", default=None, help="run a pipeline file instead")
    sub.add_argument("--genus", type=int, default=None)
    sub.add_argument("--assert-isomorphic", action="store_true")
    sub.add_argument("--assert-coinciding-lifts", action="store_true")
    add_common_args(sub, settings)
    sub.set_defaults(handler=_subtract_command)

    fsum = subparsers.add_parser("fibersum", help="fiber sum of two bundles along square-zero sections")
    fsum.add_argument("first", help="fibration file, product:H:G or pipeline:NAME")
    fsum.add_argument("second", help="fibration file, product:H:G or pipeline:NAME")
    fsum.add_argument("--genus", type=int, default=None)
    add_common_args(fsum, settings)
    fsum.set_defaults(handler=_fibersum_command)


__all__ = ["register"]
