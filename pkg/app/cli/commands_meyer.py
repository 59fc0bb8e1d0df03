"""`tau` and `eval` subcommands."""

from __future__ import annotations

import argparse
from typing import Dict, List

from app.cli.common import add_common_args, convention_record, echo_arguments, resolve
from app.core.config import Settings
from app.core.errors import DimensionMismatch, InputParseError
from app.models.dto import Report, TauResult, WordResult
from app.services.atlas import load_atlas
from app.services.meyer import kernel_space, tau
from app.services.sympl import ensure_symplectic, format_matrix, is_symplectic, parse_matrix
from app.services.words import Word, evaluate, evaluate_many, parse_word, print_word


def parse_defs(entries: List[str] | None) -> Dict[str, Word]:
    """`--def NAME=WORD` options into a definition map."""

    defs: Dict[str, Word] = {}
    for entry in entries or []:
        name, sep, body = entry.partition("=")
        if not sep or not name.strip():
            raise InputParseError(f"--def expects NAME=WORD (got {entry!r}).")
        defs[name.strip()] = parse_word(body, source=f"--def {name.strip()}")
    return defs


def _tau_command(args: argparse.Namespace, settings: Settings) -> Report:
    resolved = resolve(args, settings)
    convention = resolved.convention
    if args.atlas:
        atlas = load_atlas(args.atlas, genus=args.genus, convention=convention)
        a, b = evaluate_many(
            [parse_word(args.a, source="--a"), parse_word(args.b, source="--b")],
            atlas,
            parse_defs(args.define),
            convention=convention,
        )
    else:
        a = ensure_symplectic(parse_matrix(args.a, h=args.h), label="A")
        b = ensure_symplectic(parse_matrix(args.b, h=args.h), label="B")
        if a.shape != b.shape:
            raise DimensionMismatch(f"A is {a.shape[0]}x{a.shape[0]} but B is {b.shape[0]}x{b.shape[0]}.")
    result = TauResult(h=a.shape[0] // 2, tau=tau(a, b), kernel_dim=len(kernel_space(a, b)))
    return Report(
        command="tau",
        arguments=echo_arguments(args),
        convention=convention_record(convention),
        results=result.model_dump(mode="json"),
    )


def _eval_command(args: argparse.Namespace, settings: Settings) -> Report:
    convention = resolve(args, settings).convention
    atlas = load_atlas(args.atlas, genus=args.genus, convention=convention)
    word = parse_word(args.word, source="--word")
    matrix = evaluate(word, atlas, parse_defs(args.define), convention=convention)
    result = WordResult(
        word=print_word(word),
        atlas=atlas.name,
        h=atlas.h,
        matrix=format_matrix(matrix),
        symplectic=is_symplectic(matrix),
    )
    return Report(
        command="eval",
        arguments=echo_arguments(args),
        convention=convention_record(convention),
        results=result.model_dump(mode="json"),
    )


def register(subparsers: argparse._SubParsersAction, settings: Settings) -> None:
    tau_parser = subparsers.add_parser(
        "tau",
        help="Meyer cocycle of two symplectic matrices or two words",
        description="Matrices use rows separated by ';' and entries by ','; I is the identity.",
    )
    tau_parser.add_argument("--h", type=int, default=None, help="fiber genus for matrix input")
    tau_parser.add_argument("--a", required=True, help="first matrix (or word with --atlas)")
    tau_parser.add_argument("--b", required=True, help="second matrix (or word with --atlas)")
    tau_parser.add_argument("--atlas", default=None, help="read --a/--b as words over this atlas")
    tau_parser.add_argument("--genus", type=int, default=None, help="stabilize the atlas to this genus")
    tau_parser.add_argument("--def", dest="define", action="append", metavar="NAME=WORD")
    add_common_args(tau_parser, settings)
    tau_parser.set_defaults(handler=_tau_command)

    eval_parser = subparsers.add_parser("eval", help="evaluate a word to its symplectic matrix")
    eval_parser.add_argument("--atlas", required=True)
    eval_parser.add_argument("--word", required=True)
    eval_parser.add_argument("--genus", type=int, default=None)
    eval_parser.add_argument("--def", dest="define", action="append", metavar="NAME=WORD")
    add_common_args(eval_parser, settings)
    eval_parser.set_defaults(handler=_eval_command)


__all__ = ["parse_defs", "register"]
