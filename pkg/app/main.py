"""CLI entrypoint: `python -m app.main <subcommand> ...`."""

from __future__ import annotations

import logging
import sys
from typing import Sequence

from app.cli.commands import build_parser
from app.cli.common import render
from app.core.config import get_settings
from app.core.errors import SignatureCalcError
from app.models.dto import Report

logger = logging.getLogger(__name__)


def _configure_logging(verbose: int, default_level: str, log_format: str) -> None:
    if verbose >= 2:
        level = logging.DEBUG
    elif verbose == 1:
        level = logging.INFO
    else:
        level = getattr(logging, default_level.upper(), logging.WARNING)
    logging.basicConfig(level=level, format=log_format, stream=sys.stderr)
    logging.getLogger().setLevel(level)


def main(argv: Sequence[str] | None = None) -> int:
    """Run one subcommand, print its report on stdout, return the exit code."""

    settings = get_settings()
    parser = build_parser(settings)
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        # argparse usage errors are parse errors
        return 0 if exc.code == 0 else 2
    _configure_logging(args.verbose, settings.log_level, settings.log_format)

    try:
        report = args.handler(args, settings)
    except SignatureCalcError as exc:
        logger.info("%s failed: %s", args.command, exc)
        report = Report(
            command=args.command,
            ok=False,
            exit_status=exc.exit_code,
            error=f"{type(exc).__name__}: {exc}",
        )
    except Exception as exc:  # noqa: BLE001
        logger.exception("Unexpected failure in %s", args.command)
        report = Report(
            command=args.command,
            ok=False,
            exit_status=1,
            error=f"{type(exc).__name__}: {exc}",
        )

    print(render(report, args.format))
    return report.exit_status


if __name__ == "__main__":
    sys.exit(main())
