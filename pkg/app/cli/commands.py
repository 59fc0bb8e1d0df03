"""Subcommand registry: every `commands_*` module contributes its parsers."""

from __future__ import annotations

import argparse

from app.cli import commands_bounds, commands_fibration, commands_meyer
from app.core.config import Settings

_MODULES = (commands_meyer, commands_fibration, commands_bounds)


def build_parser(settings: Settings) -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="sigcalc",
        description=(
            "Signatures of surface bundles and Lefschetz fibrations from monodromy "
            "data, with subtraction, fiber sums and genus-function bounds."
        ),
    )
    subparsers = parser.add_subparsers(dest="command", required=True)
    for module in _MODULES:
        module.register(subparsers, settings)
    return parser


__all__ = ["build_parser"]
