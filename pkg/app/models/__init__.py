"""Report models shared by the CLI."""

from . import dto

__all__ = ["dto"]
