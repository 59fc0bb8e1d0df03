"""Command-line interface for the signature calculator."""
