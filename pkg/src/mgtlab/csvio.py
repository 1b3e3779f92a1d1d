"""Deterministic CSV writing: shortest round-trip decimals, no locale."""

from __future__ import annotations

from pathlib import Path


def format_value(value) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return repr(value)
    if value is None:
        return ""
    return str(value)


def write_csv(path, header: list[str], rows) -> None:
    """Write rows of python values; floats use repr (shortest round-trip)."""
    path = Path(path)
    with open(path, "w", newline="") as fh:
        fh.write(",".join(header) + "\n")
        for row in rows:
            fh.write(",".join(format_value(v) for v in row) + "\n")
