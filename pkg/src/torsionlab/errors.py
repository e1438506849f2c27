"""Shared exception types.

``ConfigError`` carries a stable diagnostic code so callers (and the CLI,
which maps it to exit status 1) can distinguish failure classes without
string matching.  ``InvariantViolation`` marks a breached internal
guarantee, mapped to exit status 2 by the CLI.
"""

from __future__ import annotations


class ConfigError(Exception):
    """A configuration file failed to parse or validate."""

    def __init__(self, code: str, message: str, line: int | None = None,
                 column: int | None = None):
        self.code = code
        self.line = line
        self.column = column
        where = ""
        if line is not None:
            where = f" (line {line})" if column is None else f" (line {line}, column {column})"
        elif column is not None:
            where = f" (column {column})"
        super().__init__(f"[{code}] {message}{where}")


class InvariantViolation(RuntimeError):
    """An internal consistency guarantee was violated."""
