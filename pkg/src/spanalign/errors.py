"""Exception types shared across the toolkit.

Exit-code mapping for the CLI lives in cli.py: usage errors exit 1,
data/parse integrity errors exit 2, scorer transport errors exit 3.
"""

from __future__ import annotations


class SpanAlignError(Exception):
    """Base class for all toolkit errors."""


class ParseError(SpanAlignError):
    """A file could not be parsed. Carries the offending line number."""

    def __init__(self, message: str, path: str | None = None, line: int | None = None):
        loc = ""
        if path is not None:
            loc += f"{path}"
        if line is not None:
            loc += f":{line}"
        super().__init__(f"{loc}: {message}" if loc else message)
        self.path = path
        self.line = line


class IntegrityError(SpanAlignError):
    """Data is structurally valid but internally inconsistent (offsets, ids, bounds)."""


class ScorerError(SpanAlignError):
    """A pair scorer is unreachable, incomplete, or returned out-of-range values."""


class UsageError(SpanAlignError):
    """Bad command-line arguments or option combinations."""
