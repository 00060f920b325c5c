"""Exception hierarchy shared by the library and the CLI."""

from __future__ import annotations


class MlslError(Exception):
    """Base class for all library errors."""


class GraphError(MlslError, ValueError):
    """Unknown node, bad endpoint, or otherwise invalid graph input."""


class ShapeError(MlslError, ValueError):
    """Width, depth or dimension mismatch between data, trees and learners."""


class ParseError(MlslError, ValueError):
    """A file could not be parsed. ``line`` is 1-based when known."""

    def __init__(self, message: str, path: str | None = None, line: int | None = None) -> None:
        where = ""
        if path is not None:
            where = f"{path}"
            if line is not None:
                where += f":{line}"
            where += ": "
        elif line is not None:
            where = f"line {line}: "
        super().__init__(f"{where}{message}")
        self.path = path
        self.line = line


class NumericError(MlslError, ArithmeticError):
    """Non-finite values where finite ones are required."""
