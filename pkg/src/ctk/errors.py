"""Error hierarchy shared by the whole toolchain.

The CLI maps subclasses onto exit codes: parse/validation problems are 2,
state-space cap 3, solver non-convergence 4, missing role annotations 5.
"""

from __future__ import annotations


class CtkError(Exception):
    """Base class for all errors raised by this package."""


class ParseError(CtkError):
    """Syntax error with source position."""

    def __init__(self, message: str, line: int, column: int) -> None:
        super().__init__(f"{message} (line {line}, column {column})")
        self.message = message
        self.line = line
        self.column = column


class ModelError(CtkError):
    """Semantic error in a model, composition, or annotation block."""


class BuildError(CtkError):
    """Error raised while constructing the explicit CTMC."""


class StateCapError(BuildError):
    """Reachable state space exceeded the configured cap."""


class CheckError(CtkError):
    """Ill-posed property: unknown variable, bad filter cardinality, ..."""


class SolverError(CtkError):
    """Numerical solver failed to converge within its iteration cap."""


class MissingAnnotationError(ModelError):
    """A shared label required by classification carries no role annotation."""
