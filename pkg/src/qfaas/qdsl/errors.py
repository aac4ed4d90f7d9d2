"""Errors raised while parsing, binding, expanding, or post-processing."""

from __future__ import annotations


class ParseError(Exception):
    """Source text does not match the grammar (or names an unknown gate)."""

    def __init__(self, line: int, column: int, message: str):
        self.line = line
        self.column = column
        self.message = message
        super().__init__(f"line {line}, col {column}: {message}")


class StaticError(Exception):
    """Grammatical source that breaks a static rule (scoping, measure, ...)."""

    def __init__(self, rule: str, line: int, column: int, message: str):
        self.rule = rule
        self.line = line
        self.column = column
        self.message = message
        super().__init__(f"{rule} at line {line}, col {column}: {message}")


class EvalError(Exception):
    """Expression or expansion failure for a concrete binding."""


class InputError(Exception):
    """Base for invocation-input problems found during pre-processing."""


class MissingParam(InputError):
    def __init__(self, param: str):
        self.param = param
        super().__init__(f"missing value for parameter '{param}' (no default declared)")


class RangeViolation(InputError):
    def __init__(self, param: str, value: int, bounds: tuple[int | None, int | None]):
        self.param = param
        self.value = value
        self.bounds = bounds
        lo, hi = bounds
        window = f"[{'-inf' if lo is None else lo}, {'inf' if hi is None else hi}]"
        super().__init__(f"parameter '{param}' = {value} outside declared range {window}")


class TypeViolation(InputError):
    pass


class PipelineTypeError(Exception):
    """A post-processing step received a value of the wrong shape."""
