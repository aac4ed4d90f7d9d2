"""Binding inputs, expanding templates into circuits, and post-processing.

All three stages are pure: the same (definition, bindings) pair always yields
the same circuit, and post-processing never touches anything beyond the
counts and bindings it is handed.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Any, Mapping

from ..circuit import Circuit, GateOp, validate
from .ast import (
    BinOp,
    Expr,
    FunctionDef,
    GateStmt,
    MeasureStmt,
    Name,
    Neg,
    Num,
    PostKind,
    PostStep,
    RepeatStmt,
    Stmt,
)
from .errors import (
    EvalError,
    MissingParam,
    PipelineTypeError,
    RangeViolation,
    TypeViolation,
)

MAX_EXPANDED_OPS = 100_000


def eval_expr(expr: Expr, env: Mapping[str, int]) -> int | float:
    if isinstance(expr, Num):
        return expr.value
    if isinstance(expr, Name):
        try:
            return env[expr.ident]
        except KeyError:
            raise EvalError(f"unbound identifier '{expr.ident}'") from None
    if isinstance(expr, Neg):
        return -eval_expr(expr.operand, env)
    left = eval_expr(expr.left, env)
    right = eval_expr(expr.right, env)
    if expr.op == "+":
        return left + right
    if expr.op == "-":
        return left - right
    if expr.op == "*":
        return left * right
    if right == 0:
        raise EvalError("division by zero")
    return left / right


def _as_int(value: int | float, what: str) -> int:
    if isinstance(value, int):
        return value
    if isinstance(value, float) and value.is_integer():
        return int(value)
    raise EvalError(f"{what} must be an integer, got {value}")


def _coerce_int(value: Any, param: str) -> int:
    """Ints pass through; textual integers are coerced; anything else errors."""
    if isinstance(value, bool):
        raise TypeViolation(f"parameter '{param}' expects an integer, got a boolean")
    if isinstance(value, int):
        return value
    if isinstance(value, str):
        try:
            return int(value.strip(), 10)
        except ValueError:
            raise TypeViolation(f"parameter '{param}' expects an integer, got {value!r}") from None
    raise TypeViolation(
        f"parameter '{param}' expects an integer, got {type(value).__name__}"
    )


def preprocess(fdef: FunctionDef, raw_input: Any, partial: bool = False) -> dict[str, int]:
    """Bind invocation input to the declared parameters.

    A scalar binds to the sole parameter; a mapping binds by name.  Missing
    values fall back to declared defaults; every binding must satisfy the
    declared range.  With ``partial`` (used when only the post pipeline will
    run), parameters that have neither a value nor a default are simply
    omitted instead of raising MissingParam.
    """
    if raw_input is None:
        values: dict[str, Any] = {}
    elif isinstance(raw_input, Mapping):
        unknown = set(raw_input) - {p.name for p in fdef.params}
        if unknown:
            raise TypeViolation(f"unknown parameter(s): {', '.join(sorted(unknown))}")
        values = dict(raw_input)
    else:
        if len(fdef.params) != 1:
            raise TypeViolation(
                "scalar input requires exactly one declared parameter "
                f"(function declares {len(fdef.params)})"
            )
        values = {fdef.params[0].name: raw_input}

    bindings: dict[str, int] = {}
    for decl in fdef.params:
        if decl.name in values:
            bound = _coerce_int(values[decl.name], decl.name)
        elif decl.default is not None:
            bound = decl.default
        elif partial:
            continue
        else:
            raise MissingParam(decl.name)
        if (decl.min is not None and bound < decl.min) or (
            decl.max is not None and bound > decl.max
        ):
            raise RangeViolation(decl.name, bound, (decl.min, decl.max))
        bindings[decl.name] = bound
    return bindings


def instantiate(fdef: FunctionDef, bindings: Mapping[str, int]) -> Circuit:
    """Expand the template for concrete bindings into a validated Circuit."""
    env = dict(bindings)
    width = _as_int(eval_expr(fdef.circuit_template.qubits_expr, env), "qubit count")
    if width < 1:
        raise EvalError(f"qubit count must be >= 1, got {width}")

    ops: list[GateOp] = []
    measured: frozenset[int] | None = None

    def emit(statements: tuple[Stmt, ...], scope: dict[str, int]) -> None:
        nonlocal measured
        for stmt in statements:
            if isinstance(stmt, GateStmt):
                if len(ops) >= MAX_EXPANDED_OPS:
                    raise EvalError(f"expanded circuit exceeds {MAX_EXPANDED_OPS} gates")
                targets = tuple(
                    _as_int(eval_expr(e, scope), "qubit index") for e in stmt.args
                )
                angle = None
                if stmt.angle is not None:
                    angle = float(eval_expr(stmt.angle, scope))
                    if not math.isfinite(angle):
                        raise EvalError(f"angle must be finite, got {angle}")
                ops.append(GateOp(stmt.kind, targets, angle))
            elif isinstance(stmt, RepeatStmt):
                lower = _as_int(eval_expr(stmt.lower, scope), "loop bound")
                upper = _as_int(eval_expr(stmt.upper, scope), "loop bound")
                if lower > upper:
                    raise EvalError(
                        f"loop range {lower}..{upper} is descending; bounds must satisfy a <= b"
                    )
                for value in range(lower, upper):
                    emit(stmt.body, {**scope, stmt.var: value})
            else:  # MeasureStmt
                if stmt.all_qubits:
                    measured = frozenset(range(width))
                else:
                    measured = frozenset(
                        _as_int(eval_expr(e, scope), "measured qubit") for e in stmt.targets
                    )

    emit(fdef.circuit_template.statements, env)
    assert measured is not None  # static checks guarantee one measure

    circuit = Circuit(width, tuple(ops), measured)
    report = validate(circuit)
    if not report.ok:
        raise EvalError(f"instantiated circuit is invalid: {report.summary()}")
    return circuit


@dataclass
class PostResult:
    data: Any
    details: dict[str, Any]


def _check_counts(counts: Mapping[str, int]) -> None:
    if not counts:
        raise PipelineTypeError("counts must be nonempty")
    lengths = {len(k) for k in counts}
    if len(lengths) != 1:
        raise PipelineTypeError("all outcome bitstrings must have the same length")
    for key, value in counts.items():
        if set(key) - {"0", "1"}:
            raise PipelineTypeError(f"outcome {key!r} is not a bitstring")
        if isinstance(value, bool) or not isinstance(value, int) or value < 0:
            raise PipelineTypeError(f"count for {key!r} must be a nonnegative integer")


def _is_counts(value: Any) -> bool:
    return isinstance(value, Mapping) and all(
        isinstance(v, int) and not isinstance(v, bool) for v in value.values()
    )


def postprocess(
    counts: Mapping[str, int],
    pipeline: tuple[PostStep, ...],
    bindings: Mapping[str, int] | None = None,
) -> PostResult:
    """Apply the post pipeline left to right, starting from the raw counts.

    ``top`` picks the most frequent bitstring (ties break to the
    lexicographically smallest); ``to_int`` reads a bitstring with qubit 0 as
    the least significant bit; ``mod`` reduces an integer; ``histogram``
    normalizes counts to frequencies; ``identity`` passes through.  The raw
    counts always ride along in the details.
    """
    _check_counts(counts)
    env = dict(bindings or {})
    shots = sum(counts.values())
    value: Any = dict(counts)

    for step in pipeline:
        if step.kind is PostKind.IDENTITY:
            continue
        if step.kind is PostKind.TOP:
            if not isinstance(value, Mapping) or not value:
                raise PipelineTypeError("top expects a nonempty counts map")
            best = max(value.values())
            value = min(k for k, v in value.items() if v == best)
        elif step.kind is PostKind.TO_INT:
            if not isinstance(value, str):
                raise PipelineTypeError(
                    f"to_int expects a bitstring, got {type(value).__name__}"
                )
            if set(value) - {"0", "1"}:
                raise PipelineTypeError(f"to_int expects a bitstring, got {value!r}")
            value = int(value, 2)
        elif step.kind is PostKind.MOD:
            if isinstance(value, bool) or not isinstance(value, int):
                raise PipelineTypeError(
                    f"mod expects an integer, got {type(value).__name__}"
                )
            divisor = _as_int(eval_expr(step.divisor, env), "mod divisor")
            if divisor < 1:
                raise EvalError(f"mod divisor must be >= 1, got {divisor}")
            value = value % divisor
        elif step.kind is PostKind.HISTOGRAM:
            if not _is_counts(value) or not value:
                raise PipelineTypeError("histogram expects a counts map")
            total = sum(value.values())
            if total <= 0:
                raise PipelineTypeError("histogram expects at least one recorded shot")
            value = {k: v / total for k, v in value.items()}
        else:  # pragma: no cover - enum is closed
            raise PipelineTypeError(f"unsupported step {step.kind}")

    return PostResult(data=value, details={"counts": dict(counts), "shots": shots})
