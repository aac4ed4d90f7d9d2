"""AST node types for the function language.

All nodes are frozen dataclasses: a parsed FunctionDef is an immutable value
that request handlers may share freely.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from typing import Union

from ..circuit import GateKind

TEMPLATE_TAGS = ("qiskit", "cirq", "qsharp", "braket")


@dataclass(frozen=True)
class Num:
    value: int | float


@dataclass(frozen=True)
class Name:
    ident: str


@dataclass(frozen=True)
class Neg:
    operand: "Expr"


@dataclass(frozen=True)
class BinOp:
    op: str  # one of + - * /
    left: "Expr"
    right: "Expr"


Expr = Union[Num, Name, Neg, BinOp]


@dataclass(frozen=True)
class ParamDecl:
    """Declared integer input with optional bounds and default."""

    name: str
    min: int | None = None
    max: int | None = None
    default: int | None = None


@dataclass(frozen=True)
class GateStmt:
    kind: GateKind
    args: tuple[Expr, ...]
    angle: Expr | None
    line: int
    col: int


@dataclass(frozen=True)
class RepeatStmt:
    var: str
    lower: Expr
    upper: Expr  # half-open: var takes lower .. upper-1
    body: tuple["Stmt", ...]
    line: int
    col: int


@dataclass(frozen=True)
class MeasureStmt:
    all_qubits: bool
    targets: tuple[Expr, ...]
    line: int
    col: int


Stmt = Union[GateStmt, RepeatStmt, MeasureStmt]


@dataclass(frozen=True)
class TemplateBlock:
    qubits_expr: Expr
    statements: tuple[Stmt, ...]


class PostKind(str, Enum):
    TOP = "top"
    TO_INT = "to_int"
    MOD = "mod"
    HISTOGRAM = "histogram"
    IDENTITY = "identity"


@dataclass(frozen=True)
class PostStep:
    kind: PostKind
    divisor: Expr | None = None  # MOD only


@dataclass(frozen=True)
class FunctionDef:
    """A parsed function: params, circuit template, post pipeline."""

    name: str
    template: str  # SDK-flavor tag; informational only
    params: tuple[ParamDecl, ...]
    circuit_template: TemplateBlock
    post_pipeline: tuple[PostStep, ...] = field(default=(PostStep(PostKind.IDENTITY),))
