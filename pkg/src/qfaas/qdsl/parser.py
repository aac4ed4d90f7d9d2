"""Tokenizer, recursive-descent parser, and static checks.

Parsing is two-phase: grammar errors raise :class:`ParseError` with an exact
line/column, then a static pass enforces the non-grammatical rules
(declaration scoping, measure placement, parameter bounds, loop nesting) and
raises :class:`StaticError` naming the broken rule.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import pi as _PI

from ..circuit import GateKind, ROTATION_GATES, TWO_QUBIT_GATES, arity
from .ast import (
    BinOp,
    Expr,
    FunctionDef,
    GateStmt,
    MeasureStmt,
    Name,
    Neg,
    Num,
    ParamDecl,
    PostKind,
    PostStep,
    RepeatStmt,
    Stmt,
    TemplateBlock,
    TEMPLATE_TAGS,
)
from .errors import ParseError, StaticError

MAX_LOOP_NESTING = 4

_GATES = {k.value: k for k in GateKind}
_KEYWORDS = {
    "fn", "template", "param", "int", "min", "max", "default",
    "circuit", "qubits", "repeat", "in", "measure", "all", "post",
    "pi", "mod", "top", "to_int", "histogram", "identity",
}
_RESERVED = _KEYWORDS | set(_GATES)

_PUNCT_TWO = {".."}
_PUNCT_ONE = set("{}():=|,;+-*/")


@dataclass(frozen=True)
class _Token:
    type: str  # ident | int | float | punct | newline | eof
    value: str
    line: int
    col: int


def _tokenize(source: str) -> list[_Token]:
    toks: list[_Token] = []
    line, col, i = 1, 1, 0
    text = source

    def err(msg: str) -> ParseError:
        return ParseError(line, col, msg)

    while i < len(text):
        ch = text[i]
        if ch == "\n":
            toks.append(_Token("newline", "\n", line, col))
            i += 1
            line += 1
            col = 1
            continue
        if ch in " \t\r":
            i += 1
            col += 1
            continue
        if ch == "#":
            while i < len(text) and text[i] != "\n":
                i += 1
            continue
        if ch.isdigit():
            start, start_col = i, col
            while i < len(text) and text[i].isdigit():
                i += 1
            is_float = False
            if i + 1 < len(text) and text[i] == "." and text[i + 1].isdigit():
                is_float = True
                i += 1
                while i < len(text) and text[i].isdigit():
                    i += 1
            value = text[start:i]
            col += i - start
            toks.append(_Token("float" if is_float else "int", value, line, start_col))
            continue
        if ch.isalpha() or ch == "_":
            start, start_col = i, col
            while i < len(text) and (text[i].isalnum() or text[i] == "_"):
                i += 1
            value = text[start:i]
            col += i - start
            toks.append(_Token("ident", value, line, start_col))
            continue
        if text[i : i + 2] in _PUNCT_TWO:
            toks.append(_Token("punct", text[i : i + 2], line, col))
            i += 2
            col += 2
            continue
        if ch in _PUNCT_ONE:
            toks.append(_Token("punct", ch, line, col))
            i += 1
            col += 1
            continue
        raise err(f"unexpected character {ch!r}")

    toks.append(_Token("eof", "", line, col))
    return toks


class _Parser:
    def __init__(self, tokens: list[_Token]):
        self.toks = tokens
        self.i = 0

    # -- token plumbing ----------------------------------------------------

    def peek(self, ahead: int = 0) -> _Token:
        return self.toks[min(self.i + ahead, len(self.toks) - 1)]

    def advance(self) -> _Token:
        tok = self.peek()
        if tok.type != "eof":
            self.i += 1
        return tok

    def fail(self, tok: _Token, msg: str) -> ParseError:
        return ParseError(tok.line, tok.col, msg)

    def skip_seps(self) -> None:
        while self.peek().type == "newline" or (
            self.peek().type == "punct" and self.peek().value == ";"
        ):
            self.advance()

    def expect_punct(self, value: str) -> _Token:
        tok = self.peek()
        if tok.type != "punct" or tok.value != value:
            raise self.fail(tok, f"expected {value!r}")
        return self.advance()

    def expect_word(self, word: str) -> _Token:
        tok = self.peek()
        if tok.type != "ident" or tok.value != word:
            raise self.fail(tok, f"expected keyword {word!r}")
        return self.advance()

    def at_word(self, word: str) -> bool:
        tok = self.peek()
        return tok.type == "ident" and tok.value == word

    def at_punct(self, value: str) -> bool:
        tok = self.peek()
        return tok.type == "punct" and tok.value == value

    def expect_name(self, what: str) -> _Token:
        tok = self.peek()
        if tok.type != "ident":
            raise self.fail(tok, f"expected {what}")
        if tok.value in _RESERVED:
            raise self.fail(tok, f"{tok.value!r} is reserved and cannot name a {what}")
        return self.advance()

    def end_of_statement(self) -> None:
        tok = self.peek()
        if tok.type == "newline" or (tok.type == "punct" and tok.value in (";", "}")):
            self.skip_seps()
            return
        if tok.type == "eof":
            return
        raise self.fail(tok, "expected end of statement")

    # -- grammar -----------------------------------------------------------

    def parse_function(self) -> tuple[FunctionDef, dict]:
        self.skip_seps()
        self.expect_word("fn")
        name = self.expect_name("function name").value

        template = "qiskit"
        template_tok = None
        if self.at_word("template"):
            self.advance()
            template_tok = self.peek()
            if template_tok.type != "ident":
                raise self.fail(template_tok, "expected a template tag")
            template = self.advance().value

        self.skip_seps()
        self.expect_punct("{")

        params: list[ParamDecl] = []
        param_toks: list[_Token] = []
        circuit: TemplateBlock | None = None
        circuit_tok: _Token | None = None
        pipeline: tuple[PostStep, ...] | None = None
        post_tok: _Token | None = None

        while True:
            self.skip_seps()
            if self.at_punct("}"):
                self.advance()
                break
            tok = self.peek()
            if self.at_word("param"):
                param_toks.append(tok)
                params.append(self.parse_param())
            elif self.at_word("circuit"):
                if circuit is not None:
                    raise self.fail(tok, "duplicate circuit block")
                circuit_tok = tok
                circuit = self.parse_circuit_block()
            elif self.at_word("post"):
                if pipeline is not None:
                    raise self.fail(tok, "duplicate post block")
                post_tok = tok
                pipeline = self.parse_post_block()
            else:
                raise self.fail(tok, "expected 'param', 'circuit', or 'post'")

        self.skip_seps()
        tail = self.peek()
        if tail.type != "eof":
            raise self.fail(tail, "unexpected input after function body")

        if circuit is None:
            raise StaticError(
                "MissingCircuit", 1, 1, f"function '{name}' declares no circuit block"
            )
        if pipeline is None:
            pipeline = (PostStep(PostKind.IDENTITY),)

        fdef = FunctionDef(name, template, tuple(params), circuit, pipeline)
        positions = {
            "template": template_tok,
            "params": param_toks,
            "circuit": circuit_tok,
            "post": post_tok,
        }
        return fdef, positions

    def parse_param(self) -> ParamDecl:
        self.expect_word("param")
        name = self.expect_name("parameter name").value
        self.expect_punct(":")
        type_tok = self.peek()
        if not self.at_word("int"):
            raise self.fail(type_tok, "only 'int' parameters are supported")
        self.advance()

        attrs: dict[str, int] = {}
        while self.peek().type == "ident" and self.peek().value in ("min", "max", "default"):
            key_tok = self.advance()
            if key_tok.value in attrs:
                raise self.fail(key_tok, f"duplicate attribute {key_tok.value!r}")
            self.expect_punct("=")
            attrs[key_tok.value] = self.parse_int_literal()
        self.end_of_statement()
        return ParamDecl(name, attrs.get("min"), attrs.get("max"), attrs.get("default"))

    def parse_int_literal(self) -> int:
        negative = False
        if self.at_punct("-"):
            self.advance()
            negative = True
        tok = self.peek()
        if tok.type != "int":
            raise self.fail(tok, "expected an integer literal")
        self.advance()
        value = int(tok.value)
        return -value if negative else value

    def parse_circuit_block(self) -> TemplateBlock:
        self.expect_word("circuit")
        self.skip_seps()
        self.expect_punct("{")
        self.skip_seps()
        self.expect_word("qubits")
        qubits_expr = self.parse_expr()
        self.end_of_statement()
        statements = self.parse_statements()
        self.expect_punct("}")
        return TemplateBlock(qubits_expr, tuple(statements))

    def parse_statements(self) -> list[Stmt]:
        out: list[Stmt] = []
        while True:
            self.skip_seps()
            if self.at_punct("}") or self.peek().type == "eof":
                return out
            out.append(self.parse_statement())

    def parse_statement(self) -> Stmt:
        tok = self.peek()
        if tok.type != "ident":
            raise self.fail(tok, "expected a statement")
        if tok.value == "repeat":
            return self.parse_repeat()
        if tok.value == "measure":
            return self.parse_measure()
        if tok.value in _GATES:
            return self.parse_gate()
        raise self.fail(tok, f"unknown gate {tok.value!r}")

    def parse_repeat(self) -> RepeatStmt:
        head = self.expect_word("repeat")
        var = self.expect_name("loop variable").value
        self.expect_word("in")
        lower = self.parse_expr()
        self.expect_punct("..")
        upper = self.parse_expr()
        self.skip_seps()
        self.expect_punct("{")
        body = self.parse_statements()
        self.expect_punct("}")
        self.end_of_statement()
        return RepeatStmt(var, lower, upper, tuple(body), head.line, head.col)

    def parse_measure(self) -> MeasureStmt:
        head = self.expect_word("measure")
        if self.at_word("all"):
            self.advance()
            self.end_of_statement()
            return MeasureStmt(True, (), head.line, head.col)
        targets = [self.parse_expr()]
        while self.at_punct(","):
            self.advance()
            targets.append(self.parse_expr())
        self.end_of_statement()
        return MeasureStmt(False, tuple(targets), head.line, head.col)

    def parse_gate(self) -> GateStmt:
        head = self.advance()
        kind = _GATES[head.value]
        angle: Expr | None = None
        if kind in ROTATION_GATES:
            self.expect_punct("(")
            angle = self.parse_expr()
            self.expect_punct(")")
        args = [self.parse_expr()]
        if arity(kind) == 2:
            if self.at_punct(","):
                self.advance()
            args.append(self.parse_expr())
        self.end_of_statement()
        return GateStmt(kind, tuple(args), angle, head.line, head.col)

    def parse_post_block(self) -> tuple[PostStep, ...]:
        self.expect_word("post")
        steps = [self.parse_post_step()]
        while self.at_punct("|"):
            self.advance()
            self.skip_seps()
            steps.append(self.parse_post_step())
        self.end_of_statement()
        return tuple(steps)

    def parse_post_step(self) -> PostStep:
        tok = self.peek()
        if tok.type != "ident":
            raise self.fail(tok, "expected a post-processing step")
        if tok.value == "mod":
            self.advance()
            return PostStep(PostKind.MOD, self.parse_expr())
        try:
            kind = PostKind(tok.value)
        except ValueError:
            raise self.fail(tok, f"unknown post-processing step {tok.value!r}") from None
        if kind is PostKind.MOD:
            raise self.fail(tok, "mod requires a divisor expression")
        self.advance()
        return PostStep(kind)

    # -- expressions ---------------------------------------------------------

    def parse_expr(self) -> Expr:
        left = self.parse_term()
        while self.at_punct("+") or self.at_punct("-"):
            op = self.advance().value
            left = BinOp(op, left, self.parse_term())
        return left

    def parse_term(self) -> Expr:
        left = self.parse_unary()
        while self.at_punct("*") or self.at_punct("/"):
            op = self.advance().value
            left = BinOp(op, left, self.parse_unary())
        return left

    def parse_unary(self) -> Expr:
        if self.at_punct("-"):
            self.advance()
            return Neg(self.parse_unary())
        return self.parse_atom()

    def parse_atom(self) -> Expr:
        tok = self.peek()
        if tok.type == "int":
            self.advance()
            return Num(int(tok.value))
        if tok.type == "float":
            self.advance()
            return Num(float(tok.value))
        if tok.type == "ident" and tok.value == "pi":
            self.advance()
            return Num(_PI)
        if tok.type == "ident":
            if tok.value in _RESERVED:
                raise self.fail(tok, f"unexpected keyword {tok.value!r} in expression")
            self.advance()
            return Name(tok.value)
        if self.at_punct("("):
            self.advance()
            inner = self.parse_expr()
            self.expect_punct(")")
            return inner
        raise self.fail(tok, "expected an expression")


# -- static rules -----------------------------------------------------------


def _free_names(expr: Expr) -> set[str]:
    if isinstance(expr, Num):
        return set()
    if isinstance(expr, Name):
        return {expr.ident}
    if isinstance(expr, Neg):
        return _free_names(expr.operand)
    return _free_names(expr.left) | _free_names(expr.right)


def _static_eval(expr: Expr) -> int | float | None:
    """Fold an expression with no free names; None when not statically known."""
    if isinstance(expr, Num):
        return expr.value
    if isinstance(expr, Name):
        return None
    if isinstance(expr, Neg):
        v = _static_eval(expr.operand)
        return None if v is None else -v
    left, right = _static_eval(expr.left), _static_eval(expr.right)
    if left is None or right is None:
        return None
    if expr.op == "/" and right == 0:
        return None  # deferred to evaluation time
    return {"+": left + right, "-": left - right, "*": left * right, "/": left / right}[expr.op]


def _static_check(fdef: FunctionDef, positions: dict) -> None:
    template_tok = positions.get("template")
    if fdef.template not in TEMPLATE_TAGS:
        line, col = (template_tok.line, template_tok.col) if template_tok else (1, 1)
        raise StaticError(
            "UnknownTemplate", line, col,
            f"template {fdef.template!r} is not one of {', '.join(TEMPLATE_TAGS)}",
        )

    seen: set[str] = set()
    for decl, tok in zip(fdef.params, positions["params"]):
        if decl.name in seen:
            raise StaticError(
                "DuplicateParam", tok.line, tok.col, f"parameter '{decl.name}' declared twice"
            )
        seen.add(decl.name)
        if decl.min is not None and decl.max is not None and decl.min > decl.max:
            raise StaticError(
                "BadParamBounds", tok.line, tok.col,
                f"parameter '{decl.name}' has min {decl.min} > max {decl.max}",
            )
        if decl.default is not None:
            if (decl.min is not None and decl.default < decl.min) or (
                decl.max is not None and decl.default > decl.max
            ):
                raise StaticError(
                    "BadParamDefault", tok.line, tok.col,
                    f"default {decl.default} outside [{decl.min}, {decl.max}]",
                )

    param_names = {p.name for p in fdef.params}
    circuit_tok = positions["circuit"]

    def check_scope(expr: Expr, scope: set[str], line: int, col: int) -> None:
        undeclared = _free_names(expr) - scope
        if undeclared:
            name = sorted(undeclared)[0]
            raise StaticError(
                "UndeclaredIdentifier", line, col,
                f"'{name}' is not a declared parameter or enclosing loop variable",
            )

    check_scope(fdef.circuit_template.qubits_expr, param_names,
                circuit_tok.line, circuit_tok.col)

    def walk(statements: tuple[Stmt, ...], scope: set[str], depth: int, top_level: bool) -> None:
        for idx, stmt in enumerate(statements):
            if isinstance(stmt, GateStmt):
                for e in stmt.args:
                    check_scope(e, scope, stmt.line, stmt.col)
                if stmt.angle is not None:
                    check_scope(stmt.angle, scope, stmt.line, stmt.col)
            elif isinstance(stmt, RepeatStmt):
                if depth + 1 > MAX_LOOP_NESTING:
                    raise StaticError(
                        "ExcessiveNesting", stmt.line, stmt.col,
                        f"repeat loops nest deeper than {MAX_LOOP_NESTING}",
                    )
                check_scope(stmt.lower, scope, stmt.line, stmt.col)
                check_scope(stmt.upper, scope, stmt.line, stmt.col)
                walk(stmt.body, scope | {stmt.var}, depth + 1, top_level=False)
            else:  # MeasureStmt
                if not top_level:
                    raise StaticError(
                        "NestedMeasure", stmt.line, stmt.col,
                        "measure may not appear inside a repeat loop",
                    )
                if idx != len(statements) - 1:
                    raise StaticError(
                        "MeasureNotLast", stmt.line, stmt.col,
                        "measure must be the final circuit statement",
                    )
                for e in stmt.targets:
                    check_scope(e, scope, stmt.line, stmt.col)

    walk(fdef.circuit_template.statements, param_names, 0, top_level=True)

    top = fdef.circuit_template.statements
    measures = [s for s in top if isinstance(s, MeasureStmt)]
    if not measures:
        raise StaticError(
            "MissingMeasure", circuit_tok.line, circuit_tok.col,
            "circuit block must end with exactly one measure statement",
        )
    if len(measures) > 1:
        raise StaticError(
            "MultipleMeasure", measures[1].line, measures[1].col,
            "circuit block may contain only one measure statement",
        )

    post_tok = positions.get("post")
    for step in fdef.post_pipeline:
        if step.kind is PostKind.MOD:
            line, col = (post_tok.line, post_tok.col) if post_tok else (1, 1)
            check_scope(step.divisor, param_names, line, col)
            folded = _static_eval(step.divisor)
            if folded is not None and (not float(folded).is_integer() or folded < 1):
                raise StaticError(
                    "BadModDivisor", line, col, f"mod divisor must be an integer >= 1, got {folded}"
                )


def parse(source: str) -> FunctionDef:
    """Parse and statically check one function definition."""
    parser = _Parser(_tokenize(source))
    fdef, positions = parser.parse_function()
    _static_check(fdef, positions)
    return fdef
