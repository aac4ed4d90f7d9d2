"""Quantum circuit intermediate representation.

A :class:`Circuit` is an ordered gate list over ``width`` qubits plus the set
of qubits measured at the end of the circuit.  Qubit 0 is the least
significant bit of a basis-state index, and outcome bitstrings are written
with the highest measured qubit leftmost, so ``int(bits, 2)`` recovers the
basis index of the measured subsystem.

The module also defines the line-oriented text form used in logs, job
details, and fixtures::

    qubits 2
    h 0
    cx 0 1
    measure all

Rotation gates carry their angle in radians: ``rx(1.5707963) 2``.  The final
line is either ``measure all`` or an explicit index list like ``measure 0 2``.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass, field
from enum import Enum
from typing import Iterable, Sequence


class GateKind(str, Enum):
    """Supported gates; the value doubles as the text-format mnemonic."""

    H = "h"
    X = "x"
    Y = "y"
    Z = "z"
    S = "s"
    T = "t"
    RX = "rx"
    RY = "ry"
    RZ = "rz"
    CX = "cx"
    CZ = "cz"
    SWAP = "swap"


ROTATION_GATES = frozenset({GateKind.RX, GateKind.RY, GateKind.RZ})
TWO_QUBIT_GATES = frozenset({GateKind.CX, GateKind.CZ, GateKind.SWAP})

_MNEMONICS = {k.value: k for k in GateKind}


def arity(kind: GateKind) -> int:
    return 2 if kind in TWO_QUBIT_GATES else 1


@dataclass(frozen=True)
class GateOp:
    """One gate application: kind, target qubits, optional rotation angle."""

    kind: GateKind
    targets: tuple[int, ...]
    angle: float | None = None

    def __post_init__(self) -> None:
        object.__setattr__(self, "targets", tuple(self.targets))
        if self.angle is not None:
            object.__setattr__(self, "angle", float(self.angle))


@dataclass(frozen=True)
class Circuit:
    """Gate list over ``width`` qubits with an end-of-circuit measured set."""

    width: int
    ops: tuple[GateOp, ...]
    measured: frozenset[int]

    def __post_init__(self) -> None:
        object.__setattr__(self, "ops", tuple(self.ops))
        object.__setattr__(self, "measured", frozenset(self.measured))


def gate(kind: GateKind | str, *targets: int, angle: float | None = None) -> GateOp:
    """Convenience constructor accepting a mnemonic string or a GateKind."""
    if isinstance(kind, str) and not isinstance(kind, GateKind):
        try:
            kind = _MNEMONICS[kind.lower()]
        except KeyError:
            raise ValueError(f"unknown gate {kind!r}") from None
    return GateOp(kind, tuple(targets), angle)


@dataclass(frozen=True)
class Violation:
    """One invariant breach; op_index is None for circuit-level violations."""

    op_index: int | None
    rule: str
    message: str


@dataclass
class ValidationReport:
    violations: list[Violation] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.violations

    def rules(self) -> set[str]:
        return {v.rule for v in self.violations}

    def summary(self) -> str:
        if self.ok:
            return "ok"
        return "; ".join(
            f"{v.rule} at op {v.op_index}" if v.op_index is not None else v.rule
            for v in self.violations
        )


class InvalidCircuit(Exception):
    """Raised by operations whose precondition is a validating circuit."""

    def __init__(self, report: ValidationReport):
        self.report = report
        super().__init__(f"invalid circuit: {report.summary()}")


def validate(circuit: Circuit) -> ValidationReport:
    """Check every Circuit/GateOp invariant and report all breaches.

    Rules reported: NonPositiveWidth, BadArity, DuplicateTargets,
    IndexOutOfRange (gate targets and measured indices), MissingAngle,
    UnexpectedAngle, NonFiniteAngle, EmptyMeasurement.
    """
    report = ValidationReport()

    def add(op_index: int | None, rule: str, message: str) -> None:
        report.violations.append(Violation(op_index, rule, message))

    if circuit.width < 1:
        add(None, "NonPositiveWidth", f"width must be >= 1, got {circuit.width}")

    for i, op in enumerate(circuit.ops):
        want = arity(op.kind)
        if len(op.targets) != want:
            add(i, "BadArity", f"{op.kind.value} takes {want} target(s), got {len(op.targets)}")
        elif want == 2 and op.targets[0] == op.targets[1]:
            add(i, "DuplicateTargets", f"{op.kind.value} targets must be distinct")
        for q in op.targets:
            if not (0 <= q < circuit.width):
                add(i, "IndexOutOfRange", f"qubit {q} out of range for width {circuit.width}")
        if op.kind in ROTATION_GATES:
            if op.angle is None:
                add(i, "MissingAngle", f"{op.kind.value} requires an angle")
            elif not math.isfinite(op.angle):
                add(i, "NonFiniteAngle", f"angle must be finite, got {op.angle}")
        elif op.angle is not None:
            add(i, "UnexpectedAngle", f"{op.kind.value} does not take an angle")

    for q in sorted(circuit.measured):
        if not (0 <= q < circuit.width):
            add(None, "IndexOutOfRange", f"measured qubit {q} out of range for width {circuit.width}")
    if not circuit.measured:
        add(None, "EmptyMeasurement", "an executable circuit must measure at least one qubit")

    return report


@dataclass(frozen=True)
class CircuitStats:
    width: int
    gate_count: int
    two_qubit_count: int
    depth: int


def stats(circuit: Circuit) -> CircuitStats:
    """Gate counts and greedy left-to-right depth.

    Depth layers ops greedily: an op lands one layer after the deepest layer
    already touching any of its qubits, so ops on disjoint qubits share a
    layer and ops sharing a qubit never do.
    """
    report = validate(circuit)
    if not report.ok:
        raise InvalidCircuit(report)

    last_layer = [0] * circuit.width
    two_qubit = 0
    for op in circuit.ops:
        if op.kind in TWO_QUBIT_GATES:
            two_qubit += 1
        layer = max(last_layer[q] for q in op.targets) + 1
        for q in op.targets:
            last_layer[q] = layer
    depth = max(last_layer, default=0)
    return CircuitStats(circuit.width, len(circuit.ops), two_qubit, depth)


class ParseError(Exception):
    """Malformed circuit text; carries the 1-based offending line number."""

    def __init__(self, line: int, message: str):
        self.line = line
        self.message = message
        super().__init__(f"line {line}: {message}")


def to_text(circuit: Circuit) -> str:
    """Render a valid circuit in the line-oriented text form."""
    report = validate(circuit)
    if not report.ok:
        raise InvalidCircuit(report)

    lines = [f"qubits {circuit.width}"]
    for op in circuit.ops:
        if op.kind in ROTATION_GATES:
            lines.append(f"{op.kind.value}({op.angle!r}) {op.targets[0]}")
        else:
            lines.append(f"{op.kind.value} " + " ".join(str(q) for q in op.targets))
    if circuit.measured == frozenset(range(circuit.width)):
        lines.append("measure all")
    else:
        lines.append("measure " + " ".join(str(q) for q in sorted(circuit.measured)))
    return "\n".join(lines)


_ROTATION_HEAD = re.compile(r"^([a-z]+)\((.*)\)$")


def from_text(text: str) -> Circuit:
    """Parse the text form back into a Circuit.

    Inverse of :func:`to_text` on valid circuits.  Raises :class:`ParseError`
    with the 1-based line number for any malformed line.
    """
    width: int | None = None
    ops: list[GateOp] = []
    measured: frozenset[int] | None = None
    last_line = 0

    for lineno, raw in enumerate(text.splitlines(), start=1):
        last_line = lineno
        line = raw.strip()
        if not line:
            continue
        fields = line.split()

        if width is None:
            if fields[0] != "qubits":
                raise ParseError(lineno, "expected 'qubits N' header")
            if len(fields) != 2 or not _is_int(fields[1]):
                raise ParseError(lineno, "expected 'qubits N' with integer N")
            width = int(fields[1])
            if width < 1:
                raise ParseError(lineno, f"qubit count must be >= 1, got {width}")
            continue

        if measured is not None:
            raise ParseError(lineno, "statements after measure are not allowed")

        if fields[0] == "measure":
            measured = _parse_measure(fields[1:], width, lineno)
            continue

        ops.append(_parse_gate_line(fields, width, lineno))

    if width is None:
        raise ParseError(max(last_line, 1), "missing 'qubits N' header")
    if measured is None:
        raise ParseError(last_line + 1, "missing measure statement")
    return Circuit(width, tuple(ops), measured)


def _is_int(token: str) -> bool:
    return bool(re.fullmatch(r"-?\d+", token))


def _parse_measure(args: Sequence[str], width: int, lineno: int) -> frozenset[int]:
    if args == ["all"]:
        return frozenset(range(width))
    if not args:
        raise ParseError(lineno, "measure needs 'all' or qubit indices")
    indices = set()
    for tok in args:
        if not _is_int(tok):
            raise ParseError(lineno, f"bad qubit index {tok!r}")
        q = int(tok)
        if not (0 <= q < width):
            raise ParseError(lineno, f"measured qubit {q} out of range for width {width}")
        indices.add(q)
    return frozenset(indices)


def _parse_gate_line(fields: Sequence[str], width: int, lineno: int) -> GateOp:
    head = fields[0]
    angle: float | None = None
    m = _ROTATION_HEAD.fullmatch(head)
    if m:
        head = m.group(1)
        kind = _MNEMONICS.get(head)
        if kind is None:
            raise ParseError(lineno, f"unknown gate {head!r}")
        if kind not in ROTATION_GATES:
            raise ParseError(lineno, f"{head} does not take an angle")
        try:
            angle = float(m.group(2))
        except ValueError:
            raise ParseError(lineno, f"bad angle {m.group(2)!r}") from None
        if not math.isfinite(angle):
            raise ParseError(lineno, f"angle must be finite, got {angle}")
    else:
        kind = _MNEMONICS.get(head)
        if kind is None:
            raise ParseError(lineno, f"unknown gate {head!r}")
        if kind in ROTATION_GATES:
            raise ParseError(lineno, f"{head} requires an angle, e.g. {head}(1.5707) 0")

    want = arity(kind)
    args = fields[1:]
    if len(args) != want:
        raise ParseError(lineno, f"{kind.value} takes {want} target(s), got {len(args)}")
    targets = []
    for tok in args:
        if not _is_int(tok):
            raise ParseError(lineno, f"bad qubit index {tok!r}")
        q = int(tok)
        if not (0 <= q < width):
            raise ParseError(lineno, f"qubit {q} out of range for width {width}")
        targets.append(q)
    if want == 2 and targets[0] == targets[1]:
        raise ParseError(lineno, f"{kind.value} targets must be distinct")
    return GateOp(kind, tuple(targets), angle)
