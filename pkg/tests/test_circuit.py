"""Circuit IR: validation, stats, and the text round-trip."""

import math
import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from qfaas.circuit import (
    Circuit,
    CircuitStats,
    GateKind,
    GateOp,
    InvalidCircuit,
    ParseError,
    from_text,
    gate,
    stats,
    to_text,
    validate,
)

from helpers import random_circuit


def bell() -> Circuit:
    return Circuit(2, (gate("h", 0), gate("cx", 0, 1)), frozenset({0, 1}))


class TestValidate:
    def test_minimal_circuit_ok(self):
        c = Circuit(1, (gate("h", 0),), frozenset({0}))
        assert validate(c).ok

    def test_duplicate_targets_reported_with_op_index(self):
        c = Circuit(2, (GateOp(GateKind.CX, (0, 0)),), frozenset({0}))
        report = validate(c)
        assert not report.ok
        assert any(v.rule == "DuplicateTargets" and v.op_index == 0 for v in report.violations)

    def test_target_beyond_width_reported(self):
        c = Circuit(2, (gate("h", 2),), frozenset({0}))
        report = validate(c)
        assert any(v.rule == "IndexOutOfRange" and v.op_index == 0 for v in report.violations)

    def test_measured_index_out_of_range(self):
        c = Circuit(2, (gate("h", 0),), frozenset({0, 5}))
        assert "IndexOutOfRange" in validate(c).rules()

    def test_empty_measurement_flagged(self):
        c = Circuit(2, (gate("h", 0),), frozenset())
        assert "EmptyMeasurement" in validate(c).rules()

    def test_rotation_without_angle(self):
        c = Circuit(1, (GateOp(GateKind.RX, (0,)),), frozenset({0}))
        assert "MissingAngle" in validate(c).rules()

    def test_angle_on_plain_gate(self):
        c = Circuit(1, (GateOp(GateKind.H, (0,), 1.0),), frozenset({0}))
        assert "UnexpectedAngle" in validate(c).rules()

    def test_non_finite_angle(self):
        c = Circuit(1, (GateOp(GateKind.RX, (0,), math.inf),), frozenset({0}))
        assert "NonFiniteAngle" in validate(c).rules()

    def test_nonpositive_width(self):
        c = Circuit(0, (), frozenset({0}))
        assert "NonPositiveWidth" in validate(c).rules()


# Pairs of (mutator, expected rule): each takes a valid circuit and injects
# exactly one class of violation.
_MUTATIONS = [
    (lambda c, rng: Circuit(0, c.ops, c.measured), "NonPositiveWidth"),
    (
        lambda c, rng: Circuit(c.width, c.ops + (gate("x", c.width),), c.measured),
        "IndexOutOfRange",
    ),
    (
        lambda c, rng: Circuit(c.width, c.ops + (GateOp(GateKind.CZ, (0, 0)),), c.measured),
        "DuplicateTargets",
    ),
    (
        lambda c, rng: Circuit(c.width, c.ops + (GateOp(GateKind.RY, (0,)),), c.measured),
        "MissingAngle",
    ),
    (
        lambda c, rng: Circuit(c.width, c.ops + (GateOp(GateKind.Z, (0,), 0.5),), c.measured),
        "UnexpectedAngle",
    ),
    (
        lambda c, rng: Circuit(c.width, c.ops + (GateOp(GateKind.RZ, (0,), math.nan),), c.measured),
        "NonFiniteAngle",
    ),
    (lambda c, rng: Circuit(c.width, c.ops, c.measured | {c.width}), "IndexOutOfRange"),
    (lambda c, rng: Circuit(c.width, c.ops, frozenset()), "EmptyMeasurement"),
    (
        lambda c, rng: Circuit(c.width, c.ops + (GateOp(GateKind.SWAP, (0,)),), c.measured),
        "BadArity",
    ),
]


@settings(max_examples=120)
@given(seed=st.integers(0, 2**32 - 1), which=st.integers(0, len(_MUTATIONS) - 1))
def test_every_injected_violation_is_reported(seed, which):
    rng = random.Random(seed)
    base = random_circuit(rng, max_width=4, max_gates=8)
    assert validate(base).ok
    mutate, rule = _MUTATIONS[which]
    mutated = mutate(base, rng)
    assert rule in validate(mutated).rules()


class TestStats:
    def test_bell(self):
        assert stats(bell()) == CircuitStats(width=2, gate_count=2, two_qubit_count=1, depth=2)

    def test_disjoint_hadamards_have_depth_one(self):
        c = Circuit(3, (gate("h", 0), gate("h", 1), gate("h", 2)), frozenset({0, 1, 2}))
        s = stats(c)
        assert s.depth == 1 and s.gate_count == 3 and s.two_qubit_count == 0

    def test_empty_ops(self):
        s = stats(Circuit(2, (), frozenset({0})))
        assert s.depth == 0 and s.gate_count == 0

    def test_invalid_circuit_raises(self):
        with pytest.raises(InvalidCircuit):
            stats(Circuit(1, (gate("h", 3),), frozenset({0})))

    def test_shared_qubit_chain_depth_equals_gate_count(self):
        ops = tuple(gate("x", 0) for _ in range(5))
        assert stats(Circuit(2, ops, frozenset({0}))).depth == 5

    @settings(max_examples=80)
    @given(seed=st.integers(0, 2**32 - 1))
    def test_depth_bounded_by_gate_count(self, seed):
        c = random_circuit(random.Random(seed), max_width=4, max_gates=12)
        s = stats(c)
        assert 0 <= s.depth <= s.gate_count
        if c.ops and len({q for op in c.ops for q in op.targets}) == 1:
            assert s.depth == s.gate_count


class TestTextFormat:
    def test_bell_rendering(self):
        assert to_text(bell()) == "qubits 2\nh 0\ncx 0 1\nmeasure all"

    def test_partial_measure_rendering(self):
        c = Circuit(3, (gate("h", 0),), frozenset({0, 2}))
        assert to_text(c).splitlines()[-1] == "measure 0 2"

    def test_rotation_rendering_roundtrips_angle(self):
        c = Circuit(3, (gate("rx", 2, angle=1.5707963),), frozenset({0}))
        text = to_text(c)
        assert "rx(1.5707963) 2" in text
        assert from_text(text) == c

    def test_unknown_mnemonic_line_number(self):
        with pytest.raises(ParseError) as exc:
            from_text("qubits 1\nfoo 0")
        assert exc.value.line == 2

    def test_missing_measure(self):
        with pytest.raises(ParseError):
            from_text("qubits 2\nh 0")

    def test_statement_after_measure(self):
        with pytest.raises(ParseError) as exc:
            from_text("qubits 2\nmeasure all\nh 0")
        assert exc.value.line == 3

    def test_bad_header(self):
        with pytest.raises(ParseError) as exc:
            from_text("h 0\nmeasure all")
        assert exc.value.line == 1

    def test_bad_angle(self):
        with pytest.raises(ParseError):
            from_text("qubits 1\nrx(nope) 0\nmeasure all")

    def test_angle_required_for_rotation(self):
        with pytest.raises(ParseError):
            from_text("qubits 1\nrx 0\nmeasure all")

    def test_arity_errors(self):
        with pytest.raises(ParseError):
            from_text("qubits 2\ncx 0\nmeasure all")
        with pytest.raises(ParseError):
            from_text("qubits 2\nh 0 1\nmeasure all")

    def test_out_of_range_target(self):
        with pytest.raises(ParseError) as exc:
            from_text("qubits 2\nh 4\nmeasure all")
        assert exc.value.line == 2

    def test_to_text_requires_valid_circuit(self):
        with pytest.raises(InvalidCircuit):
            to_text(Circuit(1, (), frozenset()))

    @settings(max_examples=150)
    @given(seed=st.integers(0, 2**32 - 1), partial=st.booleans())
    def test_roundtrip_identity(self, seed, partial):
        rng = random.Random(seed)
        c = random_circuit(rng, max_width=5, max_gates=12)
        if partial and c.width > 1:
            keep = rng.sample(range(c.width), rng.randint(1, c.width - 1))
            c = Circuit(c.width, c.ops, frozenset(keep))
        assert from_text(to_text(c)) == c
