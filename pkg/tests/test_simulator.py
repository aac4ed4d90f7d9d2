"""Statevector engine: gate math against the dense oracle, sampling, noise."""

import math
import random

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from qfaas import simulator as sim
from qfaas.circuit import Circuit, GateOp, GateKind, InvalidCircuit, gate
from qfaas.simulator import InvalidDistribution, StateVector

from helpers import oracle_statevector, random_circuit

INV_SQRT2 = 1 / math.sqrt(2)


def bell() -> Circuit:
    return Circuit(2, (gate("h", 0), gate("cx", 0, 1)), frozenset({0, 1}))


class TestApplyGate:
    def test_hadamard_on_zero(self):
        st0 = StateVector.zero(1)
        out = sim.apply_gate(st0, gate("h", 0))
        np.testing.assert_allclose(out.amplitudes, [INV_SQRT2, INV_SQRT2], atol=1e-12)

    def test_x_flips(self):
        out = sim.apply_gate(StateVector.zero(1), gate("x", 0))
        np.testing.assert_allclose(out.amplitudes, [0, 1], atol=1e-12)

    def test_cx_truth_table_little_endian(self):
        # |01> means q0=1, q1=0, i.e. basis index 1; CX(0->1) maps it to |11>.
        st01 = StateVector(2, np.array([0, 1, 0, 0], dtype=complex))
        out = sim.apply_gate(st01, gate("cx", 0, 1))
        np.testing.assert_allclose(out.amplitudes, [0, 0, 0, 1], atol=1e-12)

    def test_input_state_is_not_mutated(self):
        st0 = StateVector.zero(1)
        sim.apply_gate(st0, gate("x", 0))
        np.testing.assert_allclose(st0.amplitudes, [1, 0])

    def test_out_of_range_target(self):
        with pytest.raises(ValueError):
            sim.apply_gate(StateVector.zero(1), gate("x", 1))

    @pytest.mark.parametrize(
        "fwd,back",
        [
            (gate("x", 0), gate("x", 0)),
            (gate("h", 0), gate("h", 0)),
            (gate("rx", 0, angle=0.731), gate("rx", 0, angle=-0.731)),
        ],
    )
    def test_gate_then_inverse_recovers_state(self, fwd, back):
        rng = np.random.default_rng(5)
        amps = rng.normal(size=4) + 1j * rng.normal(size=4)
        amps /= np.linalg.norm(amps)
        start = StateVector(2, amps.copy())
        out = sim.apply_gate(sim.apply_gate(start, fwd), back)
        np.testing.assert_allclose(out.amplitudes, amps, atol=1e-10)


class TestRun:
    def test_bell_amplitudes(self):
        out = sim.run(bell())
        np.testing.assert_allclose(out.amplitudes, [INV_SQRT2, 0, 0, INV_SQRT2], atol=1e-12)

    def test_empty_ops_is_identity(self):
        out = sim.run(Circuit(2, (), frozenset({0, 1})))
        np.testing.assert_allclose(out.amplitudes, [1, 0, 0, 0])

    def test_invalid_circuit_rejected(self):
        with pytest.raises(InvalidCircuit):
            sim.run(Circuit(2, (gate("h", 5),), frozenset({0})))

    def test_width_cap(self):
        wide = Circuit(sim.MAX_QUBITS + 1, (), frozenset({0}))
        with pytest.raises(ValueError):
            sim.run(wide)

    def test_matches_dense_oracle_on_random_circuits(self):
        rng = random.Random(20240917)
        for _ in range(100):
            c = random_circuit(rng, max_width=3, max_gates=10)
            got = sim.run(c).amplitudes
            want = oracle_statevector(c)
            assert np.max(np.abs(got - want)) <= 1e-10

    def test_normalization_after_every_gate(self):
        # 1000 random circuits; norm checked after each individual gate.
        rng = random.Random(7)
        for _ in range(1000):
            c = random_circuit(rng, max_width=4, max_gates=10)
            state = StateVector.zero(c.width)
            for op in c.ops:
                state = sim.apply_gate(state, op)
                assert abs(1.0 - state.norm() ** 2) <= 1e-10


class TestProbabilities:
    def test_bell_full_measurement(self):
        probs = sim.probabilities(sim.run(bell()), {0, 1})
        assert set(probs) == {"00", "11"}
        assert probs["00"] == pytest.approx(0.5, abs=1e-12)
        assert probs["11"] == pytest.approx(0.5, abs=1e-12)

    def test_bell_marginal_single_qubit(self):
        probs = sim.probabilities(sim.run(bell()), {0})
        assert probs["0"] == pytest.approx(0.5, abs=1e-12)
        assert probs["1"] == pytest.approx(0.5, abs=1e-12)

    def test_ground_state(self):
        probs = sim.probabilities(StateVector.zero(2), {0, 1})
        assert probs == {"00": 1.0}

    def test_bit_order_highest_qubit_leftmost(self):
        # q1=1, q0=0 -> index 2 -> bitstring "10".
        state = StateVector(2, np.array([0, 0, 1, 0], dtype=complex))
        assert sim.probabilities(state, {0, 1}) == {"10": 1.0}

    def test_empty_measured_rejected(self):
        with pytest.raises(ValueError):
            sim.probabilities(StateVector.zero(1), set())

    @settings(max_examples=60)
    @given(seed=st.integers(0, 2**32 - 1))
    def test_distribution_sums_to_one(self, seed):
        rng = random.Random(seed)
        c = random_circuit(rng, max_width=4, max_gates=10)
        measured = set(rng.sample(range(c.width), rng.randint(1, c.width)))
        probs = sim.probabilities(sim.run(c), measured)
        assert sum(probs.values()) == pytest.approx(1.0, abs=1e-10)


class TestSample:
    def test_certain_outcome(self):
        assert sim.sample({"0": 1.0}, shots=100, seed=1) == {"0": 100}

    def test_certain_flip(self):
        assert sim.sample({"1": 1.0}, shots=100, seed=1, readout_flip_p=1.0) == {"0": 100}

    def test_fixed_seed_is_deterministic(self):
        probs = {"0": 0.5, "1": 0.5}
        first = sim.sample(probs, shots=4096, seed=99)
        second = sim.sample(probs, shots=4096, seed=99)
        assert first == second

    def test_counts_sum_to_shots(self):
        rng = random.Random(3)
        for _ in range(25):
            c = random_circuit(rng, max_width=3, max_gates=8)
            probs = sim.probabilities(sim.run(c), c.measured)
            shots = rng.randint(1, 500)
            counts = sim.sample(probs, shots=shots, seed=rng.randrange(2**32), readout_flip_p=rng.choice([0.0, 0.05]))
            assert sum(counts.values()) == shots

    def test_bell_sampling_consistency(self):
        probs = sim.probabilities(sim.run(bell()), {0, 1})
        counts = sim.sample(probs, shots=4096, seed=1234)
        assert set(counts) <= {"00", "11"}
        for key in ("00", "11"):
            assert abs(counts.get(key, 0) / 4096 - 0.5) <= 0.04

    def test_rejects_bad_distributions(self):
        with pytest.raises(InvalidDistribution):
            sim.sample({"0": 0.6, "1": 0.6}, shots=10, seed=0)
        with pytest.raises(InvalidDistribution):
            sim.sample({"0": 1.5, "1": -0.5}, shots=10, seed=0)
        with pytest.raises(InvalidDistribution):
            sim.sample({"0": 0.5, "11": 0.5}, shots=10, seed=0)
        with pytest.raises(InvalidDistribution):
            sim.sample({}, shots=10, seed=0)

    def test_rejects_bad_flip_probability(self):
        with pytest.raises(ValueError):
            sim.sample({"0": 1.0}, shots=10, seed=0, readout_flip_p=1.5)


class TestExecute:
    def test_counts_and_metadata(self):
        res = sim.execute(bell(), shots=256, seed=42, backend_name="local-sv")
        assert sum(res.counts.values()) == 256
        assert res.seed == 42
        assert res.backend_name == "local-sv"
        assert res.duration_ms >= 0.0

    def test_seed_recorded_when_drawn(self):
        res = sim.execute(bell(), shots=8)
        repeat = sim.execute(bell(), shots=8, seed=res.seed)
        assert repeat.counts == res.counts

    def test_readout_noise_changes_outcomes(self):
        c = Circuit(1, (), frozenset({0}))
        res = sim.execute(c, shots=2000, seed=5, readout_flip_p=0.25)
        # Ground state with 25% flips: expect roughly a quarter "1".
        assert 350 <= res.counts.get("1", 0) <= 650

    def test_partial_measurement_keys(self):
        c = Circuit(3, (gate("x", 2),), frozenset({2}))
        res = sim.execute(c, shots=16, seed=0)
        assert res.counts == {"1": 16}

    def test_to_int_convention_matches_basis_index(self):
        # Cross-module contract: int(bitstring, 2) == basis index of the
        # measured subsystem, here |q1 q0> = |10> -> 2.
        c = Circuit(2, (gate("x", 1),), frozenset({0, 1}))
        res = sim.execute(c, shots=4, seed=0)
        assert list(res.counts) == ["10"]
        assert int("10", 2) == 2
