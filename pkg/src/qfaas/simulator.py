"""Statevector execution engine.

Evolves the full 2^n amplitude vector of a circuit, computes exact marginal
outcome probabilities, and draws seeded measurement shots with an optional
independent readout bit-flip per measured bit.

Conventions
-----------
Basis index ``b`` encodes qubit ``q`` as bit ``q`` (qubit 0 least
significant).  Outcome bitstrings list measured qubits from highest index to
lowest, so ``int(bits, 2)`` equals the marginal basis index; this matches the
circuit IR's text form and the function language's ``to_int`` step.

Gates update amplitudes in place through strided views of the state array;
no 2^n x 2^n matrix is ever formed, which keeps 20-qubit circuits in the
sub-second range.  Widths above ``MAX_QUBITS`` are refused.
"""

from __future__ import annotations

import math
import secrets
import time
from dataclasses import dataclass
from typing import Iterable, Mapping

import numpy as np

from .circuit import Circuit, GateKind, GateOp, InvalidCircuit, validate

MAX_QUBITS = 24

_INV_SQRT2 = 1.0 / math.sqrt(2.0)

_FIXED_1Q = {
    GateKind.H: np.array([[_INV_SQRT2, _INV_SQRT2], [_INV_SQRT2, -_INV_SQRT2]], dtype=complex),
    GateKind.X: np.array([[0, 1], [1, 0]], dtype=complex),
    GateKind.Y: np.array([[0, -1j], [1j, 0]], dtype=complex),
    GateKind.Z: np.array([[1, 0], [0, -1]], dtype=complex),
    GateKind.S: np.array([[1, 0], [0, 1j]], dtype=complex),
    GateKind.T: np.array([[1, 0], [0, np.exp(1j * math.pi / 4)]], dtype=complex),
}


def _rotation_matrix(kind: GateKind, theta: float) -> np.ndarray:
    c, s = math.cos(theta / 2.0), math.sin(theta / 2.0)
    if kind is GateKind.RX:
        return np.array([[c, -1j * s], [-1j * s, c]], dtype=complex)
    if kind is GateKind.RY:
        return np.array([[c, -s], [s, c]], dtype=complex)
    return np.array([[np.exp(-0.5j * theta), 0], [0, np.exp(0.5j * theta)]], dtype=complex)


def gate_matrix(op: GateOp) -> np.ndarray:
    """2x2 unitary of a single-qubit op (rotations included)."""
    if op.kind in _FIXED_1Q:
        return _FIXED_1Q[op.kind]
    return _rotation_matrix(op.kind, float(op.angle))


@dataclass
class StateVector:
    """2^n complex amplitudes; qubit q is bit q of the basis index."""

    n: int
    amplitudes: np.ndarray

    @classmethod
    def zero(cls, n: int) -> "StateVector":
        amps = np.zeros(2**n, dtype=complex)
        amps[0] = 1.0
        return cls(n, amps)

    def norm(self) -> float:
        return float(np.sqrt(np.sum(np.abs(self.amplitudes) ** 2)))


@dataclass
class ExecutionResult:
    """Sampled counts plus the execution metadata recorded on the job."""

    counts: dict[str, int]
    shots: int
    seed: int
    duration_ms: float
    backend_name: str


class InvalidDistribution(Exception):
    """The outcome distribution handed to sample() is not a distribution."""


def _apply_inplace(amps: np.ndarray, op: GateOp, n: int) -> None:
    if len(op.targets) == 1:
        q = op.targets[0]
        m = gate_matrix(op)
        # index = high * 2^(q+1) + bit_q * 2^q + low, so the middle axis of
        # this view is exactly qubit q's bit.
        view = amps.reshape(-1, 2, 2**q)
        v0 = view[:, 0, :].copy()
        v1 = view[:, 1, :]
        view[:, 0, :] = m[0, 0] * v0 + m[0, 1] * v1
        view[:, 1, :] = m[1, 0] * v0 + m[1, 1] * v1
        return

    a, b = op.targets
    t = amps.reshape([2] * n)
    # In the [2]*n view, axis i corresponds to qubit n-1-i.
    axa, axb = n - 1 - a, n - 1 - b

    def slot(va: int, vb: int) -> tuple:
        idx: list[slice | int] = [slice(None)] * n
        idx[axa] = va
        idx[axb] = vb
        return tuple(idx)

    if op.kind is GateKind.CX:
        i10, i11 = slot(1, 0), slot(1, 1)
        tmp = t[i10].copy()
        t[i10] = t[i11]
        t[i11] = tmp
    elif op.kind is GateKind.CZ:
        t[slot(1, 1)] *= -1
    else:  # SWAP
        i01, i10 = slot(0, 1), slot(1, 0)
        tmp = t[i01].copy()
        t[i01] = t[i10]
        t[i10] = tmp


def apply_gate(state: StateVector, op: GateOp) -> StateVector:
    """Apply one gate, returning a new StateVector (input left untouched)."""
    for q in op.targets:
        if not (0 <= q < state.n):
            raise ValueError(f"qubit {q} out of range for {state.n}-qubit state")
    amps = state.amplitudes.copy()
    _apply_inplace(amps, op, state.n)
    return StateVector(state.n, amps)


def run(circuit: Circuit) -> StateVector:
    """Evolve |0...0> through the circuit's gate list."""
    report = validate(circuit)
    if not report.ok:
        raise InvalidCircuit(report)
    if circuit.width > MAX_QUBITS:
        raise ValueError(f"width {circuit.width} exceeds the {MAX_QUBITS}-qubit engine cap")
    state = StateVector.zero(circuit.width)
    for op in circuit.ops:
        _apply_inplace(state.amplitudes, op, circuit.width)
    return state


def _marginal(amps: np.ndarray, n: int, measured_desc: list[int]) -> np.ndarray:
    """Marginal probability vector over the given qubits (descending order).

    The flat index of the result has the first listed qubit as its most
    significant bit, matching the outcome-bitstring convention.
    """
    probs = np.abs(amps) ** 2
    if len(measured_desc) == n:
        # Full measurement: axes are already qubits n-1..0 after reshape.
        return probs
    keep_axes = {n - 1 - q for q in measured_desc}
    drop = tuple(axis for axis in range(n) if axis not in keep_axes)
    return probs.reshape([2] * n).sum(axis=drop).reshape(-1)


def probabilities(state: StateVector, measured: Iterable[int]) -> dict[str, float]:
    """Exact outcome distribution over the measured qubits.

    Unmeasured qubits are summed out.  Outcomes with exactly zero probability
    are omitted; the returned values sum to 1 within float error.
    """
    qubits = sorted(set(measured), reverse=True)
    if not qubits:
        raise ValueError("measured set must be nonempty")
    for q in qubits:
        if not (0 <= q < state.n):
            raise ValueError(f"measured qubit {q} out of range for n={state.n}")
    flat = _marginal(state.amplitudes, state.n, qubits)
    k = len(qubits)
    return {format(i, f"0{k}b"): float(p) for i, p in enumerate(flat) if p != 0.0}


def _flip_values(rng: np.random.Generator, shots: int, k: int, p: float) -> np.ndarray:
    flips = rng.random((shots, k)) < p
    weights = 1 << np.arange(k - 1, -1, -1, dtype=np.int64)
    return (flips * weights).sum(axis=1)


def _counts_from_ints(values: np.ndarray, k: int) -> dict[str, int]:
    uniq, cnt = np.unique(values, return_counts=True)
    return {format(int(v), f"0{k}b"): int(c) for v, c in zip(uniq, cnt)}


def sample(
    probs: Mapping[str, float],
    shots: int,
    seed: int | None = None,
    readout_flip_p: float = 0.0,
) -> dict[str, int]:
    """Draw ``shots`` outcomes from a distribution, then apply readout noise.

    Each measured bit of each shot flips independently with probability
    ``readout_flip_p``.  Deterministic for a fixed seed.
    """
    if shots < 1:
        raise ValueError("shots must be >= 1")
    if not (0.0 <= readout_flip_p <= 1.0):
        raise ValueError(f"readout_flip_p must be in [0, 1], got {readout_flip_p}")
    if not probs:
        raise InvalidDistribution("empty distribution")
    keys = sorted(probs)
    k = len(keys[0])
    if any(len(key) != k for key in keys):
        raise InvalidDistribution("outcome bitstrings must share one length")
    if any(set(key) - {"0", "1"} for key in keys):
        raise InvalidDistribution("outcomes must be bitstrings")
    weights = np.array([probs[key] for key in keys], dtype=float)
    if np.any(weights < -1e-12):
        raise InvalidDistribution("negative probability")
    total = float(weights.sum())
    if abs(total - 1.0) > 1e-9:
        raise InvalidDistribution(f"probabilities sum to {total}, expected 1")

    rng = np.random.default_rng(seed)
    weights = np.clip(weights, 0.0, None)
    weights /= weights.sum()
    outcome_ints = np.array([int(key, 2) for key in keys], dtype=np.int64)
    drawn = outcome_ints[rng.choice(len(keys), size=shots, p=weights)]
    if readout_flip_p > 0.0:
        drawn = drawn ^ _flip_values(rng, shots, k, readout_flip_p)
    return _counts_from_ints(drawn, k)


def execute(
    circuit: Circuit,
    shots: int,
    seed: int | None = None,
    readout_flip_p: float = 0.0,
    backend_name: str = "local",
) -> ExecutionResult:
    """Run + sample in one step; the path providers use for every job.

    A missing seed is drawn from system entropy and recorded in the result so
    any execution can be reproduced later.
    """
    if shots < 1:
        raise ValueError("shots must be >= 1")
    if not (0.0 <= readout_flip_p <= 1.0):
        raise ValueError(f"readout_flip_p must be in [0, 1], got {readout_flip_p}")
    used_seed = seed if seed is not None else secrets.randbits(63)
    started = time.perf_counter()

    state = run(circuit)
    qubits = sorted(circuit.measured, reverse=True)
    k = len(qubits)
    weights = _marginal(state.amplitudes, state.n, qubits)
    weights = np.clip(weights, 0.0, None)
    weights /= weights.sum()

    rng = np.random.default_rng(used_seed)
    drawn = rng.choice(weights.size, size=shots, p=weights).astype(np.int64)
    if readout_flip_p > 0.0:
        drawn = drawn ^ _flip_values(rng, shots, k, readout_flip_p)
    counts = _counts_from_ints(drawn, k)

    duration_ms = (time.perf_counter() - started) * 1000.0
    return ExecutionResult(counts, shots, used_seed, duration_ms, backend_name)
