"""Shared test utilities: independent oracles and random-circuit generators.

The dense oracle here deliberately re-derives everything from scratch (full
2^n gate unitaries assembled with numpy.kron tensor products) so it shares no
code path with the engine it checks.
"""

from __future__ import annotations

import math
import random

import numpy as np

from qfaas.circuit import Circuit, GateKind, GateOp

_I2 = np.eye(2, dtype=complex)
_P0 = np.array([[1, 0], [0, 0]], dtype=complex)
_P1 = np.array([[0, 0], [0, 1]], dtype=complex)

_SQ = {
    "h": np.array([[1, 1], [1, -1]], dtype=complex) / math.sqrt(2),
    "x": np.array([[0, 1], [1, 0]], dtype=complex),
    "y": np.array([[0, -1j], [1j, 0]], dtype=complex),
    "z": np.array([[1, 0], [0, -1]], dtype=complex),
    "s": np.array([[1, 0], [0, 1j]], dtype=complex),
    "t": np.array([[1, 0], [0, np.exp(1j * math.pi / 4)]], dtype=complex),
}


def _sq_matrix(op: GateOp) -> np.ndarray:
    name = op.kind.value
    if name in _SQ:
        return _SQ[name]
    th = op.angle
    c, s = math.cos(th / 2), math.sin(th / 2)
    if name == "rx":
        return np.array([[c, -1j * s], [-1j * s, c]], dtype=complex)
    if name == "ry":
        return np.array([[c, -s], [s, c]], dtype=complex)
    if name == "rz":
        return np.array([[np.exp(-0.5j * th), 0], [0, np.exp(0.5j * th)]], dtype=complex)
    raise AssertionError(name)


def _embed(n: int, placements: dict[int, np.ndarray]) -> np.ndarray:
    """Tensor product with the given single-qubit factors at those qubits.

    Qubit 0 is least significant, so the kron chain runs from qubit n-1 down.
    """
    out = np.array([[1.0 + 0j]])
    for q in range(n - 1, -1, -1):
        out = np.kron(out, placements.get(q, _I2))
    return out


def dense_gate_unitary(op: GateOp, n: int) -> np.ndarray:
    """Full 2^n unitary of one gate, via projector/tensor-product algebra."""
    if len(op.targets) == 1:
        return _embed(n, {op.targets[0]: _sq_matrix(op)})
    a, b = op.targets
    if op.kind is GateKind.CX:
        return _embed(n, {a: _P0}) + _embed(n, {a: _P1, b: _SQ["x"]})
    if op.kind is GateKind.CZ:
        return _embed(n, {a: _P0}) + _embed(n, {a: _P1, b: _SQ["z"]})
    if op.kind is GateKind.SWAP:
        return 0.5 * (
            _embed(n, {})
            + _embed(n, {a: _SQ["x"], b: _SQ["x"]})
            + _embed(n, {a: _SQ["y"], b: _SQ["y"]})
            + _embed(n, {a: _SQ["z"], b: _SQ["z"]})
        )
    raise AssertionError(op.kind)


def oracle_statevector(circuit: Circuit) -> np.ndarray:
    """Evolve |0...0> by multiplying full gate matrices, gate by gate."""
    psi = np.zeros(2**circuit.width, dtype=complex)
    psi[0] = 1.0
    for op in circuit.ops:
        psi = dense_gate_unitary(op, circuit.width) @ psi
    return psi


_SINGLE = [GateKind.H, GateKind.X, GateKind.Y, GateKind.Z, GateKind.S, GateKind.T]
_ROT = [GateKind.RX, GateKind.RY, GateKind.RZ]
_TWO = [GateKind.CX, GateKind.CZ, GateKind.SWAP]


def random_circuit(
    rng: random.Random,
    max_width: int = 3,
    max_gates: int = 10,
    min_width: int = 1,
) -> Circuit:
    """Uniformly messy random circuit with all qubits measured."""
    width = rng.randint(min_width, max_width)
    ops = []
    for _ in range(rng.randint(0, max_gates)):
        roll = rng.random()
        if roll < 0.45 or width < 2:
            kind = rng.choice(_SINGLE)
            ops.append(GateOp(kind, (rng.randrange(width),)))
        elif roll < 0.7:
            kind = rng.choice(_ROT)
            ops.append(GateOp(kind, (rng.randrange(width),), rng.uniform(-2 * math.pi, 2 * math.pi)))
        else:
            kind = rng.choice(_TWO)
            a, b = rng.sample(range(width), 2)
            ops.append(GateOp(kind, (a, b)))
    return Circuit(width, tuple(ops), frozenset(range(width)))
