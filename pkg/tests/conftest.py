"""Shared oracles: dense-matrix references built from Kronecker products,
plus seeded random circuit/observable generators.

The oracles never touch the stride-based kernels they check: gates are
embedded into full 2^n x 2^n matrices and applied by plain matrix-vector
multiplication.
"""

import numpy as np
import pytest

from vqckit import AngleExpression, Circuit, Gate, GateKind, Observable, ParameterSet

I2 = np.eye(2, dtype=complex)
PAULI = {
    "I": I2,
    "X": np.array([[0, 1], [1, 0]], dtype=complex),
    "Y": np.array([[0, -1j], [1j, 0]], dtype=complex),
    "Z": np.array([[1, 0], [0, -1]], dtype=complex),
}
P0 = np.array([[1, 0], [0, 0]], dtype=complex)
P1 = np.array([[0, 0], [0, 1]], dtype=complex)
H_MATRIX = np.array([[1, 1], [1, -1]], dtype=complex) / np.sqrt(2)


def rotation_matrix(axis: str, theta: float) -> np.ndarray:
    return (np.cos(theta / 2) * I2 - 1j * np.sin(theta / 2) * PAULI[axis])


def embed(factors: dict[int, np.ndarray], num_qubits: int) -> np.ndarray:
    """kron-embed single-qubit matrices; qubit 0 is the least significant
    bit, i.e. the rightmost Kronecker factor."""
    out = np.array([[1.0 + 0j]])
    for q in range(num_qubits - 1, -1, -1):
        out = np.kron(out, factors.get(q, I2))
    return out


def gate_matrix(kind: GateKind, qubits, angle, num_qubits: int) -> np.ndarray:
    if kind == GateKind.RX:
        return embed({qubits[0]: rotation_matrix("X", angle)}, num_qubits)
    if kind == GateKind.RY:
        return embed({qubits[0]: rotation_matrix("Y", angle)}, num_qubits)
    if kind == GateKind.RZ:
        return embed({qubits[0]: rotation_matrix("Z", angle)}, num_qubits)
    if kind == GateKind.H:
        return embed({qubits[0]: H_MATRIX}, num_qubits)
    if kind == GateKind.X:
        return embed({qubits[0]: PAULI["X"]}, num_qubits)
    if kind == GateKind.CNOT:
        control, target = qubits
        return (embed({control: P0}, num_qubits)
                + embed({control: P1, target: PAULI["X"]}, num_qubits))
    raise AssertionError(kind)


def pauli_string_matrix(string: str) -> np.ndarray:
    return embed({q: PAULI[letter] for q, letter in enumerate(string)},
                 len(string))


def observable_matrix(obs: Observable) -> np.ndarray:
    dim = 1 << obs.num_qubits
    out = np.zeros((dim, dim), dtype=complex)
    for coeff, string in obs.terms:
        out += coeff * pauli_string_matrix(string)
    return out


def dense_evolve(circuit: Circuit, binding: dict) -> np.ndarray:
    """Reference evolution by full-matrix products."""
    from vqckit import evaluate_expression
    state = np.zeros(1 << circuit.num_qubits, dtype=complex)
    state[0] = 1.0
    for gate in circuit.gates:
        angle = (evaluate_expression(gate.expr, binding)
                 if gate.expr is not None else None)
        state = gate_matrix(gate.kind, gate.qubits, angle,
                            circuit.num_qubits) @ state
    return state


def random_state(rng: np.random.Generator, num_qubits: int) -> np.ndarray:
    state = rng.normal(size=1 << num_qubits) + 1j * rng.normal(size=1 << num_qubits)
    return state / np.linalg.norm(state)


def random_observable(rng: np.random.Generator, num_qubits: int,
                      max_terms: int = 3) -> Observable:
    n_terms = int(rng.integers(1, max_terms + 1))
    terms = []
    for _ in range(n_terms):
        string = "".join(rng.choice(list("IXYZ")) for _ in range(num_qubits))
        terms.append((float(rng.uniform(-2, 2)), string))
    return Observable(tuple(terms))


def random_circuit(rng: np.random.Generator, num_qubits: int, n_gates: int,
                   sets=None) -> tuple[Circuit, dict]:
    """Random circuit over all gate kinds with product expressions that
    reuse parameters across gates (shared-parameter coverage)."""
    if sets is None:
        sets = (ParameterSet("s", 3, "encoding"),
                ParameterSet("theta", 4, "trainable"),
                ParameterSet("lam", 2, "trainable"))
    kinds = list(GateKind)
    gates = []
    for _ in range(n_gates):
        kind = kinds[rng.integers(0, len(kinds))]
        if kind == GateKind.CNOT:
            if num_qubits < 2:
                kind = GateKind.H
                qubits = (int(rng.integers(0, num_qubits)),)
            else:
                q = rng.choice(num_qubits, size=2, replace=False)
                qubits = (int(q[0]), int(q[1]))
        else:
            qubits = (int(rng.integers(0, num_qubits)),)
        expr = None
        if kind.is_rotation:
            choices = [(s.name, int(rng.integers(0, s.size)))
                       for s in sets for _ in range(2)]
            n_factors = int(rng.integers(0, 3))
            refs = []
            for _ in range(n_factors):
                ref = choices[rng.integers(0, len(choices))]
                if ref not in refs:
                    refs.append(ref)
            expr = AngleExpression(float(rng.uniform(-2, 2)), tuple(refs))
        gates.append(Gate(kind, qubits, expr))
    circuit = Circuit(num_qubits, tuple(gates), tuple(sets))
    binding = {s.name: rng.uniform(-1.5, 1.5, s.size) for s in sets}
    return circuit, binding


@pytest.fixture
def rng():
    return np.random.default_rng(20240831)
