"""Dense statevector kernel: state creation, gate application, Pauli action.

A state is a 1-D ``complex128`` array of 2^n amplitudes. Qubit q indexes bit q
of the basis-state integer (little-endian: qubit 0 is the least significant
bit), so the string "ZI" puts Z on qubit 0. Gate application mutates the array
in place via stride-paired index arithmetic; no temporaries of state size are
allocated. Global phase is never normalized away.

Rotation convention: U(theta) = exp(-i * theta * P / 2) for generator
P in {X, Y, Z}, hence dU/dtheta = -(i/2) P U(theta).
"""

from __future__ import annotations

import enum

import numpy as np

from . import _kernels

MAX_QUBITS = 24

_PAULI_LETTERS = "IXYZ"


class GateKind(enum.IntEnum):
    """Supported gates; integer values match the kernel gate codes."""

    RX = _kernels.RX
    RY = _kernels.RY
    RZ = _kernels.RZ
    CNOT = _kernels.CNOT
    H = _kernels.H
    X = _kernels.X

    @property
    def is_rotation(self) -> bool:
        return self.value <= _kernels.RZ

    @property
    def num_qubits(self) -> int:
        return 2 if self is GateKind.CNOT else 1

    @property
    def generator_axis(self) -> int:
        """Pauli axis code of the rotation generator, -1 for non-rotations."""
        return self.value if self.is_rotation else -1


def zero_state(num_qubits: int) -> np.ndarray:
    """Return |0...0> on ``num_qubits`` qubits."""
    if not 1 <= num_qubits <= MAX_QUBITS:
        raise ValueError(
            f"num_qubits must be in [1, {MAX_QUBITS}], got {num_qubits}")
    state = np.zeros(1 << num_qubits, dtype=np.complex128)
    state[0] = 1.0
    return state


def num_qubits_of(state: np.ndarray) -> int:
    n = int(np.log2(state.shape[0]))
    if (1 << n) != state.shape[0]:
        raise ValueError(f"state length {state.shape[0]} is not a power of 2")
    return n


def _check_gate_args(state, kind, qubits, angle):
    n = num_qubits_of(state)
    kind = GateKind(kind)
    if len(qubits) != kind.num_qubits:
        raise ValueError(f"{kind.name} acts on {kind.num_qubits} qubit(s), "
                         f"got {len(qubits)}")
    if len(set(qubits)) != len(qubits):
        raise ValueError(f"qubit indices must be distinct, got {list(qubits)}")
    for q in qubits:
        if not 0 <= q < n:
            raise IndexError(f"qubit {q} out of range for {n}-qubit state")
    if kind.is_rotation:
        if angle is None:
            raise ValueError(f"{kind.name} requires an angle")
    elif angle is not None:
        raise ValueError(f"{kind.name} takes no angle")
    return n, kind


def apply_gate(state: np.ndarray, kind: GateKind, qubits, angle: float | None = None) -> np.ndarray:
    """Apply a gate in place; returns the same array. For CNOT, ``qubits`` is
    (control, target)."""
    _, kind = _check_gate_args(state, kind, qubits, angle)
    q1 = qubits[1] if len(qubits) > 1 else 0
    _kernels.apply_coded(state, int(kind), qubits[0], q1,
                         0.0 if angle is None else float(angle))
    return state


def apply_gate_adjoint(state: np.ndarray, kind: GateKind, qubits, angle: float | None = None) -> np.ndarray:
    """Apply the adjoint (inverse) of a gate in place."""
    _, kind = _check_gate_args(state, kind, qubits, angle)
    q1 = qubits[1] if len(qubits) > 1 else 0
    _kernels.apply_coded_adjoint(state, int(kind), qubits[0], q1,
                                 0.0 if angle is None else float(angle))
    return state


def pauli_masks(pauli_string: str) -> tuple[int, int, complex]:
    """Compile a Pauli string to (x_mask, sign_mask, phase).

    P|b> = phase * (-1)^popcount(b & sign_mask) |b ^ x_mask> with
    phase = i^(#Y). Character k of the string acts on qubit k.
    """
    x_mask = 0
    sign_mask = 0
    n_y = 0
    for q, letter in enumerate(pauli_string):
        if letter == "I":
            continue
        if letter == "X":
            x_mask |= 1 << q
        elif letter == "Y":
            x_mask |= 1 << q
            sign_mask |= 1 << q
            n_y += 1
        elif letter == "Z":
            sign_mask |= 1 << q
        else:
            raise ValueError(
                f"invalid Pauli letter {letter!r} in {pauli_string!r}")
    return x_mask, sign_mask, 1j ** (n_y % 4)


def apply_pauli(state: np.ndarray, pauli_string: str) -> np.ndarray:
    """Return P|state> as a new array; the input is untouched."""
    n = num_qubits_of(state)
    if len(pauli_string) != n:
        raise ValueError(f"Pauli string length {len(pauli_string)} != "
                         f"{n} qubits")
    x_mask, sign_mask, phase = pauli_masks(pauli_string)
    out = np.empty_like(state)
    _kernels.pauli_string_apply(out, state, x_mask, sign_mask, phase)
    return out


def inner_product(bra: np.ndarray, ket: np.ndarray) -> complex:
    """<bra|ket> = sum_j conj(bra_j) ket_j."""
    if bra.shape != ket.shape:
        raise ValueError(f"dimension mismatch: {bra.shape} vs {ket.shape}")
    return complex(_kernels.vdot(bra, ket))
