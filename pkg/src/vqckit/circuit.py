"""Parameterized circuits: named parameter sets, angle expressions, evolution.

Angles are scaled products of distinct parameter references, which covers
plain trainable angles as well as trainable-scaling-times-data products while
keeping differentiation closed form. Value assignment is always by (set name,
index) lookup into the binding, never by any sorted order of names, so
renaming a set (with a matching binding key) can never change results.

Circuits are immutable after construction and freely shareable across
threads.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass

import numpy as np

from . import _kernels
from .instrument import sweep_counters
from .statevector import GateKind, zero_state

ROLES = ("encoding", "trainable")

ParamRef = tuple[str, int]


@dataclass(frozen=True)
class ParameterSet:
    name: str
    size: int
    role: str = "trainable"

    def __post_init__(self):
        if self.size < 0:
            raise ValueError(f"set {self.name!r}: size must be >= 0")
        if self.role not in ROLES:
            raise ValueError(f"set {self.name!r}: role must be one of {ROLES}")


@dataclass(frozen=True)
class AngleExpression:
    """coefficient * product of parameter references (each at most once)."""

    coefficient: float
    factors: tuple[ParamRef, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "factors", tuple(
            (str(s), int(i)) for s, i in self.factors))
        if len(set(self.factors)) != len(self.factors):
            raise ValueError(f"duplicate parameter reference in {self.factors}")


@dataclass(frozen=True)
class Gate:
    kind: GateKind
    qubits: tuple[int, ...]
    expr: AngleExpression | None = None

    def __post_init__(self):
        object.__setattr__(self, "qubits", tuple(int(q) for q in self.qubits))


@dataclass(frozen=True)
class Circuit:
    num_qubits: int
    gates: tuple[Gate, ...]
    parameter_sets: tuple[ParameterSet, ...]

    def __post_init__(self):
        object.__setattr__(self, "gates", tuple(self.gates))
        object.__setattr__(self, "parameter_sets", tuple(self.parameter_sets))
        names = [s.name for s in self.parameter_sets]
        if len(set(names)) != len(names):
            raise ValueError(f"duplicate parameter-set names: {names}")
        sets = {s.name: s for s in self.parameter_sets}
        for g, gate in enumerate(self.gates):
            kind = GateKind(gate.kind)
            if kind.is_rotation != (gate.expr is not None):
                raise ValueError(
                    f"gate {g} ({kind.name}): rotations need an expression, "
                    "other gates must not have one")
            if len(gate.qubits) != kind.num_qubits:
                raise ValueError(f"gate {g} ({kind.name}): wrong qubit count")
            if len(set(gate.qubits)) != len(gate.qubits):
                raise ValueError(f"gate {g}: duplicate qubit indices")
            for q in gate.qubits:
                if not 0 <= q < self.num_qubits:
                    raise IndexError(f"gate {g}: qubit {q} out of range")
            if gate.expr is not None:
                for name, idx in gate.expr.factors:
                    if name not in sets:
                        raise ValueError(
                            f"gate {g}: unknown parameter set {name!r}")
                    if not 0 <= idx < sets[name].size:
                        raise IndexError(
                            f"gate {g}: index {idx} out of range for set "
                            f"{name!r} of size {sets[name].size}")

    def set_named(self, name: str) -> ParameterSet:
        for s in self.parameter_sets:
            if s.name == name:
                return s
        raise KeyError(f"no parameter set named {name!r}")

    def sets_with_role(self, role: str) -> list[ParameterSet]:
        return [s for s in self.parameter_sets if s.role == role]

    def compiled(self) -> "CompiledCircuit":
        cached = getattr(self, "_compiled", None)
        if cached is None:
            cached = CompiledCircuit.from_circuit(self)
            object.__setattr__(self, "_compiled", cached)
        return cached


def validate_binding(circuit: Circuit, binding: dict[str, np.ndarray]) -> None:
    """A binding must cover every declared set exactly."""
    declared = {s.name for s in circuit.parameter_sets}
    given = set(binding)
    if given != declared:
        missing = declared - given
        extra = given - declared
        parts = []
        if missing:
            parts.append(f"missing sets {sorted(missing)}")
        if extra:
            parts.append(f"unknown sets {sorted(extra)}")
        raise ValueError("binding does not match circuit: " + ", ".join(parts))
    for s in circuit.parameter_sets:
        values = np.asarray(binding[s.name], dtype=np.float64)
        if values.shape != (s.size,):
            raise ValueError(f"set {s.name!r}: expected {s.size} values, "
                             f"got shape {values.shape}")


def evaluate_expression(expr: AngleExpression, binding: dict[str, np.ndarray]) -> float:
    value = expr.coefficient
    for name, idx in expr.factors:
        try:
            value *= float(binding[name][idx])
        except (KeyError, IndexError) as exc:
            raise ValueError(f"unresolved reference {name}[{idx}]") from exc
    return value


def expression_partial(expr: AngleExpression, wrt: ParamRef,
                       binding: dict[str, np.ndarray]) -> float:
    """Product-rule derivative of the expression; 0 when ``wrt`` is absent."""
    wrt = (str(wrt[0]), int(wrt[1]))
    if wrt not in expr.factors:
        return 0.0
    value = expr.coefficient
    for ref in expr.factors:
        if ref == wrt:
            continue
        name, idx = ref
        try:
            value *= float(binding[name][idx])
        except (KeyError, IndexError) as exc:
            raise ValueError(f"unresolved reference {name}[{idx}]") from exc
    return value


@dataclass(frozen=True)
class CompiledCircuit:
    """Flat arrays consumed by the numba kernels.

    Parameters live in one flat vector laid out by set declaration order;
    ``offsets`` maps set name -> (offset, size).
    """

    num_qubits: int
    kinds: np.ndarray
    q0: np.ndarray
    q1: np.ndarray
    gen_axis: np.ndarray
    coeff: np.ndarray
    f_offs: np.ndarray
    f_idx: np.ndarray
    offsets: dict[str, tuple[int, int]]
    total_params: int

    @staticmethod
    def from_circuit(circuit: Circuit) -> "CompiledCircuit":
        offsets: dict[str, tuple[int, int]] = {}
        total = 0
        for s in circuit.parameter_sets:
            offsets[s.name] = (total, s.size)
            total += s.size
        n_gates = len(circuit.gates)
        kinds = np.empty(n_gates, dtype=np.int64)
        q0 = np.zeros(n_gates, dtype=np.int64)
        q1 = np.zeros(n_gates, dtype=np.int64)
        gen_axis = np.empty(n_gates, dtype=np.int64)
        coeff = np.ones(n_gates, dtype=np.float64)
        f_offs = np.zeros(n_gates + 1, dtype=np.int64)
        f_idx_list: list[int] = []
        for g, gate in enumerate(circuit.gates):
            kind = GateKind(gate.kind)
            kinds[g] = int(kind)
            q0[g] = gate.qubits[0]
            if len(gate.qubits) > 1:
                q1[g] = gate.qubits[1]
            gen_axis[g] = kind.generator_axis
            if gate.expr is not None:
                coeff[g] = gate.expr.coefficient
                for name, idx in gate.expr.factors:
                    f_idx_list.append(offsets[name][0] + idx)
            f_offs[g + 1] = len(f_idx_list)
        f_idx = np.asarray(f_idx_list, dtype=np.int64)
        return CompiledCircuit(circuit.num_qubits, kinds, q0, q1, gen_axis,
                               coeff, f_offs, f_idx, offsets, total)

    def flat_values(self, binding: dict[str, np.ndarray]) -> np.ndarray:
        flat = np.empty(self.total_params, dtype=np.float64)
        for name, (off, size) in self.offsets.items():
            flat[off:off + size] = np.asarray(binding[name], dtype=np.float64)
        return flat

    def angles(self, flat: np.ndarray) -> np.ndarray:
        out = np.empty(len(self.kinds), dtype=np.float64)
        _kernels.compute_angles(self.coeff, self.f_offs, self.f_idx, flat, out)
        return out

    def run_angles(self, angles: np.ndarray) -> np.ndarray:
        """One forward evolution of |0...0> with pre-evaluated angles."""
        state = zero_state(self.num_qubits)
        sweep_counters.add_forward()
        _kernels.run_program(state, self.kinds, self.q0, self.q1, angles)
        return state

    def run(self, flat: np.ndarray) -> np.ndarray:
        """One forward evolution of |0...0> under the bound circuit."""
        return self.run_angles(self.angles(flat))


def evolve(circuit: Circuit, binding: dict[str, np.ndarray]) -> np.ndarray:
    """Apply the circuit's gates in declared order to the zero state."""
    validate_binding(circuit, binding)
    compiled = circuit.compiled()
    return compiled.run(compiled.flat_values(binding))


def build_reuploading_ansatz(num_qubits: int, depth: int,
                             num_features: int) -> Circuit:
    """Data re-uploading ansatz with trainable input scaling.

    Declares sets s (encoding, size num_features), theta (trainable, size
    2*n*depth), lambda (trainable, size n*depth). Layer l applies, per qubit
    q with k = l*n + q: RX(lambda[k] * s[k mod num_features]), RY(theta[2k]),
    RZ(theta[2k+1]); then CNOTs on the open line (q, q+1). Feature indices
    wrap modulo num_features when there are more encoding slots than
    features.
    """
    if num_qubits < 1:
        raise ValueError("num_qubits must be >= 1")
    if depth < 1:
        raise ValueError("depth must be >= 1")
    if num_features < 1:
        raise ValueError("num_features must be >= 1")
    n = num_qubits
    sets = (
        ParameterSet("s", num_features, "encoding"),
        ParameterSet("theta", 2 * n * depth, "trainable"),
        ParameterSet("lambda", n * depth, "trainable"),
    )
    gates: list[Gate] = []
    for layer in range(depth):
        for q in range(n):
            k = layer * n + q
            gates.append(Gate(GateKind.RX, (q,), AngleExpression(
                1.0, (("lambda", k), ("s", k % num_features)))))
            gates.append(Gate(GateKind.RY, (q,), AngleExpression(
                1.0, (("theta", 2 * k),))))
            gates.append(Gate(GateKind.RZ, (q,), AngleExpression(
                1.0, (("theta", 2 * k + 1),))))
        for q in range(n - 1):
            gates.append(Gate(GateKind.CNOT, (q, q + 1)))
    return Circuit(n, tuple(gates), sets)


# -- circuit text format ------------------------------------------------------

_REF_RE = re.compile(r"^(?P<set>[^\[\]]+)\[(?P<idx>\d+)\]$")


def _ref_from_text(text: str) -> ParamRef:
    m = _REF_RE.match(text.strip())
    if m is None:
        raise ValueError(f"malformed parameter reference {text!r}")
    return m.group("set"), int(m.group("idx"))


def circuit_to_dict(circuit: Circuit) -> dict:
    gates = []
    for gate in circuit.gates:
        entry: dict = {"kind": GateKind(gate.kind).name,
                       "qubits": list(gate.qubits)}
        if gate.expr is not None:
            entry["expr"] = {
                "coeff": gate.expr.coefficient,
                "factors": [f"{name}[{idx}]" for name, idx in gate.expr.factors],
            }
        gates.append(entry)
    return {
        "num_qubits": circuit.num_qubits,
        "parameter_sets": [
            {"name": s.name, "size": s.size, "role": s.role}
            for s in circuit.parameter_sets
        ],
        "gates": gates,
    }


def circuit_from_dict(data: dict) -> Circuit:
    try:
        sets = tuple(ParameterSet(d["name"], int(d["size"]), d["role"])
                     for d in data["parameter_sets"])
        gates = []
        for d in data["gates"]:
            kind = GateKind[d["kind"]]
            expr = None
            if d.get("expr") is not None:
                e = d["expr"]
                expr = AngleExpression(
                    float(e["coeff"]),
                    tuple(_ref_from_text(t) for t in e["factors"]))
            gates.append(Gate(kind, tuple(d["qubits"]), expr))
        return Circuit(int(data["num_qubits"]), tuple(gates), sets)
    except KeyError as exc:
        raise ValueError(f"circuit document missing field {exc}") from exc


def save_circuit(circuit: Circuit, path) -> None:
    with open(path, "w") as fh:
        json.dump(circuit_to_dict(circuit), fh, indent=2)
        fh.write("\n")


def load_circuit(path) -> Circuit:
    with open(path) as fh:
        return circuit_from_dict(json.load(fh))
