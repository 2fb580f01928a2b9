"""Benchmark and verification runners behind the command-line front end.

Timed regions wrap only the forward/backward batch calls; circuit
construction, parameter initialization and JIT warm-up happen outside the
timers. Every CSV artifact starts with comment lines recording the seed and
configuration so results can be reproduced exactly.
"""

from __future__ import annotations

import csv
import time
from dataclasses import dataclass, field

import numpy as np

from . import _kernels
from .batch import BatchEngine, BatchRequest
from .circuit import build_reuploading_ansatz, load_circuit
from .gradients import (adjoint_gradients, finite_difference_gradients,
                        parameter_shift_gradients, spsa_gradients)
from .observables import Observable, parse_observable

CSV_COLUMNS = ["qubits", "depth", "batch", "observables", "method", "threads",
               "forward", "forward_min", "forward_max",
               "backward", "backward_min", "backward_max",
               "total", "total_min", "total_max"]


@dataclass
class BenchConfig:
    mode: str = "bench"
    qubits: int = 12
    depth: int = 3
    batch: int = 48
    observables: int | None = None      # default: one Z per qubit
    method: str = "adjoint"
    threads: int | None = None
    repeats: int = 10
    seed: int = 0
    output: str | None = None
    compare_naive: bool = False
    circuit_file: str | None = None
    observable_texts: tuple[str, ...] = ()
    spsa_samples: int = 2000
    spsa_c: float = 0.01

    def __post_init__(self):
        if self.repeats < 1:
            raise ValueError(f"repeats must be >= 1, got {self.repeats}")


def default_observables(num_qubits: int, count: int) -> list[Observable]:
    """Single-qubit Z observables; qubit index cycles when count > qubits."""
    out = []
    for i in range(count):
        string = ["I"] * num_qubits
        string[i % num_qubits] = "Z"
        out.append(Observable(((1.0, "".join(string)),)))
    return out


def _materialize(config: BenchConfig):
    """Circuit, observables, trainable binding and inputs for a config."""
    if config.circuit_file:
        circuit = load_circuit(config.circuit_file)
    else:
        circuit = build_reuploading_ansatz(config.qubits, config.depth,
                                           num_features=config.qubits)
    if config.observable_texts:
        observables = [parse_observable(t) for t in config.observable_texts]
    else:
        m = config.observables if config.observables is not None else circuit.num_qubits
        observables = default_observables(circuit.num_qubits, m)
    rng = np.random.default_rng(config.seed)
    trainable = {s.name: rng.uniform(0.0, 2.0 * np.pi, s.size)
                 for s in circuit.sets_with_role("trainable")}
    encoding = circuit.sets_with_role("encoding")
    if len(encoding) != 1:
        raise ValueError("benchmark circuit needs exactly one encoding set")
    inputs = rng.uniform(-1.0, 1.0, (config.batch, encoding[0].size))
    return circuit, observables, trainable, inputs


@dataclass
class BenchRecord:
    config: BenchConfig
    threads_used: int
    forward: tuple[float, float, float]    # mean, min, max
    backward: tuple[float, float, float]
    total: tuple[float, float, float]
    extras: dict[str, float] = field(default_factory=dict)

    def csv_row(self) -> list:
        c = self.config
        if c.observable_texts:
            m = len(c.observable_texts)
        else:
            m = c.observables if c.observables is not None else c.qubits
        return [c.qubits, c.depth, c.batch, m, c.method, self.threads_used,
                *(repr(v) for v in self.forward),
                *(repr(v) for v in self.backward),
                *(repr(v) for v in self.total)]


def _stats(times) -> tuple[float, float, float]:
    return float(np.mean(times)), float(np.min(times)), float(np.max(times))


def _time_batches(engine, request_fwd, request_bwd, repeats):
    fwd, bwd = [], []
    for _ in range(repeats):
        t0 = time.perf_counter()
        engine.run_batch(request_fwd)
        t1 = time.perf_counter()
        engine.run_batch(request_bwd)
        t2 = time.perf_counter()
        fwd.append(t1 - t0)
        bwd.append(t2 - t1)
    total = [f + b for f, b in zip(fwd, bwd)]
    return fwd, bwd, total


def run_bench(config: BenchConfig, echo=print) -> BenchRecord:
    _kernels.warm_up()
    circuit, observables, trainable, inputs = _materialize(config)
    wrt = tuple(s.name for s in circuit.sets_with_role("trainable"))
    engine = BatchEngine(config.threads)

    def request(wrt_sets, threads=None):
        return BatchRequest(circuit=circuit, observables=observables,
                            trainable_values=trainable, inputs=inputs,
                            method=config.method, wrt=wrt_sets,
                            threads=threads, seed=config.seed,
                            spsa_samples=max(1, config.spsa_samples // 10),
                            spsa_c=config.spsa_c)

    # one untimed run to settle caches and JIT specializations
    engine.run_batch(request(()))
    engine.run_batch(request(wrt))

    fwd, bwd, total = _time_batches(engine, request(()), request(wrt),
                                    config.repeats)
    record = BenchRecord(config, engine.threads, _stats(fwd), _stats(bwd),
                         _stats(total))
    echo(f"forward  mean={record.forward[0]:.6f}s "
         f"min={record.forward[1]:.6f}s max={record.forward[2]:.6f}s")
    echo(f"backward mean={record.backward[0]:.6f}s "
         f"min={record.backward[1]:.6f}s max={record.backward[2]:.6f}s")

    if config.compare_naive:
        m = len(observables)
        # sequential joint evaluation (T=1)
        t0 = time.perf_counter()
        engine.run_batch(request((), threads=1))
        joint_seq = time.perf_counter() - t0
        # naive per-observable loop: the state is re-evolved for every
        # observable, which is what the joint path avoids
        t0 = time.perf_counter()
        for obs in observables:
            engine.run_batch(BatchRequest(
                circuit=circuit, observables=[obs], trainable_values=trainable,
                inputs=inputs, method=config.method, wrt=(), threads=1))
        naive_seq = time.perf_counter() - t0
        record.extras["forward_joint_seq"] = joint_seq
        record.extras["forward_naive_seq"] = naive_seq
        record.extras["factor_forward_naive"] = naive_seq / joint_seq
        record.extras["factor_forward_threads"] = joint_seq / record.forward[0]
        echo(f"naive {m}-loop forward (T=1): {naive_seq:.6f}s; joint (T=1): "
             f"{joint_seq:.6f}s; improvement factor "
             f"{record.extras['factor_forward_naive']:.2f}")
    return record


def write_csv(records, path, seed: int) -> None:
    with open(path, "w", newline="") as fh:
        fh.write(f"# seed={seed}\n")
        for record in records:
            for key, value in record.extras.items():
                fh.write(f"# {key}={value!r}\n")
        writer = csv.writer(fh)
        writer.writerow(CSV_COLUMNS)
        for record in records:
            writer.writerow(record.csv_row())


def read_csv(path) -> list[dict]:
    with open(path) as fh:
        rows = [line for line in fh if not line.startswith("#")]
    return list(csv.DictReader(rows))


# -- gradient cross-check ------------------------------------------------------

ADJOINT_VS_SHIFT_TOL = 1e-9
VS_FD_TOL = 1e-5
SPSA_REL_TOL = 0.10
SPSA_MIN_MAGNITUDE = 0.1


def run_grad_check(config: BenchConfig, echo=print) -> tuple[bool, list[str]]:
    """Three-way gradient agreement on the configured ansatz.

    adjoint vs parameter-shift within 1e-9 and both vs central finite
    differences within 1e-5; with method spsa, the stochastic estimate must
    land within 10% on components larger than 0.1.
    """
    if config.qubits > 10:
        raise ValueError("grad-check is limited to 10 qubits")
    _kernels.warm_up()
    circuit, observables, trainable, inputs = _materialize(config)
    encoding = circuit.sets_with_role("encoding")[0]
    binding = dict(trainable)
    binding[encoding.name] = inputs[0]
    wrt = tuple(s.name for s in circuit.sets_with_role("trainable"))

    adj = adjoint_gradients(circuit, binding, observables, wrt)
    shift = parameter_shift_gradients(circuit, binding, observables, wrt)
    fd = finite_difference_gradients(circuit, binding, observables, wrt)

    failures: list[str] = []

    def compare(label, got, reference, tol):
        for name in wrt:
            diff = np.abs(got.gradients[name] - reference.gradients[name])
            worst = float(diff.max(initial=0.0))
            if worst > tol:
                i, p = np.unravel_index(diff.argmax(), diff.shape)
                failures.append(
                    f"{label}: set {name!r} entry (obs {i}, param {p}) "
                    f"differs by {worst:.3e} (tol {tol:g}); "
                    f"{got.gradients[name][i, p]!r} vs "
                    f"{reference.gradients[name][i, p]!r}")

    compare("adjoint vs param-shift", adj, shift, ADJOINT_VS_SHIFT_TOL)
    compare("adjoint vs finite-diff", adj, fd, VS_FD_TOL)
    compare("param-shift vs finite-diff", shift, fd, VS_FD_TOL)

    if config.method == "spsa":
        est = spsa_gradients(circuit, binding, observables, wrt,
                             c=config.spsa_c, samples=config.spsa_samples,
                             seed=config.seed)
        for name in wrt:
            ref = adj.gradients[name]
            got = est.gradients[name]
            mask = np.abs(ref) > SPSA_MIN_MAGNITUDE
            bad = np.abs(got - ref) > SPSA_REL_TOL * np.maximum(1.0, np.abs(ref))
            bad &= mask
            if bad.any():
                i, p = np.argwhere(bad)[0]
                failures.append(
                    f"spsa vs adjoint: set {name!r} entry (obs {i}, param "
                    f"{p}): {got[i, p]!r} vs {ref[i, p]!r} "
                    f"(rel tol {SPSA_REL_TOL}, {config.spsa_samples} samples)")

    report = [f"gradient check on {config.qubits} qubits, depth "
              f"{config.depth}, {len(observables)} observables: "
              + ("PASS" if not failures else "FAIL")] + failures
    for line in report:
        echo(line)
    return not failures, report
