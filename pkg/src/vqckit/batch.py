"""Deterministic thread-parallel evaluation over batched inputs.

A batch request fixes the trainable values and varies only the encoding data
across B rows. The rows are independent, so they are split into contiguous
ranges, one per worker thread, with the first ``B - T*floor(B/T)`` ranges one
element larger than the rest. Workers share the immutable compiled circuit
and observables, own their statevectors, and write to disjoint output rows,
so the result is bit-identical for every thread count. The statevector
kernels release the GIL, which is what makes the threads actually run in
parallel.
"""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .circuit import Circuit
from .gradients import (DEFAULT_SPSA_C, DEFAULT_SPSA_SAMPLES, WrtLayout,
                        adjoint_flat, pack_expectations, param_shift_flat,
                        spsa_flat)
from .observables import Observable, ObservablePack

THREADS_ENV_VAR = "VQC_NUM_THREADS"

METHODS = ("adjoint", "param-shift", "spsa")

_MASK64 = (1 << 64) - 1


def resolve_thread_count(threads: int | None = None) -> int:
    """Explicit count, else VQC_NUM_THREADS, else the physical core count."""
    if threads is not None:
        if threads < 1:
            raise ValueError(f"threads must be >= 1, got {threads}")
        return int(threads)
    env = os.environ.get(THREADS_ENV_VAR)
    if env:
        count = int(env)
        if count < 1:
            raise ValueError(f"{THREADS_ENV_VAR} must be >= 1, got {env}")
        return count
    try:
        import psutil
        physical = psutil.cpu_count(logical=False)
    except ImportError:  # pragma: no cover
        physical = None
    return physical or os.cpu_count() or 1


def split_workload(batch_size: int, threads: int) -> list[tuple[int, int]]:
    """Contiguous ranges covering [0, batch_size), sizes differing by <= 1.

    The first ``batch_size - threads * floor(batch_size / threads)`` ranges
    take one extra element.
    """
    if batch_size < 0:
        raise ValueError(f"batch_size must be >= 0, got {batch_size}")
    if threads < 1:
        raise ValueError(f"threads must be >= 1, got {threads}")
    base = batch_size // threads
    extra = batch_size - threads * base
    ranges = []
    start = 0
    for t in range(threads):
        size = base + (1 if t < extra else 0)
        ranges.append((start, start + size))
        start += size
    return ranges


def mix_seed(seed: int, index: int) -> int:
    """splitmix64 step: decorrelated per-input seeds, independent of the
    thread partition."""
    z = (int(seed) + (index + 1) * 0x9E3779B97F4A7C15) & _MASK64
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK64
    return z ^ (z >> 31)


@dataclass
class BatchRequest:
    circuit: Circuit
    observables: list[Observable]
    trainable_values: dict[str, np.ndarray]
    inputs: np.ndarray                    # (B, encoding size)
    method: str = "adjoint"
    wrt: tuple[str, ...] = ()
    threads: int | None = None
    seed: int = 0
    spsa_c: float = DEFAULT_SPSA_C
    spsa_samples: int = DEFAULT_SPSA_SAMPLES


@dataclass
class BatchResult:
    expectations: np.ndarray              # (B, M)
    gradients: dict[str, np.ndarray]      # set name -> (B, M, set.size)


class BatchInputError(RuntimeError):
    """A backend failed for one input row; carries the failing index."""

    def __init__(self, index: int, cause: Exception):
        super().__init__(f"batch input {index} failed: {cause}")
        self.index = index


def _encoding_set(circuit: Circuit):
    encoding = circuit.sets_with_role("encoding")
    if len(encoding) != 1:
        raise ValueError(f"batched evaluation needs exactly one encoding "
                         f"set, circuit has {len(encoding)}")
    return encoding[0]


class BatchEngine:
    """Owns a reusable worker pool; safe for sequential reuse."""

    def __init__(self, threads: int | None = None):
        self._explicit = threads is not None
        self.threads = resolve_thread_count(threads)
        self._pool = ThreadPoolExecutor(max_workers=self.threads,
                                        thread_name_prefix="vqc-batch")

    def _request_threads(self, request: "BatchRequest") -> int:
        if request.threads is not None:
            if request.threads < 1:
                raise ValueError(f"threads must be >= 1, got {request.threads}")
            return request.threads
        if self._explicit:
            return self.threads
        return resolve_thread_count(None)  # env var or physical cores, now

    def close(self) -> None:
        self._pool.shutdown(wait=True)

    def __enter__(self):
        return self

    def __exit__(self, *exc):
        self.close()

    def run_batch(self, request: BatchRequest) -> BatchResult:
        circuit = request.circuit
        if request.method not in METHODS:
            raise ValueError(f"unknown method {request.method!r}; "
                             f"expected one of {METHODS}")
        encoding = _encoding_set(circuit)
        inputs = np.asarray(request.inputs, dtype=np.float64)
        if inputs.ndim != 2 or inputs.shape[1] != encoding.size:
            raise ValueError(f"inputs must have shape (B, {encoding.size}), "
                             f"got {inputs.shape}")
        compiled = circuit.compiled()
        pack = ObservablePack.from_observables(request.observables,
                                               circuit.num_qubits)
        layout = WrtLayout.build(compiled, request.wrt)
        # base flat vector: trainable values fixed, encoding slot zeroed
        trainable = {s.name for s in circuit.sets_with_role("trainable")}
        given = set(request.trainable_values)
        if given != trainable:
            raise ValueError(f"trainable_values must cover exactly "
                             f"{sorted(trainable)}, got {sorted(given)}")
        binding = dict(request.trainable_values)
        binding[encoding.name] = np.zeros(encoding.size)
        base_flat = compiled.flat_values(binding)
        enc_off, enc_size = compiled.offsets[encoding.name]

        batch_size = inputs.shape[0]
        n_obs = pack.num_obs
        expectations = np.empty((batch_size, n_obs))
        grad = np.zeros((batch_size, n_obs, layout.n_cols))
        if batch_size == 0 or n_obs == 0:
            # empty results keep their declared dimensions; nothing is evolved
            gradients = {name: np.ascontiguousarray(grad[:, :, lo:hi])
                         for name, lo, hi in layout.slices}
            return BatchResult(expectations, gradients)

        def worker(lo: int, hi: int) -> None:
            flat = base_flat.copy()
            for b in range(lo, hi):
                flat[enc_off:enc_off + enc_size] = inputs[b]
                try:
                    if layout.n_cols == 0 and n_obs > 0:
                        pack_expectations(compiled.run(flat), pack,
                                          expectations[b])
                    elif request.method == "adjoint":
                        adjoint_flat(compiled, flat, pack, layout,
                                     expectations[b], grad[b])
                    elif request.method == "param-shift":
                        param_shift_flat(compiled, flat, pack, layout,
                                         expectations[b], grad[b])
                    else:
                        rng = np.random.default_rng(mix_seed(request.seed, b))
                        spsa_flat(compiled, flat, pack, layout,
                                  request.spsa_c, request.spsa_samples, rng,
                                  expectations[b], grad[b])
                except Exception as exc:
                    raise BatchInputError(b, exc) from exc

        threads = self._request_threads(request)
        ranges = [r for r in split_workload(batch_size, threads) if r[0] < r[1]]
        if len(ranges) <= 1:
            for lo, hi in ranges:
                worker(lo, hi)
        else:
            futures = [self._pool.submit(worker, lo, hi) for lo, hi in ranges]
            for future in futures:
                future.result()  # completion barrier; re-raises worker errors

        gradients = {}
        for name, lo, hi in layout.slices:
            gradients[name] = np.ascontiguousarray(grad[:, :, lo:hi])
        return BatchResult(expectations, gradients)


_default_engine: BatchEngine | None = None


def default_engine() -> BatchEngine:
    global _default_engine
    if _default_engine is None:
        _default_engine = BatchEngine()
    return _default_engine


def run_batch(request: BatchRequest) -> BatchResult:
    """Run on a lazily created process-wide engine."""
    return default_engine().run_batch(request)
