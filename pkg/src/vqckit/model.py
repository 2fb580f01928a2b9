"""Trainable model layer: quantum modules and the dense-quantum-dense hybrid.

A QuantumModule binds a circuit, M observables and per-set initializers.
Value-to-parameter assignment follows the order the trainable sets were
declared at construction; names are opaque labels, so renaming a set never
changes initialization or outputs.

HybridModule = dense pre-layer -> bounded encoding angles -> quantum module
-> dense post-layer, end-to-end differentiable through the adjoint backend
(the encoding-set gradients chain through the squash and the pre-layer).
"""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

from .batch import BatchEngine, BatchRequest, BatchResult
from .circuit import Circuit
from .observables import Observable

TWO_PI = 2.0 * np.pi


@dataclass(frozen=True)
class Uniform:
    lo: float = 0.0
    hi: float = TWO_PI

    def draw(self, rng: np.random.Generator, size: int) -> np.ndarray:
        return rng.uniform(self.lo, self.hi, size)


@dataclass(frozen=True)
class Constant:
    value: float = 1.0

    def draw(self, rng: np.random.Generator, size: int) -> np.ndarray:
        return np.full(size, float(self.value))


@dataclass(frozen=True)
class Normal:
    mean: float = 0.0
    stddev: float = 1.0

    def draw(self, rng: np.random.Generator, size: int) -> np.ndarray:
        return rng.normal(self.mean, self.stddev, size)


class QuantumModule:
    """Trainable multi-observable quantum model over one encoding set.

    ``trainable`` is an ordered sequence of set names or (name, initializer)
    pairs; unlisted initializers default to uniform [0, 2pi).
    """

    def __init__(self, circuit: Circuit, observables, encoding_set: str,
                 trainable, seed: int | None = None,
                 threads: int | None = None, method: str = "adjoint"):
        self.circuit = circuit
        self.observables = list(observables)
        self.method = method
        enc = circuit.set_named(encoding_set)
        if enc.role != "encoding":
            raise ValueError(f"set {encoding_set!r} has role {enc.role!r}, "
                             "expected an encoding set")
        self.encoding_set = encoding_set

        specs = []
        for item in trainable:
            if isinstance(item, str):
                specs.append((item, Uniform(0.0, TWO_PI)))
            else:
                name, init = item
                specs.append((str(name), init))
        names = [name for name, _ in specs]
        if len(set(names)) != len(names):
            raise ValueError(f"parameter set declared twice: {names}")
        declared_trainable = {s.name for s in circuit.sets_with_role("trainable")}
        missing = declared_trainable - set(names)
        if missing:
            raise ValueError(f"trainable sets not configured: {sorted(missing)}")
        for name in names:
            s = circuit.set_named(name)  # raises on unknown names
            if s.role != "trainable":
                raise ValueError(f"set {name!r} is not trainable")

        rng = np.random.default_rng(seed)
        self.trainable_specs = tuple(specs)
        # drawn in declaration order from one generator: reproducible per seed
        self.values: dict[str, np.ndarray] = {}
        for name, init in specs:
            self.values[name] = init.draw(rng, circuit.set_named(name).size)
        self.engine = BatchEngine(threads)

    @property
    def num_outputs(self) -> int:
        return len(self.observables)

    @property
    def encoding_size(self) -> int:
        return self.circuit.set_named(self.encoding_set).size

    def parameters(self) -> dict[str, np.ndarray]:
        return self.values

    def trainable_names(self) -> tuple[str, ...]:
        return tuple(name for name, _ in self.trainable_specs)

    def _request(self, inputs, wrt, method=None, threads=None) -> BatchRequest:
        return BatchRequest(
            circuit=self.circuit, observables=self.observables,
            trainable_values=self.values, inputs=np.atleast_2d(inputs),
            method=method or self.method, wrt=tuple(wrt), threads=threads)

    def forward(self, inputs, threads: int | None = None) -> np.ndarray:
        """(B, M) expectations at the current trainable values."""
        result = self.engine.run_batch(self._request(inputs, (), threads=threads))
        return result.expectations

    def jacobians(self, inputs, method: str | None = None,
                  wrt=None, threads: int | None = None) -> BatchResult:
        """Raw (B, M) expectations and (B, M, set.size) gradient tensors."""
        wrt = self.trainable_names() if wrt is None else tuple(wrt)
        return self.engine.run_batch(
            self._request(inputs, wrt, method=method, threads=threads))

    def backward(self, inputs, upstream, method: str | None = None,
                 threads: int | None = None) -> dict[str, np.ndarray]:
        """Vector-Jacobian product: sum_{b,i} upstream[b,i] d<O_i>(s_b)/dp."""
        inputs = np.atleast_2d(inputs)
        upstream = np.asarray(upstream, dtype=np.float64)
        expected = (inputs.shape[0], self.num_outputs)
        if upstream.shape != expected:
            raise ValueError(f"upstream shape {upstream.shape} does not "
                             f"match forward output {expected}")
        result = self.jacobians(inputs, method=method, threads=threads)
        return {name: np.einsum("bm,bmp->p", upstream, tensor)
                for name, tensor in result.gradients.items()}


def _is_single_qubit(obs: Observable) -> bool:
    for _, string in obs.terms:
        if sum(ch != "I" for ch in string) > 1:
            return False
    return True


class HybridModule:
    """Dense pre-layer, quantum core, dense post-layer; end-to-end gradients.

    The pre-layer output is squashed to (-pi, pi) with pi*tanh before being
    used as encoding values, keeping angles bounded with a closed-form
    derivative.
    """

    def __init__(self, input_dim: int, quantum: QuantumModule,
                 output_dim: int, seed: int | None = None):
        for obs in quantum.observables:
            if not _is_single_qubit(obs):
                raise ValueError("hybrid quantum core must use single-qubit "
                                 "observables")
        self.input_dim = int(input_dim)
        self.output_dim = int(output_dim)
        self.quantum = quantum
        enc = quantum.encoding_size
        m = quantum.num_outputs
        rng = np.random.default_rng(seed)
        bound_pre = 1.0 / np.sqrt(max(1, input_dim))
        bound_post = 1.0 / np.sqrt(max(1, m))
        self.pre_weight = rng.uniform(-bound_pre, bound_pre, (enc, input_dim))
        self.pre_bias = rng.uniform(-bound_pre, bound_pre, enc)
        self.post_weight = rng.uniform(-bound_post, bound_post, (output_dim, m))
        self.post_bias = rng.uniform(-bound_post, bound_post, output_dim)

    def parameters(self) -> dict[str, np.ndarray]:
        params = {"pre.weight": self.pre_weight, "pre.bias": self.pre_bias,
                  "post.weight": self.post_weight, "post.bias": self.post_bias}
        for name, values in self.quantum.parameters().items():
            params[name] = values
        return params

    def _stages(self, inputs):
        inputs = np.atleast_2d(np.asarray(inputs, dtype=np.float64))
        if inputs.shape[1] != self.input_dim:
            raise ValueError(f"inputs must have shape (B, {self.input_dim}), "
                             f"got {inputs.shape}")
        pre = inputs @ self.pre_weight.T + self.pre_bias
        angles = np.pi * np.tanh(pre)
        return inputs, pre, angles

    def forward(self, inputs) -> np.ndarray:
        _, _, angles = self._stages(inputs)
        q = self.quantum.forward(angles)
        return q @ self.post_weight.T + self.post_bias

    def backward(self, inputs, upstream) -> dict[str, np.ndarray]:
        """Gradients of sum(upstream * forward) for every weight block."""
        inputs, pre, angles = self._stages(inputs)
        upstream = np.asarray(upstream, dtype=np.float64)
        if upstream.shape != (inputs.shape[0], self.output_dim):
            raise ValueError(f"upstream shape {upstream.shape} does not match "
                             f"(B, {self.output_dim})")
        result = self.quantum.jacobians(
            angles, wrt=self.quantum.trainable_names() + (self.quantum.encoding_set,))
        q = result.expectations

        grads: dict[str, np.ndarray] = {}
        grads["post.weight"] = upstream.T @ q
        grads["post.bias"] = upstream.sum(axis=0)
        d_q = upstream @ self.post_weight                          # (B, M)
        for name in self.quantum.trainable_names():
            grads[name] = np.einsum("bm,bmp->p", d_q, result.gradients[name])
        d_angles = np.einsum("bm,bmf->bf", d_q,
                             result.gradients[self.quantum.encoding_set])
        d_pre = d_angles * np.pi * (1.0 - np.tanh(pre) ** 2)
        grads["pre.weight"] = d_pre.T @ inputs
        grads["pre.bias"] = d_pre.sum(axis=0)
        return grads


# -- checkpoint format ---------------------------------------------------------

def checkpoint_dict(module) -> dict:
    if isinstance(module, HybridModule):
        return {
            "sets": {name: values.tolist()
                     for name, values in module.quantum.parameters().items()},
            "pre": {"weight": module.pre_weight.tolist(),
                    "bias": module.pre_bias.tolist()},
            "post": {"weight": module.post_weight.tolist(),
                     "bias": module.post_bias.tolist()},
        }
    return {"sets": {name: values.tolist()
                     for name, values in module.parameters().items()}}


def save_checkpoint(module, path) -> None:
    with open(path, "w") as fh:
        json.dump(checkpoint_dict(module), fh, indent=2)
        fh.write("\n")


def load_checkpoint(module, path) -> None:
    """Restore parameter values in place; shapes must match the module."""
    with open(path) as fh:
        data = json.load(fh)
    quantum = module.quantum if isinstance(module, HybridModule) else module
    for name, values in data.get("sets", {}).items():
        values = np.asarray(values, dtype=np.float64)
        if name not in quantum.values:
            raise ValueError(f"checkpoint set {name!r} not in module")
        if values.shape != quantum.values[name].shape:
            raise ValueError(f"checkpoint set {name!r} has shape "
                             f"{values.shape}, expected "
                             f"{quantum.values[name].shape}")
        quantum.values[name][:] = values
    if isinstance(module, HybridModule):
        for block, (w_attr, b_attr) in {"pre": ("pre_weight", "pre_bias"),
                                        "post": ("post_weight", "post_bias")}.items():
            if block not in data:
                continue
            w = np.asarray(data[block]["weight"], dtype=np.float64)
            b = np.asarray(data[block]["bias"], dtype=np.float64)
            getattr(module, w_attr)[:] = w
            getattr(module, b_attr)[:] = b
