#!/usr/bin/env python3
"""JSON-lines engine server: the Python half of the autograd bridge.

Reads one JSON request per stdin line, writes one JSON response per stdout
line, in order. Only (B, M) outputs, per-set gradient vectors and parameter
values cross the boundary as dense row-major float64 buffers; statevectors
never leave the engine. Gradient tensors are contracted engine-side
(vector-Jacobian products), so the host receives per-set vectors, not
(B, M, |set|) tensors.

Requests: {"op": ..., ...}. Responses: {"ok": true, ...} or
{"ok": false, "error": {"type", "message", "expected"?, "received"?}}.
Ops: create_module, forward, backward, get_values, set_values, free,
shutdown.
"""

import json
import sys

import numpy as np

from vqckit import Constant, Normal, QuantumModule, Uniform, load_circuit, parse_observable


class BridgeError(Exception):
    def __init__(self, kind, message, expected=None, received=None):
        super().__init__(message)
        self.kind = kind
        self.expected = expected
        self.received = received

    def to_json(self):
        error = {"type": self.kind, "message": str(self)}
        if self.expected is not None:
            error["expected"] = self.expected
        if self.received is not None:
            error["received"] = self.received
        return {"ok": False, "error": error}


def make_initializer(spec):
    kind = spec.get("kind", "uniform")
    if kind == "uniform":
        return Uniform(spec.get("lo", 0.0), spec.get("hi", 2.0 * np.pi))
    if kind == "constant":
        return Constant(spec.get("value", 1.0))
    if kind == "normal":
        return Normal(spec.get("mean", 0.0), spec.get("stddev", 1.0))
    raise BridgeError("value", f"unknown initializer kind {kind!r}")


def decode_matrix(request, rows_hint=None):
    buffer = request.get("buffer")
    shape = request.get("shape")
    if buffer is None or shape is None or len(shape) != 2:
        raise BridgeError("shape", "request needs 'buffer' and a 2-entry 'shape'")
    rows, cols = int(shape[0]), int(shape[1])
    data = np.asarray(buffer, dtype=np.float64)
    if data.size != rows * cols:
        raise BridgeError("shape", "buffer length does not match shape",
                          expected=[rows, cols], received=[int(data.size)])
    return data.reshape(rows, cols)


class Session:
    def __init__(self):
        self.modules = {}
        self.pending = {}  # handle -> saved forward inputs
        self.next_handle = 1

    def module(self, request):
        handle = request.get("handle")
        if handle not in self.modules:
            raise BridgeError("state", f"unknown handle {handle!r}")
        return handle, self.modules[handle]

    def op_create_module(self, request):
        circuit = load_circuit(request["circuit_file"])
        observables = [parse_observable(t) for t in request["observables"]]
        specs = [(s["name"], make_initializer(s.get("init", {})))
                 for s in request["set_specs"]]
        module = QuantumModule(circuit, observables,
                               request.get("encoding_set", "s"), specs,
                               seed=request.get("seed"),
                               threads=request.get("threads"))
        handle = self.next_handle
        self.next_handle += 1
        self.modules[handle] = module
        return {
            "ok": True,
            "handle": handle,
            "meta": {
                "encoding_size": module.encoding_size,
                "num_outputs": module.num_outputs,
                "sets": [{"name": name, "size": int(module.values[name].size)}
                         for name in module.trainable_names()],
            },
            "values": {name: module.values[name].tolist()
                       for name in module.trainable_names()},
        }

    def op_forward(self, request):
        handle, module = self.module(request)
        inputs = decode_matrix(request)
        if inputs.shape[1] != module.encoding_size:
            raise BridgeError("shape", "input row length mismatch",
                              expected=[inputs.shape[0], module.encoding_size],
                              received=list(inputs.shape))
        out = module.forward(inputs)
        self.pending[handle] = inputs  # saved for the backward phase
        return {"ok": True, "buffer": out.reshape(-1).tolist(),
                "shape": list(out.shape)}

    def op_backward(self, request):
        handle, module = self.module(request)
        if handle not in self.pending:
            raise BridgeError("state", "backward without a preceding forward")
        inputs = self.pending.pop(handle)
        upstream = decode_matrix(request)
        expected = [int(inputs.shape[0]), module.num_outputs]
        if list(upstream.shape) != expected:
            raise BridgeError("shape", "upstream shape mismatch",
                              expected=expected,
                              received=list(upstream.shape))
        want_inputs = bool(request.get("input_gradients", False))
        wrt = module.trainable_names()
        if want_inputs:
            wrt = wrt + (module.encoding_set,)
        result = module.jacobians(inputs, wrt=wrt)
        response = {"ok": True, "sets": {}}
        for name in module.trainable_names():
            vjp = np.einsum("bm,bmp->p", upstream, result.gradients[name])
            response["sets"][name] = vjp.tolist()
        if want_inputs:
            enc = np.einsum("bm,bmf->bf", upstream,
                            result.gradients[module.encoding_set])
            response["inputs"] = {"buffer": enc.reshape(-1).tolist(),
                                  "shape": list(enc.shape)}
        return response

    def op_get_values(self, request):
        _, module = self.module(request)
        return {"ok": True, "values": {name: module.values[name].tolist()
                                       for name in module.trainable_names()}}

    def op_set_values(self, request):
        _, module = self.module(request)
        for name, values in request["values"].items():
            if name not in module.values:
                raise BridgeError("value", f"unknown parameter set {name!r}")
            values = np.asarray(values, dtype=np.float64)
            if values.shape != module.values[name].shape:
                raise BridgeError("shape", f"set {name!r} size mismatch",
                                  expected=list(module.values[name].shape),
                                  received=list(values.shape))
            module.values[name][:] = values
        return {"ok": True}

    def op_free(self, request):
        handle, _ = self.module(request)
        del self.modules[handle]
        self.pending.pop(handle, None)
        return {"ok": True}

    def handle_request(self, request):
        op = request.get("op")
        handler = getattr(self, f"op_{op}", None)
        if handler is None:
            raise BridgeError("value", f"unknown op {op!r}")
        return handler(request)


def main():
    session = Session()
    for line in sys.stdin:
        line = line.strip()
        if not line:
            continue
        try:
            request = json.loads(line)
            if request.get("op") == "shutdown":
                print(json.dumps({"ok": True}), flush=True)
                break
            response = session.handle_request(request)
        except BridgeError as exc:
            response = exc.to_json()
        except FileNotFoundError as exc:
            response = BridgeError("io", str(exc)).to_json()
        except (KeyError, ValueError, IndexError) as exc:
            response = BridgeError("value", f"{type(exc).__name__}: {exc}").to_json()
        print(json.dumps(response), flush=True)


if __name__ == "__main__":
    main()
