/**
 * Test fixtures: circuit files built through the engine's public circuit
 * format, and reference results computed by one-shot direct engine calls
 * (same construction, no bridge protocol involved).
 */

import { execFileSync } from "node:child_process";
import { mkdtempSync } from "node:fs";
import { tmpdir } from "node:os";
import { join } from "node:path";

import { type SetSpec } from "../src/index.js";

export const PYTHON = process.env.VQCKIT_PYTHON ?? "python3";

export function tempDir(): string {
  return mkdtempSync(join(tmpdir(), "vqc-bridge-"));
}

export function makeCircuitFile(dir: string, qubits: number, depth: number, features: number): string {
  const path = join(dir, `circuit_${qubits}_${depth}_${features}.json`);
  execFileSync(PYTHON, [
    "-c",
    "import sys; from vqckit import build_reuploading_ansatz, save_circuit; " +
      `save_circuit(build_reuploading_ansatz(${qubits}, ${depth}, num_features=${features}), sys.argv[1])`,
    path,
  ]);
  return path;
}

export function zObservables(qubits: number, count: number): string[] {
  const out: string[] = [];
  for (let i = 0; i < count; i++) {
    const letters = Array(qubits).fill("I");
    letters[i % qubits] = "Z";
    out.push(letters.join(""));
  }
  return out;
}

export const DEFAULT_SET_SPECS: SetSpec[] = [
  { name: "theta", init: { kind: "uniform" } },
  { name: "lambda", init: { kind: "constant", value: 1.0 } },
];

const REFERENCE_SCRIPT = `
import json, sys
import numpy as np
from vqckit import Constant, Normal, QuantumModule, Uniform, load_circuit, parse_observable

spec = json.loads(sys.argv[1])

def initializer(d):
    kind = d.get("kind", "uniform")
    if kind == "uniform":
        return Uniform(d.get("lo", 0.0), d.get("hi", 2.0 * np.pi))
    if kind == "constant":
        return Constant(d.get("value", 1.0))
    return Normal(d.get("mean", 0.0), d.get("stddev", 1.0))

module = QuantumModule(
    load_circuit(spec["circuit_file"]),
    [parse_observable(t) for t in spec["observables"]],
    spec.get("encoding_set", "s"),
    [(s["name"], initializer(s.get("init", {}))) for s in spec["set_specs"]],
    seed=spec.get("seed"), threads=1)
inputs = np.asarray(spec["inputs"], dtype=np.float64)
out = {"forward": module.forward(inputs).tolist(),
       "values": {n: module.values[n].tolist() for n in module.trainable_names()}}
if "upstream" in spec:
    upstream = np.asarray(spec["upstream"], dtype=np.float64)
    wrt = module.trainable_names() + (module.encoding_set,)
    result = module.jacobians(inputs, wrt=wrt)
    out["sets"] = {n: np.einsum("bm,bmp->p", upstream, result.gradients[n]).tolist()
                   for n in module.trainable_names()}
    out["inputs"] = np.einsum("bm,bmf->bf", upstream,
                              result.gradients[module.encoding_set]).tolist()
print(json.dumps(out))
`;

export interface ReferenceSpec {
  circuit_file: string;
  observables: string[];
  set_specs: SetSpec[];
  seed: number;
  inputs: number[][];
  upstream?: number[][];
}

export function referenceCall(spec: ReferenceSpec): any {
  const stdout = execFileSync(PYTHON, ["-", JSON.stringify(spec)], {
    input: REFERENCE_SCRIPT,
  });
  return JSON.parse(stdout.toString());
}

export function randomRows(rows: number, cols: number, seed: number): number[][] {
  // deterministic LCG so the same rows reach the bridge and the reference
  let state = BigInt(seed) & 0xffffffffn;
  const next = () => {
    state = (state * 1664525n + 1013904223n) & 0xffffffffn;
    return Number(state) / 2 ** 32;
  };
  return Array.from({ length: rows }, () =>
    Array.from({ length: cols }, () => 2 * next() - 1),
  );
}

export function maxAbsDiff(a: ArrayLike<number>, b: ArrayLike<number>): number {
  let worst = 0;
  for (let i = 0; i < a.length; i++) worst = Math.max(worst, Math.abs(a[i] - b[i]));
  return worst;
}
