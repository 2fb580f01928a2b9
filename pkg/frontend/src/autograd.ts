/**
 * Host-side reverse-mode autodiff with the quantum module as one custom
 * differentiable node.
 *
 * Variables form a DAG through their creator nodes; backward() walks it in
 * reverse topological order, accumulating gradients into every variable
 * that requires them. Nodes are async because the quantum node round-trips
 * the engine process.
 */

import { BridgeError } from "./client.js";
import { type BridgeModule } from "./bridge.js";
import { addInto, clone, type Matrix, ones, tensor } from "./tensor.js";

export interface BackwardNode {
  inputs: Variable[];
  /** gradient of the node output w.r.t. each input (null = no gradient) */
  run(upstream: Matrix): Promise<(Matrix | null)[]>;
}

export class Variable {
  grad: Matrix | null = null;

  constructor(
    public tensor: Matrix,
    readonly requiresGrad = true,
    readonly creator: BackwardNode | null = null,
  ) {}

  get shape(): number[] {
    return this.tensor.shape;
  }

  zeroGrad(): void {
    this.grad = null;
  }
}

export async function backward(root: Variable, seed?: Matrix): Promise<void> {
  const order: Variable[] = [];
  const seen = new Set<Variable>();
  const visit = (v: Variable) => {
    if (seen.has(v)) return;
    seen.add(v);
    if (v.creator) for (const input of v.creator.inputs) visit(input);
    order.push(v);
  };
  visit(root);
  accumulate(root, seed ?? ones(root.tensor.shape));
  for (let i = order.length - 1; i >= 0; i--) {
    const v = order[i];
    if (!v.creator || !v.grad) continue;
    const inputGrads = await v.creator.run(v.grad);
    v.creator.inputs.forEach((input, k) => {
      const g = inputGrads[k];
      if (g && input.requiresGrad) accumulate(input, g);
    });
  }
}

function accumulate(v: Variable, g: Matrix): void {
  if (v.grad === null) {
    v.grad = clone(g);
  } else {
    addInto(v.grad, g);
  }
}

/**
 * The quantum module as a custom autodiff function.
 *
 * Owns one host Variable per trainable set (the per-set parameter groups an
 * optimizer can give distinct learning rates). Each forward pushes the
 * current host values to the engine, evolves, and registers a node whose
 * backward fetches the engine-contracted per-set gradients plus, when the
 * input requires it, the upstream chained through the encoding derivatives.
 */
export class QuantumLayer {
  readonly params = new Map<string, Variable>();

  constructor(private readonly module: BridgeModule) {
    for (const { name, size } of module.meta.sets) {
      const initial = module.initialValues.get(name)!;
      this.params.set(name, new Variable(tensor([size], initial)));
    }
  }

  get meta() {
    return this.module.meta;
  }

  parameterGroups(rates: Record<string, number>): { params: Variable[]; lr: number }[] {
    return [...this.params.entries()].map(([name, variable]) => {
      const lr = rates[name];
      if (lr === undefined) {
        throw new BridgeError(`no learning rate for set '${name}'`, "value");
      }
      return { params: [variable], lr };
    });
  }

  async forward(x: Variable): Promise<Variable> {
    const values = new Map<string, Float64Array>();
    for (const [name, variable] of this.params) values.set(name, Float64Array.from(variable.tensor.data));
    await this.module.setValues(values);
    const out = await this.module.forward(x.tensor);
    const paramVars = [...this.params.values()];
    const module = this.module;
    const node: BackwardNode = {
      inputs: [x, ...paramVars],
      run: async (upstream: Matrix) => {
        const result = await module.backward(upstream, x.requiresGrad);
        const grads: (Matrix | null)[] = [result.inputs ?? null];
        for (const [name] of this.params) {
          const g = result.sets.get(name)!;
          grads.push(tensor([g.length], g));
        }
        return grads;
      },
    };
    return new Variable(out, true, node);
  }
}

/** scalar loss sum(weights * v); backward scales the weights. */
export function weightedSum(v: Variable, weights: Matrix): Variable {
  if (weights.data.length !== v.tensor.data.length) {
    throw new BridgeError(
      `weights: expected shape [${v.tensor.shape}], received [${weights.shape}]`,
      "shape",
      v.tensor.shape,
      weights.shape,
    );
  }
  let total = 0;
  for (let i = 0; i < weights.data.length; i++) total += weights.data[i] * v.tensor.data[i];
  const node: BackwardNode = {
    inputs: [v],
    run: async (upstream: Matrix) => {
      const g = clone(weights);
      for (let i = 0; i < g.data.length; i++) g.data[i] *= upstream.data[0];
      return [g];
    },
  };
  return new Variable(tensor([1], [total]), true, node);
}
