/**
 * Handle-based bridge to an engine-side quantum module.
 *
 * A handle owns one engine module plus cached shape metadata. forward()
 * saves its inputs engine-side for the matching backward(); one
 * forward/backward pair may be in flight per handle, while separate handles
 * over one engine process are independent. Gradients arrive already
 * contracted per set (vector-Jacobian), never as (B, M, |set|) tensors, and
 * no statevector data ever crosses the process boundary.
 */

import { BridgeError, EngineClient } from "./client.js";
import { type Matrix, shapesEqual, sizeOf, tensor } from "./tensor.js";

export interface InitializerSpec {
  kind: "uniform" | "constant" | "normal";
  lo?: number;
  hi?: number;
  value?: number;
  mean?: number;
  stddev?: number;
}

export interface SetSpec {
  name: string;
  init?: InitializerSpec;
}

export interface CreateModuleOptions {
  circuitFile: string;
  observables: string[];
  setSpecs: SetSpec[];
  encodingSet?: string;
  seed?: number;
  threads?: number;
}

export interface ModuleMeta {
  encodingSize: number;
  numOutputs: number;
  sets: { name: string; size: number }[];
}

export interface BackwardResult {
  sets: Map<string, Float64Array>;
  /** upstream chained through the encoding-set derivatives, shape (B, F) */
  inputs?: Matrix;
}

function checkShape(actual: number[], expected: number[], what: string): void {
  if (!shapesEqual(actual, expected)) {
    throw new BridgeError(
      `${what}: expected shape [${expected}], received [${actual}]`,
      "shape",
      expected,
      actual,
    );
  }
}

export class BridgeModule {
  private freed = false;

  private constructor(
    private readonly client: EngineClient,
    readonly handle: number,
    readonly meta: ModuleMeta,
    readonly initialValues: Map<string, Float64Array>,
  ) {}

  static async create(client: EngineClient, options: CreateModuleOptions): Promise<BridgeModule> {
    const response = await client.request({
      op: "create_module",
      circuit_file: options.circuitFile,
      observables: options.observables,
      set_specs: options.setSpecs.map((s) => ({ name: s.name, init: s.init ?? {} })),
      encoding_set: options.encodingSet ?? "s",
      seed: options.seed ?? null,
      threads: options.threads ?? null,
    });
    const meta: ModuleMeta = {
      encodingSize: response.meta.encoding_size,
      numOutputs: response.meta.num_outputs,
      sets: response.meta.sets,
    };
    const values = new Map<string, Float64Array>();
    for (const { name } of meta.sets) {
      values.set(name, Float64Array.from(response.values[name]));
    }
    return new BridgeModule(client, response.handle, meta, values);
  }

  private assertLive(): void {
    if (this.freed) throw new BridgeError("handle already freed", "state");
  }

  async forward(inputs: Matrix): Promise<Matrix> {
    this.assertLive();
    if (inputs.shape.length !== 2 || inputs.shape[1] !== this.meta.encodingSize) {
      const expected = [inputs.shape[0] ?? 0, this.meta.encodingSize];
      throw new BridgeError(
        `inputs: expected shape [${expected.join(", ")}], received [${inputs.shape.join(", ")}]`,
        "shape",
        expected,
        inputs.shape,
      );
    }
    const response = await this.client.request({
      op: "forward",
      handle: this.handle,
      buffer: Array.from(inputs.data),
      shape: inputs.shape,
    });
    return tensor(response.shape, response.buffer);
  }

  async backward(upstream: Matrix, withInputGradients = false): Promise<BackwardResult> {
    this.assertLive();
    if (upstream.shape.length !== 2 || upstream.shape[1] !== this.meta.numOutputs) {
      const expected = [upstream.shape[0] ?? 0, this.meta.numOutputs];
      throw new BridgeError(
        `upstream: expected shape [${expected.join(", ")}], received [${upstream.shape.join(", ")}]`,
        "shape",
        expected,
        upstream.shape,
      );
    }
    const response = await this.client.request({
      op: "backward",
      handle: this.handle,
      buffer: Array.from(upstream.data),
      shape: upstream.shape,
      input_gradients: withInputGradients,
    });
    const sets = new Map<string, Float64Array>();
    for (const { name } of this.meta.sets) {
      sets.set(name, Float64Array.from(response.sets[name]));
    }
    const result: BackwardResult = { sets };
    if (response.inputs) {
      result.inputs = tensor(response.inputs.shape, response.inputs.buffer);
    }
    return result;
  }

  async getValues(): Promise<Map<string, Float64Array>> {
    this.assertLive();
    const response = await this.client.request({ op: "get_values", handle: this.handle });
    const values = new Map<string, Float64Array>();
    for (const { name } of this.meta.sets) {
      values.set(name, Float64Array.from(response.values[name]));
    }
    return values;
  }

  async setValues(values: Map<string, ArrayLike<number>>): Promise<void> {
    this.assertLive();
    const payload: Record<string, number[]> = {};
    for (const [name, data] of values) {
      const set = this.meta.sets.find((s) => s.name === name);
      if (set) checkShape([data.length], [set.size], `set ${name}`);
      payload[name] = Array.from(data);
    }
    await this.client.request({ op: "set_values", handle: this.handle, values: payload });
  }

  async free(): Promise<void> {
    if (this.freed) return;
    this.freed = true;
    await this.client.request({ op: "free", handle: this.handle });
  }
}

export function inputMatrix(rows: number, cols: number, data: ArrayLike<number>): Matrix {
  if (data.length !== sizeOf([rows, cols])) {
    throw new BridgeError(
      `buffer: expected shape [${rows}, ${cols}], received length ${data.length}`,
      "shape",
      [rows, cols],
      [data.length],
    );
  }
  return tensor([rows, cols], data);
}
