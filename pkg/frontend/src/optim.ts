/** Gradient descent over parameter groups with per-group learning rates. */

import { type Variable } from "./autograd.js";

export interface ParamGroup {
  params: Variable[];
  lr: number;
}

export class SGD {
  constructor(readonly groups: ParamGroup[]) {
    for (const group of groups) {
      if (!(group.lr > 0)) throw new Error(`learning rate must be > 0, got ${group.lr}`);
    }
  }

  step(): void {
    for (const { params, lr } of this.groups) {
      for (const p of params) {
        if (!p.grad) continue;
        for (let i = 0; i < p.tensor.data.length; i++) {
          p.tensor.data[i] -= lr * p.grad.data[i];
        }
      }
    }
  }

  zeroGrad(): void {
    for (const { params } of this.groups) {
      for (const p of params) p.zeroGrad();
    }
  }
}
