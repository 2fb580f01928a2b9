export { BridgeError, EngineClient, type EngineOptions } from "./client.js";
export {
  BridgeModule,
  inputMatrix,
  type BackwardResult,
  type CreateModuleOptions,
  type InitializerSpec,
  type ModuleMeta,
  type SetSpec,
} from "./bridge.js";
export { backward, QuantumLayer, Variable, weightedSum, type BackwardNode } from "./autograd.js";
export { SGD, type ParamGroup } from "./optim.js";
export { fromRows, ones, tensor, clone, type Matrix } from "./tensor.js";
