"""vqckit: a statevector training engine for variational quantum circuits.

One state evolution serves any number of observables; gradients come from a
multi-observable adjoint sweep, the parameter-shift rule or SPSA; batches of
inputs run deterministically across worker threads.
"""

from .statevector import (GateKind, apply_gate, apply_gate_adjoint,
                          apply_pauli, inner_product, zero_state)
from .circuit import (AngleExpression, Circuit, Gate, ParameterSet,
                      build_reuploading_ansatz, circuit_from_dict,
                      circuit_to_dict, evaluate_expression, evolve,
                      expression_partial, load_circuit, save_circuit)
from .observables import (Observable, apply_observable, expectation,
                          expectations_all, parse_observable)
from .gradients import (GradientResult, adjoint_gradients,
                        finite_difference_gradients,
                        parameter_shift_gradients, spsa_gradients)
from .batch import (BatchEngine, BatchRequest, BatchResult, mix_seed,
                    run_batch, split_workload)
from .model import (Constant, HybridModule, Normal, QuantumModule, Uniform,
                    load_checkpoint, save_checkpoint)
from .optim import SGD, Adam
from .datasets import Dataset, load_dataset, synthetic_blobs
from .cartpole import CartPoleEnv
from .training import (EpochRecord, cartpole_policy, train_classifier,
                       train_reinforce, write_training_log)
from .instrument import sweep_counters

__version__ = "0.1.0"

__all__ = [
    "GateKind", "apply_gate", "apply_gate_adjoint", "apply_pauli",
    "inner_product", "zero_state",
    "AngleExpression", "Circuit", "Gate", "ParameterSet",
    "build_reuploading_ansatz", "circuit_from_dict", "circuit_to_dict",
    "evaluate_expression", "evolve", "expression_partial", "load_circuit",
    "save_circuit",
    "Observable", "apply_observable", "expectation", "expectations_all",
    "parse_observable",
    "GradientResult", "adjoint_gradients", "finite_difference_gradients",
    "parameter_shift_gradients", "spsa_gradients",
    "BatchEngine", "BatchRequest", "BatchResult", "mix_seed", "run_batch",
    "split_workload",
    "Constant", "HybridModule", "Normal", "QuantumModule", "Uniform",
    "load_checkpoint", "save_checkpoint",
    "SGD", "Adam",
    "Dataset", "load_dataset", "synthetic_blobs",
    "CartPoleEnv",
    "EpochRecord", "cartpole_policy", "train_classifier", "train_reinforce",
    "write_training_log",
    "sweep_counters",
]
