#!/usr/bin/env python3
"""Train the 4-qubit quantum classifier on the synthetic blob task."""

import argparse

from vqckit import (Adam, Constant, QuantumModule, Uniform,
                    build_reuploading_ansatz, synthetic_blobs,
                    train_classifier)
from vqckit.bench import default_observables


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--qubits", type=int, default=4)
    parser.add_argument("--depth", type=int, default=2)
    parser.add_argument("--epochs", type=int, default=100)
    parser.add_argument("--batch", type=int, default=48)
    parser.add_argument("--lr", type=float, default=0.05)
    parser.add_argument("--seed", type=int, default=0)
    args = parser.parse_args()

    dataset = synthetic_blobs(samples_per_class=60, num_features=4,
                              seed=args.seed)
    circuit = build_reuploading_ansatz(args.qubits, args.depth, num_features=4)
    module = QuantumModule(circuit,
                           default_observables(args.qubits, dataset.num_classes),
                           "s", [("theta", Uniform()), ("lambda", Constant(1.0))],
                           seed=args.seed)
    train_classifier(dataset, module, epochs=args.epochs,
                     batch_size=args.batch, optimizer=Adam(lr=args.lr),
                     seed=args.seed,
                     log=lambda r: print(f"epoch {r.epoch:3d}  "
                                         f"loss {r.loss:.4f}  "
                                         f"test accuracy {r.metric:.3f}"))


if __name__ == "__main__":
    main()
