#!/usr/bin/env python3
"""Runtime scaling with circuit depth at fixed width.

Gradient time should grow linearly with depth (the trainable parameter count
is proportional to it). 12 qubits, batch 48, one Z observable per qubit.
"""

import argparse

from vqckit.bench import BenchConfig, run_bench, write_csv


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--depths", type=int, nargs="+",
                        default=[1, 3, 5, 7, 9, 11])
    parser.add_argument("--qubits", type=int, default=12)
    parser.add_argument("--batch", type=int, default=48)
    parser.add_argument("--repeats", type=int, default=10)
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--threads", type=int, default=None)
    parser.add_argument("--output", default="depth.csv")
    args = parser.parse_args()

    records = []
    for depth in args.depths:
        config = BenchConfig(qubits=args.qubits, depth=depth,
                             batch=args.batch, observables=args.qubits,
                             threads=args.threads, repeats=args.repeats,
                             seed=args.seed)
        print(f"depth={depth}")
        records.append(run_bench(config))
    write_csv(records, args.output, args.seed)
    print(f"wrote {args.output}")


if __name__ == "__main__":
    main()
