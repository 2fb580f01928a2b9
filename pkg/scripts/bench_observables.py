#!/usr/bin/env python3
"""Improvement factor of joint multi-observable evaluation.

For each observable count M, times the naive per-observable loop (one state
evolution per observable) against the joint single-evolution path, both
sequential, and prints the factor.
"""

import argparse

from vqckit.bench import BenchConfig, run_bench, write_csv


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--counts", type=int, nargs="+",
                        default=[1, 2, 4, 8, 12, 16, 24, 32])
    parser.add_argument("--qubits", type=int, default=12)
    parser.add_argument("--depth", type=int, default=3)
    parser.add_argument("--batch", type=int, default=48)
    parser.add_argument("--repeats", type=int, default=10)
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--output", default="observables.csv")
    args = parser.parse_args()

    records = []
    for m in args.counts:
        config = BenchConfig(qubits=args.qubits, depth=args.depth,
                             batch=args.batch, observables=m,
                             repeats=args.repeats, seed=args.seed,
                             compare_naive=True)
        print(f"observables={m}")
        record = run_bench(config)
        print(f"  factor {record.extras['factor_forward_naive']:.2f}")
        records.append(record)
    write_csv(records, args.output, args.seed)
    print(f"wrote {args.output}")


if __name__ == "__main__":
    main()
