#!/usr/bin/env python3
"""Runtime scaling with the qubit count.

Sweeps the re-uploading ansatz at depth 3, batch 48, one Z observable per
qubit, and writes one CSV row per qubit count. Sequential and parallel
timings land in separate files so the thread improvement factor can be read
off directly.
"""

import argparse

from vqckit.bench import BenchConfig, run_bench, write_csv


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--qubits", type=int, nargs="+",
                        default=[4, 6, 8, 10, 12])
    parser.add_argument("--depth", type=int, default=3)
    parser.add_argument("--batch", type=int, default=48)
    parser.add_argument("--repeats", type=int, default=10)
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--method", default="adjoint")
    parser.add_argument("--out-prefix", default="qubits")
    args = parser.parse_args()

    for threads, tag in ((None, "parallel"), (1, "sequential")):
        records = []
        for n in args.qubits:
            config = BenchConfig(qubits=n, depth=args.depth, batch=args.batch,
                                 observables=n, method=args.method,
                                 threads=threads, repeats=args.repeats,
                                 seed=args.seed)
            print(f"[{tag}] qubits={n}")
            records.append(run_bench(config))
        path = f"{args.out_prefix}_{tag}.csv"
        write_csv(records, path, args.seed)
        print(f"wrote {path}")


if __name__ == "__main__":
    main()
