"""Command-line front end.

Modes: bench (runtime measurements), grad-check (three-way gradient
agreement), train-classifier, train-rl. Exit codes: 0 success, 1 usage
error, 2 check failure, 3 I/O error.
"""

from __future__ import annotations

import argparse
import sys

from .bench import (BenchConfig, default_observables, run_bench,
                    run_grad_check, write_csv)
from .cartpole import CartPoleEnv
from .circuit import build_reuploading_ansatz, load_circuit
from .datasets import load_dataset, synthetic_blobs
from .model import Constant, QuantumModule, Uniform, load_checkpoint, save_checkpoint
from .optim import Adam
from .training import (cartpole_policy, train_classifier, train_reinforce,
                       write_training_log)

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_CHECK_FAILED = 2
EXIT_IO = 3

MODES = ("bench", "grad-check", "train-classifier", "train-rl")


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"error: {message}", file=sys.stderr)
        raise SystemExit(EXIT_USAGE)


def parse_learning_rates(text: str) -> tuple[float, dict[str, float]]:
    """"0.01" -> default rate; "theta=0.01,lambda=0.1" -> per-set rates."""
    per_set: dict[str, float] = {}
    default = None
    for part in text.split(","):
        part = part.strip()
        if not part:
            continue
        if "=" in part:
            name, _, value = part.partition("=")
            per_set[name.strip()] = float(value)
        else:
            if default is not None:
                raise ValueError(f"multiple default rates in {text!r}")
            default = float(part)
    if default is None:
        default = 0.001
    return default, per_set


def build_parser() -> _Parser:
    parser = _Parser(prog="vqc-bench",
                     description="Benchmark and train variational quantum "
                                 "circuits on the statevector engine.")
    parser.add_argument("--mode", choices=MODES, default="bench")
    parser.add_argument("--qubits", type=int, default=None)
    parser.add_argument("--depth", type=int, default=None)
    parser.add_argument("--batch", type=int, default=48)
    parser.add_argument("--observables", type=int, default=None,
                        help="number of observables (default: one Z per qubit)")
    parser.add_argument("--observable", action="append", default=None,
                        metavar="TEXT",
                        help="explicit observable like '0.5*XI + -0.5*IZ'; "
                             "repeatable, overrides --observables")
    parser.add_argument("--method", choices=("adjoint", "param-shift", "spsa"),
                        default="adjoint")
    parser.add_argument("--threads", type=int, default=None)
    parser.add_argument("--repeats", type=int, default=10)
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--output", default=None,
                        help="CSV output path (bench) or training log path")
    parser.add_argument("--compare-naive", action="store_true",
                        help="also time the per-observable loop and the "
                             "sequential path")
    parser.add_argument("--circuit", default=None,
                        help="circuit JSON file instead of the built-in ansatz")
    parser.add_argument("--data", default=None,
                        help="delimited dataset file for train-classifier")
    parser.add_argument("--save", default=None, help="write checkpoint here")
    parser.add_argument("--load", default=None, help="read checkpoint first")
    parser.add_argument("--epochs", type=int, default=None)
    parser.add_argument("--lr", default="0.001",
                        help="learning rate, or per-set rates like "
                             "'theta=0.01,lambda=0.1'")
    parser.add_argument("--episodes", type=int, default=10,
                        help="episodes per epoch for train-rl")
    parser.add_argument("--discount", type=float, default=0.99)
    parser.add_argument("--spsa-samples", type=int, default=2000)
    parser.add_argument("--spsa-c", type=float, default=0.01)
    return parser


def _resolve(args):
    training = args.mode in ("train-classifier", "train-rl")
    qubits = args.qubits if args.qubits is not None else (4 if training else 12)
    depth = args.depth if args.depth is not None else (3 if not training else
                                                       2 if args.mode == "train-classifier" else 3)
    return qubits, depth


def _cmd_bench(args) -> int:
    qubits, depth = _resolve(args)
    config = BenchConfig(mode=args.mode, qubits=qubits, depth=depth,
                         batch=args.batch, observables=args.observables,
                         method=args.method, threads=args.threads,
                         repeats=args.repeats, seed=args.seed,
                         output=args.output, compare_naive=args.compare_naive,
                         circuit_file=args.circuit,
                         observable_texts=tuple(args.observable or ()),
                         spsa_samples=args.spsa_samples, spsa_c=args.spsa_c)
    print(f"# seed={config.seed} qubits={config.qubits} depth={config.depth} "
          f"batch={config.batch} method={config.method}")
    record = run_bench(config)
    if args.output:
        write_csv([record], args.output, config.seed)
        print(f"wrote {args.output}")
    return EXIT_OK


def _cmd_grad_check(args) -> int:
    qubits, depth = _resolve(args)
    if args.qubits is None:
        qubits = 6
    config = BenchConfig(mode=args.mode, qubits=qubits, depth=depth,
                         batch=max(1, args.batch), observables=args.observables,
                         method=args.method, threads=args.threads,
                         repeats=1, seed=args.seed, circuit_file=args.circuit,
                         observable_texts=tuple(args.observable or ()),
                         spsa_samples=args.spsa_samples, spsa_c=args.spsa_c)
    print(f"# seed={config.seed}")
    ok, _report = run_grad_check(config)
    return EXIT_OK if ok else EXIT_CHECK_FAILED


def _build_classifier_module(args, dataset, qubits, depth):
    if args.circuit:
        circuit = load_circuit(args.circuit)
    else:
        circuit = build_reuploading_ansatz(qubits, depth,
                                           num_features=dataset.num_features)
    observables = default_observables(circuit.num_qubits, dataset.num_classes)
    trainable = []
    for s in circuit.sets_with_role("trainable"):
        init = Constant(1.0) if s.name == "lambda" else Uniform()
        trainable.append((s.name, init))
    return QuantumModule(circuit, observables, "s", trainable,
                         seed=args.seed, threads=args.threads)


def _cmd_train_classifier(args) -> int:
    qubits, depth = _resolve(args)
    dataset = (load_dataset(args.data, seed=args.seed) if args.data
               else synthetic_blobs(seed=args.seed))
    module = _build_classifier_module(args, dataset, qubits, depth)
    if args.load:
        load_checkpoint(module, args.load)
    default_lr, per_set = parse_learning_rates(args.lr)
    optimizer = Adam(lr=default_lr, per_set=per_set)
    epochs = args.epochs if args.epochs is not None else 100
    print(f"# seed={args.seed} classes={dataset.num_classes} "
          f"features={dataset.num_features} epochs={epochs}")
    records = train_classifier(
        dataset, module, epochs=epochs, batch_size=args.batch,
        optimizer=optimizer, seed=args.seed, method=args.method,
        log=lambda r: print(f"epoch {r.epoch}: loss={r.loss:.6f} "
                            f"accuracy={r.metric:.3f}"))
    if args.output:
        write_training_log(records, args.output)
        print(f"wrote {args.output}")
    if args.save:
        save_checkpoint(module, args.save)
        print(f"saved {args.save}")
    return EXIT_OK


def _cmd_train_rl(args) -> int:
    _, depth = _resolve(args)
    if args.circuit:
        circuit = load_circuit(args.circuit)
        observables = default_observables(circuit.num_qubits, 2)
        trainable = [(s.name, Constant(1.0) if s.name == "lambda" else Uniform())
                     for s in circuit.sets_with_role("trainable")]
        policy = QuantumModule(circuit, observables, "s", trainable,
                               seed=args.seed, threads=args.threads)
    else:
        policy = cartpole_policy(depth=depth, seed=args.seed,
                                 threads=args.threads)
    if args.load:
        load_checkpoint(policy, args.load)
    default_lr, per_set = parse_learning_rates(args.lr)
    optimizer = Adam(lr=default_lr, per_set=per_set)
    epochs = args.epochs if args.epochs is not None else 50
    print(f"# seed={args.seed} epochs={epochs} episodes={args.episodes} "
          f"rates default={default_lr} per_set={per_set}")
    env = CartPoleEnv()
    records = train_reinforce(
        env, policy, episodes_per_epoch=args.episodes, epochs=epochs,
        optimizer=optimizer, discount=args.discount, seed=args.seed,
        log=lambda r: print(f"epoch {r.epoch}: mean return={r.metric:.1f}"))
    if args.output:
        write_training_log(records, args.output)
        print(f"wrote {args.output}")
    if args.save:
        save_checkpoint(policy, args.save)
        print(f"saved {args.save}")
    return EXIT_OK


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.mode == "bench":
            return _cmd_bench(args)
        if args.mode == "grad-check":
            return _cmd_grad_check(args)
        if args.mode == "train-classifier":
            return _cmd_train_classifier(args)
        return _cmd_train_rl(args)
    except OSError as exc:
        print(f"I/O error: {exc}", file=sys.stderr)
        return EXIT_IO
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
