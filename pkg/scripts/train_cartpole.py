#!/usr/bin/env python3
"""REINFORCE on the in-repo cart-pole with per-set learning rates.

The variational angles and the input-scaling set get their own rates; the
defaults reproduce the configuration that separates the two roles cleanly
(0.01 for angles, 0.1 for scaling).
"""

import argparse

from vqckit import Adam, CartPoleEnv, cartpole_policy, train_reinforce


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--depth", type=int, default=3)
    parser.add_argument("--epochs", type=int, default=50)
    parser.add_argument("--episodes", type=int, default=10)
    parser.add_argument("--lr-theta", type=float, default=0.01)
    parser.add_argument("--lr-lambda", type=float, default=0.1)
    parser.add_argument("--discount", type=float, default=0.99)
    parser.add_argument("--seed", type=int, default=0)
    args = parser.parse_args()

    policy = cartpole_policy(depth=args.depth, seed=args.seed)
    optimizer = Adam(lr=0.001, per_set={"theta": args.lr_theta,
                                        "lambda": args.lr_lambda})
    train_reinforce(CartPoleEnv(), policy, episodes_per_epoch=args.episodes,
                    epochs=args.epochs, optimizer=optimizer,
                    discount=args.discount, seed=args.seed,
                    log=lambda r: print(f"epoch {r.epoch:3d}  "
                                        f"mean return {r.metric:6.1f}"))


if __name__ == "__main__":
    main()
