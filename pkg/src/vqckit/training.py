"""End-to-end workloads: softmax quantum classifier and REINFORCE on
cart-pole.

Both loops are deterministic per seed: data shuffles, policy sampling and
environment resets all derive from one seeded generator.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass

import numpy as np

from .cartpole import CartPoleEnv
from .circuit import build_reuploading_ansatz
from .datasets import Dataset
from .model import Constant, QuantumModule, Uniform
from .observables import Observable


@dataclass
class EpochRecord:
    epoch: int
    loss: float
    metric: float  # accuracy for the classifier, mean return for RL


def write_training_log(records, path) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["epoch", "loss", "metric"])
        for r in records:
            writer.writerow([r.epoch, repr(r.loss), repr(r.metric)])


def softmax(logits: np.ndarray) -> np.ndarray:
    shifted = logits - logits.max(axis=-1, keepdims=True)
    exp = np.exp(shifted)
    return exp / exp.sum(axis=-1, keepdims=True)


def one_hot(labels: np.ndarray, num_classes: int) -> np.ndarray:
    out = np.zeros((len(labels), num_classes))
    out[np.arange(len(labels)), labels] = 1.0
    return out


def cross_entropy(probs: np.ndarray, labels: np.ndarray) -> float:
    picked = probs[np.arange(len(labels)), labels]
    return float(-np.mean(np.log(np.clip(picked, 1e-12, None))))


def accuracy(module: QuantumModule, features, labels) -> float:
    probs = softmax(module.forward(features))
    return float(np.mean(probs.argmax(axis=1) == labels))


def train_classifier(dataset: Dataset, module: QuantumModule, epochs: int,
                     batch_size: int, optimizer, seed: int = 0,
                     method: str | None = None,
                     log=None) -> list[EpochRecord]:
    """Minibatch softmax/cross-entropy training of a quantum classifier.

    Per batch: forward -> softmax -> cross-entropy; the upstream gradient is
    (softmax - onehot)/B, contracted through the module's backward pass.
    """
    if module.num_outputs != dataset.num_classes:
        raise ValueError(f"module has {module.num_outputs} outputs but the "
                         f"dataset has {dataset.num_classes} classes")
    if module.encoding_size != dataset.num_features:
        raise ValueError(f"module encodes {module.encoding_size} features "
                         f"but the dataset has {dataset.num_features}")
    rng = np.random.default_rng(seed)
    train_x, train_y = dataset.train()
    test_x, test_y = dataset.test()
    records = []
    for epoch in range(epochs):
        order = rng.permutation(len(train_y))
        losses = []
        for lo in range(0, len(order), batch_size):
            idx = order[lo:lo + batch_size]
            xb, yb = train_x[idx], train_y[idx]
            probs = softmax(module.forward(xb))
            losses.append(cross_entropy(probs, yb))
            upstream = (probs - one_hot(yb, dataset.num_classes)) / len(idx)
            grads = module.backward(xb, upstream, method=method)
            optimizer.step(module.parameters(), grads)
        record = EpochRecord(epoch, float(np.mean(losses)),
                             accuracy(module, test_x, test_y))
        records.append(record)
        if log is not None:
            log(record)
    return records


# -- REINFORCE on cart-pole ----------------------------------------------------

POLICY_LOGIT_SCALE = 3.0


def cartpole_policy(depth: int = 3, seed: int | None = None,
                    threads: int | None = None,
                    logit_scale: float = POLICY_LOGIT_SCALE) -> QuantumModule:
    """4-qubit re-uploading policy with one weighted Z observable per action.

    The weight acts as an inverse temperature on the softmax policy: with
    plain Z observables the logits are confined to [-1, 1] and the policy can
    never commit to an action, which stalls learning.
    """
    circuit = build_reuploading_ansatz(4, depth, num_features=4)
    observables = [Observable(((logit_scale, "ZIII"),)),
                   Observable(((logit_scale, "IZII"),))]
    return QuantumModule(circuit, observables, "s",
                         [("theta", Uniform()), ("lambda", Constant(1.0))],
                         seed=seed, threads=threads)


def encode_state(state: np.ndarray) -> np.ndarray:
    """Bounded encoding values: arctan of each state component. The trainable
    scaling set of the policy circuit composes with this squash."""
    return np.arctan(state)


def returns_to_go(rewards, discount: float) -> np.ndarray:
    out = np.empty(len(rewards))
    acc = 0.0
    for t in range(len(rewards) - 1, -1, -1):
        acc = rewards[t] + discount * acc
        out[t] = acc
    return out


def sample_episode(env: CartPoleEnv, policy: QuantumModule,
                   rng: np.random.Generator, reset_seed: int):
    """Roll out one episode; returns (encoded states, actions, rewards,
    action probabilities)."""
    state = env.reset(seed=reset_seed)
    enc_states, actions, rewards, probs_list = [], [], [], []
    terminated = False
    while not terminated:
        enc = encode_state(state)
        probs = softmax(policy.forward(enc[None, :])[0])
        action = int(rng.choice(len(probs), p=probs))
        enc_states.append(enc)
        actions.append(action)
        probs_list.append(probs)
        state, reward, terminated = env.step(action)
        rewards.append(reward)
    return (np.asarray(enc_states), np.asarray(actions, dtype=np.int64),
            np.asarray(rewards), np.asarray(probs_list))


def train_reinforce(env: CartPoleEnv, policy: QuantumModule,
                    episodes_per_epoch: int, epochs: int, optimizer,
                    discount: float = 0.99, seed: int = 0,
                    log=None) -> list[EpochRecord]:
    """REINFORCE without baseline: the policy is the softmax over the
    module's observable expectations.

    Per visited state the logit-space upstream is
    (onehot(action) - softmax) * return-to-go, i.e. the gradient of the
    return-weighted log-likelihood. That direction must be ascended, so the
    summed gradients are negated before the (descending) optimizer step.
    """
    if policy.num_outputs < 2:
        raise ValueError("policy needs one observable per action")
    rng = np.random.default_rng(seed)
    records = []
    for epoch in range(epochs):
        all_states, all_upstream, episode_returns = [], [], []
        for _ in range(episodes_per_epoch):
            reset_seed = int(rng.integers(0, 2 ** 31))
            enc_states, actions, rewards, probs = sample_episode(
                env, policy, rng, reset_seed)
            gains = returns_to_go(rewards, discount)
            upstream = (one_hot(actions, policy.num_outputs) - probs)
            upstream *= gains[:, None]
            all_states.append(enc_states)
            all_upstream.append(upstream)
            episode_returns.append(rewards.sum())
        states = np.concatenate(all_states)
        upstream = np.concatenate(all_upstream) / episodes_per_epoch
        ascent = policy.backward(states, upstream)
        optimizer.step(policy.parameters(),
                       {name: -g for name, g in ascent.items()})
        mean_return = float(np.mean(episode_returns))
        # loss column: negative mean return (the quantity being minimized)
        record = EpochRecord(epoch, -mean_return, mean_return)
        records.append(record)
        if log is not None:
            log(record)
    return records
