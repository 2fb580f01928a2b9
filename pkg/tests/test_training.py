import numpy as np
import pytest

from vqckit import (CartPoleEnv, SGD, Adam, Constant, QuantumModule, Uniform,
                    build_reuploading_ansatz, cartpole_policy,
                    parse_observable, synthetic_blobs, train_classifier,
                    train_reinforce, write_training_log)
from vqckit.training import (encode_state, one_hot, returns_to_go,
                             sample_episode, softmax)


def blob_module(seed=0, n=4, d=2):
    circuit = build_reuploading_ansatz(n, d, num_features=4)
    observables = []
    for i in range(2):
        s = ["I"] * n
        s[i] = "Z"
        observables.append(parse_observable("".join(s)))
    return QuantumModule(circuit, observables, "s",
                         [("theta", Uniform()), ("lambda", Constant(1.0))],
                         seed=seed)


class TestSoftmaxPieces:
    def test_softmax_rows_sum_to_one(self, rng):
        probs = softmax(rng.normal(size=(5, 3)))
        np.testing.assert_allclose(probs.sum(axis=1), 1.0, atol=1e-12)

    def test_softmax_stable_for_large_logits(self):
        probs = softmax(np.array([[1000.0, 1000.0]]))
        np.testing.assert_allclose(probs, [[0.5, 0.5]], atol=1e-12)

    def test_upstream_rows_sum_to_zero(self, rng):
        # (softmax - onehot) is the cross-entropy upstream; each row sums to 0
        logits = rng.normal(size=(6, 4))
        labels = rng.integers(0, 4, size=6)
        upstream = softmax(logits) - one_hot(labels, 4)
        np.testing.assert_allclose(upstream.sum(axis=1), 0.0, atol=1e-12)


class TestClassifier:
    def test_shape_validation(self):
        ds = synthetic_blobs(samples_per_class=10)
        module = blob_module(n=4)
        bad = QuantumModule(module.circuit,
                            module.observables + [parse_observable("IIIZ")],
                            "s", [("theta", Uniform()), ("lambda", Constant(1.0))])
        with pytest.raises(ValueError, match="classes"):
            train_classifier(ds, bad, 1, 8, SGD())

    def test_deterministic_per_seed(self):
        ds = synthetic_blobs(samples_per_class=12, seed=3)
        losses = []
        for _ in range(2):
            module = blob_module(seed=11)
            records = train_classifier(ds, module, epochs=3, batch_size=8,
                                       optimizer=SGD(lr=0.05), seed=4)
            losses.append([r.loss for r in records])
        assert losses[0] == losses[1]

    def test_monotone_descent_smoke(self):
        """Full-batch SGD at a small rate: loss non-increasing up to at most
        two violations over 20 epochs."""
        ds = synthetic_blobs(samples_per_class=12, seed=0)
        module = blob_module(seed=1)
        n_train = len(ds.train_idx)
        records = train_classifier(ds, module, epochs=20, batch_size=n_train,
                                   optimizer=SGD(lr=1e-3), seed=0)
        losses = [r.loss for r in records]
        violations = sum(1 for a, b in zip(losses, losses[1:]) if b > a + 1e-12)
        assert violations <= 2

    def test_learns_blobs_quickly(self):
        ds = synthetic_blobs(seed=0)
        module = blob_module(seed=0)
        records = train_classifier(ds, module, epochs=25, batch_size=48,
                                   optimizer=Adam(lr=0.05), seed=0)
        assert max(r.metric for r in records) >= 0.9


class TestReturnsToGo:
    def test_undiscounted(self):
        np.testing.assert_array_equal(returns_to_go([1, 1, 1], 1.0), [3, 2, 1])

    def test_discounted(self):
        np.testing.assert_allclose(returns_to_go([1, 1], 0.5), [1.5, 1.0])


class TestReinforcePieces:
    def test_encode_state_bounded(self):
        enc = encode_state(np.array([100.0, -100.0, 0.1, 0.0]))
        assert (np.abs(enc) <= np.pi / 2).all()

    def test_policy_upstream_rows_sum_to_zero(self, rng):
        probs = softmax(rng.normal(size=(7, 2)))
        actions = rng.integers(0, 2, size=7)
        gains = rng.uniform(0, 10, size=7)
        upstream = (one_hot(actions, 2) - probs) * gains[:, None]
        np.testing.assert_allclose(upstream.sum(axis=1), 0.0, atol=1e-12)

    def test_sample_episode_deterministic(self):
        policy = cartpole_policy(seed=0)
        env = CartPoleEnv()
        rollouts = []
        for _ in range(2):
            rng = np.random.default_rng(5)
            states, actions, rewards, probs = sample_episode(env, policy, rng, 17)
            rollouts.append((states, actions, rewards))
        np.testing.assert_array_equal(rollouts[0][0], rollouts[1][0])
        np.testing.assert_array_equal(rollouts[0][1], rollouts[1][1])

    def test_policy_observable_count(self):
        assert cartpole_policy(seed=0).num_outputs == 2


class TestReinforceLoop:
    def test_runs_and_is_deterministic(self):
        returns = []
        for _ in range(2):
            policy = cartpole_policy(seed=2)
            optimizer = Adam(lr=0.001, per_set={"theta": 0.01, "lambda": 0.1})
            records = train_reinforce(CartPoleEnv(), policy,
                                      episodes_per_epoch=3, epochs=3,
                                      optimizer=optimizer, discount=0.99,
                                      seed=8)
            returns.append([r.metric for r in records])
        assert returns[0] == returns[1]

    def test_rejects_single_output_policy(self):
        circuit = build_reuploading_ansatz(4, 1, num_features=4)
        policy = QuantumModule(circuit, [parse_observable("ZIII")], "s",
                               [("theta", Uniform()), ("lambda", Constant(1.0))])
        with pytest.raises(ValueError, match="observable per action"):
            train_reinforce(CartPoleEnv(), policy, 1, 1, SGD())


class TestTrainingLog:
    def test_round_trip(self, tmp_path):
        from vqckit import EpochRecord
        records = [EpochRecord(0, 0.5, 0.75), EpochRecord(1, 0.25, 0.875)]
        path = tmp_path / "log.csv"
        write_training_log(records, path)
        lines = path.read_text().strip().splitlines()
        assert lines[0] == "epoch,loss,metric"
        assert lines[1] == "0,0.5,0.75"
        values = lines[2].split(",")
        assert float(values[1]) == 0.25
