import numpy as np
import pytest

from vqckit import (AngleExpression, Circuit, Gate, GateKind, ParameterSet,
                    adjoint_gradients, build_reuploading_ansatz, evolve,
                    expectations_all, finite_difference_gradients,
                    parameter_shift_gradients, parse_observable,
                    spsa_gradients, sweep_counters)

from conftest import random_circuit, random_observable

Z = parse_observable("Z")


def rx_circuit():
    return Circuit(1, (Gate(GateKind.RX, (0,),
                            AngleExpression(1.0, (("theta", 0),))),),
                   (ParameterSet("theta", 1),))


def z_observables(num_qubits, count):
    out = []
    for i in range(count):
        s = ["I"] * num_qubits
        s[i % num_qubits] = "Z"
        out.append(parse_observable("".join(s)))
    return out


def max_grad_diff(a, b):
    return max(np.abs(a.gradients[name] - b.gradients[name]).max(initial=0.0)
               for name in a.gradients)


def reuploading_case(rng, n, d, m):
    circuit = build_reuploading_ansatz(n, d, num_features=max(1, n - 1))
    binding = {
        "s": rng.uniform(-1.0, 1.0, circuit.set_named("s").size),
        "theta": rng.uniform(0.0, 2 * np.pi, circuit.set_named("theta").size),
        "lambda": rng.uniform(0.5, 1.5, circuit.set_named("lambda").size),
    }
    return circuit, binding, z_observables(n, m)


class TestAnalyticAnchors:
    @pytest.mark.parametrize("theta", [0.0, 0.3, np.pi / 2, np.pi])
    def test_exact_backends(self, theta):
        binding = {"theta": np.array([theta])}
        circuit = rx_circuit()
        for backend in (adjoint_gradients, parameter_shift_gradients):
            result = backend(circuit, binding, [Z], ["theta"])
            assert result.expectations[0] == pytest.approx(np.cos(theta), abs=1e-12)
            assert result.gradients["theta"][0, 0] == pytest.approx(
                -np.sin(theta), abs=1e-12)
        fd = finite_difference_gradients(circuit, binding, [Z], ["theta"])
        assert fd.expectations[0] == pytest.approx(np.cos(theta), abs=1e-12)
        assert fd.gradients["theta"][0, 0] == pytest.approx(-np.sin(theta), abs=1e-6)

    def test_spsa_single_parameter_is_central_difference(self):
        # (cos(t + c) - cos(t - c)) / 2c = -sin(t) * sin(c)/c for either
        # Rademacher sign, so one sample is already exact up to the sinc factor
        result = spsa_gradients(rx_circuit(), {"theta": np.array([np.pi / 2])},
                                [Z], ["theta"], c=0.01, samples=1, seed=123)
        expected = -np.sin(np.pi / 2) * np.sin(0.01) / 0.01
        assert result.gradients["theta"][0, 0] == pytest.approx(expected, abs=1e-12)
        assert result.gradients["theta"][0, 0] == pytest.approx(-0.99998, abs=1e-4)


class TestAdjoint:
    def test_shared_parameter_chain_rule(self):
        # RX(t) RX(t): f = cos(2t), df/dt = -2 sin(2t)
        gates = (Gate(GateKind.RX, (0,), AngleExpression(1.0, (("t", 0),))),
                 Gate(GateKind.RX, (0,), AngleExpression(1.0, (("t", 0),))))
        circuit = Circuit(1, gates, (ParameterSet("t", 1),))
        result = adjoint_gradients(circuit, {"t": np.array([0.4])}, [Z], ["t"])
        assert result.gradients["t"][0, 0] == pytest.approx(-2 * np.sin(0.8),
                                                            abs=1e-12)
        fd = finite_difference_gradients(circuit, {"t": np.array([0.4])},
                                         [Z], ["t"])
        assert result.gradients["t"][0, 0] == pytest.approx(
            fd.gradients["t"][0, 0], abs=1e-6)

    def test_sweep_structure(self, rng):
        circuit, binding, observables = reuploading_case(rng, 4, 2, 6)
        sweep_counters.reset()
        adjoint_gradients(circuit, binding, observables, ["theta", "lambda"])
        assert sweep_counters.snapshot() == (1, 1, 6)

    def test_expectations_match_forward_pass(self, rng):
        circuit, binding, observables = reuploading_case(rng, 5, 2, 4)
        result = adjoint_gradients(circuit, binding, observables,
                                   ["theta", "lambda"])
        standalone = expectations_all(observables, evolve(circuit, binding))
        np.testing.assert_allclose(result.expectations, standalone, atol=1e-12)

    def test_gradients_only_for_requested_sets(self, rng):
        circuit, binding, observables = reuploading_case(rng, 3, 1, 2)
        result = adjoint_gradients(circuit, binding, observables, ["lambda"])
        assert set(result.gradients) == {"lambda"}

    def test_result_shapes(self, rng):
        circuit, binding, observables = reuploading_case(rng, 3, 2, 4)
        result = adjoint_gradients(circuit, binding, observables,
                                   ["theta", "s"])
        assert result.expectations.shape == (4,)
        assert result.gradients["theta"].shape == (4, 12)
        assert result.gradients["s"].shape == (4, 2)

    def test_duplicate_wrt_rejected(self, rng):
        circuit, binding, observables = reuploading_case(rng, 2, 1, 1)
        with pytest.raises(ValueError, match="duplicate"):
            adjoint_gradients(circuit, binding, observables,
                              ["theta", "theta"])


class TestParameterShift:
    def test_rx_anchor(self):
        result = parameter_shift_gradients(
            rx_circuit(), {"theta": np.array([0.3])}, [Z], ["theta"])
        expected = (np.cos(0.3 + np.pi / 2) - np.cos(0.3 - np.pi / 2)) / 2
        assert result.gradients["theta"][0, 0] == pytest.approx(expected, abs=1e-12)
        assert expected == pytest.approx(-np.sin(0.3), abs=1e-15)

    def test_untrainable_occurrences_skipped(self):
        # the encoding-only rotation must not trigger shifted evaluations
        gates = (Gate(GateKind.RX, (0,), AngleExpression(1.0, (("s", 0),))),
                 Gate(GateKind.RY, (0,), AngleExpression(1.0, (("t", 0),))))
        circuit = Circuit(1, gates, (ParameterSet("s", 1, "encoding"),
                                     ParameterSet("t", 1)))
        binding = {"s": np.array([0.2]), "t": np.array([0.7])}
        sweep_counters.reset()
        parameter_shift_gradients(circuit, binding, [Z], ["t"])
        # 1 base evolution + 2 shifted for the single trainable occurrence
        assert sweep_counters.snapshot()[0] == 3

    def test_evolution_count_shared_parameters(self, rng):
        circuit, binding, observables = reuploading_case(rng, 3, 2, 2)
        occurrences = sum(1 for g in circuit.gates
                          if GateKind(g.kind).is_rotation)
        sweep_counters.reset()
        parameter_shift_gradients(circuit, binding, observables,
                                  ["theta", "lambda", "s"])
        assert sweep_counters.snapshot()[0] == 1 + 2 * occurrences

    def test_expectations_match_forward_pass(self, rng):
        circuit, binding, observables = reuploading_case(rng, 4, 2, 3)
        result = parameter_shift_gradients(circuit, binding, observables,
                                           ["theta"])
        standalone = expectations_all(observables, evolve(circuit, binding))
        np.testing.assert_allclose(result.expectations, standalone, atol=1e-12)


class TestSPSA:
    def test_argument_errors(self):
        binding = {"theta": np.array([0.3])}
        with pytest.raises(ValueError, match="c must be > 0"):
            spsa_gradients(rx_circuit(), binding, [Z], ["theta"], c=0.0)
        with pytest.raises(ValueError, match="samples"):
            spsa_gradients(rx_circuit(), binding, [Z], ["theta"], samples=0)

    def test_deterministic_per_seed(self, rng):
        circuit, binding, observables = reuploading_case(rng, 3, 2, 3)
        a = spsa_gradients(circuit, binding, observables, ["theta"],
                           samples=3, seed=99)
        b = spsa_gradients(circuit, binding, observables, ["theta"],
                           samples=3, seed=99)
        np.testing.assert_array_equal(a.gradients["theta"], b.gradients["theta"])

    def test_constant_output_gives_zero(self):
        # RZ on |0> leaves <Z> = 1 whatever the angle, so f+ - f- vanishes
        # up to the rounding of the phase arithmetic
        circuit = Circuit(1, (Gate(GateKind.RZ, (0,),
                                   AngleExpression(1.0, (("t", 0),))),),
                          (ParameterSet("t", 1),))
        for seed in (0, 1, 7):
            result = spsa_gradients(circuit, {"t": np.array([0.3])}, [Z],
                                    ["t"], seed=seed)
            assert abs(result.gradients["t"][0, 0]) <= 1e-12

    def test_expectations_match_forward_pass(self, rng):
        circuit, binding, observables = reuploading_case(rng, 3, 2, 3)
        result = spsa_gradients(circuit, binding, observables, ["theta"],
                                seed=5)
        standalone = expectations_all(observables, evolve(circuit, binding))
        np.testing.assert_allclose(result.expectations, standalone, atol=1e-12)

    def test_monte_carlo_convergence(self, rng):
        circuit, binding, observables = reuploading_case(rng, 4, 2, 3)
        exact = adjoint_gradients(circuit, binding, observables,
                                  ["theta", "lambda"])
        est = spsa_gradients(circuit, binding, observables,
                             ["theta", "lambda"], c=0.01, samples=2000, seed=11)
        for name in ("theta", "lambda"):
            ref = exact.gradients[name]
            got = est.gradients[name]
            mask = np.abs(ref) > 0.1
            assert mask.any()
            err = np.abs(got - ref)[mask]
            tol = 0.1 * np.maximum(1.0, np.abs(ref)[mask])
            assert (err <= tol).all()


class TestFiniteDifference:
    def test_rx_anchor(self):
        result = finite_difference_gradients(
            rx_circuit(), {"theta": np.array([0.3])}, [Z], ["theta"], h=1e-4)
        assert result.gradients["theta"][0, 0] == pytest.approx(-np.sin(0.3),
                                                                abs=1e-6)

    def test_zero_depth_circuit(self):
        circuit = Circuit(2, (), (ParameterSet("t", 3),))
        result = finite_difference_gradients(circuit, {"t": np.zeros(3)},
                                             z_observables(2, 2), ["t"])
        np.testing.assert_array_equal(result.gradients["t"], np.zeros((2, 3)))

    def test_bad_step(self):
        with pytest.raises(ValueError, match="h must be > 0"):
            finite_difference_gradients(rx_circuit(),
                                        {"theta": np.array([0.3])},
                                        [Z], ["theta"], h=0.0)


class TestThreeWayAgreement:
    def test_random_reuploading_circuits(self, rng):
        for _ in range(12):
            n = int(rng.integers(2, 7))
            d = int(rng.integers(1, 4))
            m = int(rng.integers(1, 7))
            circuit, binding, observables = reuploading_case(rng, n, d, m)
            wrt = ["theta", "lambda", "s"]
            adj = adjoint_gradients(circuit, binding, observables, wrt)
            shift = parameter_shift_gradients(circuit, binding, observables, wrt)
            fd = finite_difference_gradients(circuit, binding, observables, wrt)
            assert max_grad_diff(adj, shift) <= 1e-9
            assert max_grad_diff(adj, fd) <= 1e-5
            assert max_grad_diff(shift, fd) <= 1e-5

    def test_arbitrary_random_circuits(self, rng):
        """Random gate mixes with 0-2 factor expressions, shared references
        and general observables."""
        for _ in range(15):
            n = int(rng.integers(1, 4))
            circuit, binding = random_circuit(rng, n, int(rng.integers(2, 14)))
            observables = [random_observable(rng, n) for _ in
                           range(int(rng.integers(1, 4)))]
            wrt = ["theta", "lam", "s"]
            adj = adjoint_gradients(circuit, binding, observables, wrt)
            shift = parameter_shift_gradients(circuit, binding, observables, wrt)
            fd = finite_difference_gradients(circuit, binding, observables, wrt)
            assert max_grad_diff(adj, shift) <= 1e-9
            assert max_grad_diff(adj, fd) <= 1e-5

    def test_encoding_gradients_match_data_differences(self, rng):
        circuit, binding, observables = reuploading_case(rng, 4, 2, 3)
        adj = adjoint_gradients(circuit, binding, observables, ["s"])
        fd = finite_difference_gradients(circuit, binding, observables, ["s"])
        assert np.abs(adj.gradients["s"] - fd.gradients["s"]).max() <= 1e-5


class TestDegenerateCases:
    def test_no_observables_returns_empty_without_evolving(self, rng):
        circuit, binding, _ = reuploading_case(rng, 3, 1, 1)
        for backend in (adjoint_gradients, parameter_shift_gradients,
                        finite_difference_gradients, spsa_gradients):
            sweep_counters.reset()
            result = backend(circuit, binding, [], ["theta"])
            assert sweep_counters.snapshot() == (0, 0, 0)
            assert result.expectations.shape == (0,)
            assert result.gradients["theta"].shape == (0, circuit.set_named("theta").size)
