"""Tests for the unrolled network, losses and metrics."""

import math

import numpy as np
import pytest
from pydantic import ValidationError

from arnlab.dsl.zoo import zoo_program
from arnlab.network.losses import accuracy, cross_entropy, metrics, persistence_mse
from arnlab.network.net import Network, NetworkConfig, forward_net, is_node_count


def make_network(name="lstm", nodes=4, n_in=2, n_out=3, task="classification"):
    return Network.from_program(zoo_program(name), NetworkConfig(nodes=nodes, n_in=n_in, n_out=n_out, task=task))


class TestNetworkConfig:
    """Test layer size validation."""

    @pytest.mark.parametrize("n", [2, 4, 16, 128])
    def test_valid_node_counts(self, n):
        assert is_node_count(n)
        assert NetworkConfig(nodes=n, n_in=1, n_out=1, task="regression").nodes == n

    @pytest.mark.parametrize("n", [0, 1, 3, 12, 256])
    def test_invalid_node_counts(self, n):
        with pytest.raises(ValidationError):
            NetworkConfig(nodes=n, n_in=1, n_out=1, task="regression")

    def test_unknown_task(self):
        with pytest.raises(ValidationError):
            NetworkConfig(nodes=4, n_in=1, n_out=1, task="ranking")


class TestForward:
    """Test prediction shapes and simple closed-form outputs."""

    def test_zero_weights_give_uniform_softmax(self, rng):
        network = make_network(n_out=5)
        weights = {k: np.zeros_like(v) for k, v in network.init_weights(0).items()}
        logits = network.predict(weights, rng.normal(size=(6, 7, 2)))
        assert logits.shape == (6, 5)
        targets = np.eye(5)[rng.integers(5, size=6)]
        assert cross_entropy(logits, targets) == pytest.approx(math.log(5), abs=1e-12)

    def test_regression_shape(self, rng):
        network = make_network("pendulum-small", nodes=8, n_in=4, n_out=4, task="regression")
        predictions = network.predict(network.init_weights(3), rng.normal(size=(2, 9, 4)))
        assert predictions.shape == (2, 9, 4)

    def test_single_timestep(self, rng):
        network = make_network("pendulum-small", n_in=1, n_out=1, task="regression")
        predictions = network.predict(network.init_weights(3), rng.normal(size=(3, 1, 1)))
        assert predictions.shape == (3, 1, 1)
        assert np.isfinite(predictions).all()

    def test_predictions_are_deterministic(self, rng):
        network = make_network()
        inputs = rng.normal(size=(4, 5, 2))
        a = network.predict(network.init_weights(9), inputs)
        b = network.predict(network.init_weights(9), inputs)
        np.testing.assert_array_equal(a, b)

    def test_batch_rows_are_independent(self, rng):
        network = make_network()
        weights = network.init_weights(2)
        inputs = rng.normal(size=(4, 5, 2))
        together = network.predict(weights, inputs)
        alone = network.predict(weights, inputs[1:2])
        np.testing.assert_allclose(together[1:2], alone, atol=1e-14)

    @pytest.mark.parametrize("name", ["lstm", "a1-3w"])
    def test_neuron_order_does_not_matter(self, name, rng):
        network = make_network(name, nodes=8)
        weights = network.init_weights(4)
        perm = rng.permutation(8)
        permuted = dict(weights)
        permuted["U"] = weights["U"][:, perm, :]
        permuted["W"] = weights["W"][:, perm][:, :, perm]
        permuted["P"] = weights["P"][:, perm][:, :, perm]
        permuted["b"] = weights["b"][:, perm]
        permuted["aux"] = weights["aux"][:, perm]
        permuted["V1"] = weights["V1"][:, perm]
        inputs = rng.normal(size=(3, 6, 2))
        np.testing.assert_allclose(network.predict(permuted, inputs), network.predict(weights, inputs), atol=1e-10)

    def test_forward_net_matches_predict(self, rng):
        network = make_network("a2-crop", n_out=2)
        weights = network.init_weights(1)
        inputs = rng.normal(size=(3, 4, 2))
        np.testing.assert_array_equal(
            forward_net(network.config, network.kernel, weights, inputs), network.predict(weights, inputs)
        )

    @pytest.mark.parametrize("shape", [(4, 5), (4, 5, 3)])
    def test_wrong_input_shape(self, shape):
        network = make_network()
        with pytest.raises(ValueError):
            network.predict(network.init_weights(0), np.zeros(shape))

    def test_kernel_size_mismatch(self):
        network = make_network(nodes=4)
        with pytest.raises(ValueError):
            Network(NetworkConfig(nodes=8, n_in=2, n_out=3, task="classification"), network.kernel)


class TestMetrics:
    """Test evaluation metrics."""

    def test_accuracy_ties_go_to_first_class(self):
        logits = np.array([[1.0, 1.0, 0.0], [0.0, 2.0, 2.0]])
        targets = np.array([[1.0, 0.0, 0.0], [0.0, 0.0, 1.0]])
        assert accuracy(logits, targets) == 0.5

    def test_cross_entropy_of_confident_prediction(self):
        logits = np.array([[0.0, math.log(3.0)]])
        assert cross_entropy(logits, np.array([[0.0, 1.0]])) == pytest.approx(-math.log(0.75))

    def test_metric_keys(self):
        assert set(metrics(np.zeros((2, 3)), np.eye(3)[:2], "classification")) == {"cce", "accuracy"}
        assert set(metrics(np.zeros((2, 3, 1)), np.ones((2, 3, 1)), "regression")) == {"mse"}

    def test_regression_mse(self):
        assert metrics(np.zeros((2, 3, 1)), np.full((2, 3, 1), 2.0), "regression")["mse"] == 4.0

    def test_persistence_baseline(self):
        inputs = np.array([[[0.0], [1.0], [3.0]]])
        targets = np.array([[[1.0], [3.0], [3.0]]])
        assert persistence_mse(inputs, targets) == pytest.approx(5.0 / 3.0)

    def test_persistence_needs_matching_shapes(self):
        with pytest.raises(ValueError):
            persistence_mse(np.zeros((1, 3, 2)), np.zeros((1, 3, 1)))
