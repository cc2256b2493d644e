"""
Tests for the Adam baseline and the one-step least-squares estimator.
"""

import numpy as np
import pytest

from identification.engine.baselines import AdamConfig, AdamOptimizer, adam_fit, one_step_loss_and_gradient, pem_ls
from identification.engine.conftest import lti_dataset
from identification.engine.datagen import gen_maglev
from identification.engine.errors import ConfigError, RankDeficientRegressorError
from identification.engine.model_core.dataset import Weighting
from identification.engine.models import MAGLEV_TRUE_THETA, LtiFirstOrder, MaglevModel, MlpNioModel
from identification.engine.utils.accepted_types import SolveStatus


class TestAdamOptimizer:

    def test_first_step_moves_by_learning_rate(self):
        """Bias correction makes the first step lr * sign(g)"""
        params = np.array([1.0, -2.0, 0.5])
        AdamOptimizer(lr=0.1).step(params, np.array([3.0, -0.2, 1e-3]))
        np.testing.assert_allclose(params, [0.9, -1.9, 0.4], rtol=1e-4)
        print("✓ First Adam step has length lr per coordinate")

    def test_zero_gradient_keeps_params(self):
        params = np.array([0.25, 4.0])
        optimizer = AdamOptimizer()
        for _ in range(5):
            optimizer.step(params, np.zeros(2))
        np.testing.assert_array_equal(params, [0.25, 4.0])


class TestAdamFit:

    def setup_method(self):
        self.model = LtiFirstOrder()
        self.data = lti_dataset(n_samples=50)

    def test_true_parameters_are_stationary(self):
        config = AdamConfig(lr=1e-2, epochs=20)
        result = adam_fit(self.model, self.data, config, theta0=np.array([0.5, 1.0]))
        np.testing.assert_array_equal(result.theta, [0.5, 1.0])
        assert result.final_cost == 0.0
        assert result.status == SolveStatus.MAX_ITERS
        assert result.iterations == 20

    def test_frozen_parameter_stays_put(self):
        config = AdamConfig(lr=1e-2, epochs=600, frozen=(0,))
        result = adam_fit(self.model, self.data, config, theta0=np.array([0.5, 0.3]))
        assert result.theta[0] == 0.5
        assert abs(result.theta[1] - 1.0) < 0.05
        assert result.loss_trace[-1] < result.loss_trace[0]
        print(f"✓ theta_2 reached {result.theta[1]:.4f} with theta_1 frozen")

    def test_joint_initial_conditions(self):
        config = AdamConfig(lr=1e-2, epochs=50, fit_initial_conditions=True)
        result = adam_fit(self.model, self.data, config, theta0=np.array([0.4, 0.8]))
        assert result.initial_conditions.shape == (1, 1)
        assert result.initial_conditions[0, 0] != self.data.outputs[0, 0]

    def test_pinned_initial_conditions(self):
        result = adam_fit(self.model, self.data, AdamConfig(epochs=5), theta0=np.array([0.4, 0.8]))
        np.testing.assert_array_equal(result.initial_conditions, self.data.outputs[:1])

    def test_divergence_keeps_last_finite_iterate(self):
        data = lti_dataset(n_samples=1000)
        result = adam_fit(self.model, data, AdamConfig(epochs=10), theta0=np.array([3.0, 1.0]))
        assert result.status == SolveStatus.DIVERGED
        assert "diverged" in result.message
        np.testing.assert_array_equal(result.theta, [3.0, 1.0])
        assert result.iterations == 0

    def test_seeded_start_is_reproducible(self):
        config = AdamConfig(lr=1e-2, epochs=30, seed=7)
        first = adam_fit(self.model, self.data, config)
        second = adam_fit(self.model, self.data, config)
        np.testing.assert_array_equal(first.theta, second.theta)
        assert first.seed == 7

    def test_one_step_loss(self):
        config = AdamConfig(lr=2e-2, epochs=1000, loss="one_step")
        result = adam_fit(self.model, self.data, config, theta0=np.array([0.0, 0.0]))
        np.testing.assert_allclose(result.theta, [0.5, 1.0], atol=0.05)

    def test_frozen_index_out_of_range(self):
        with pytest.raises(IndexError):
            adam_fit(self.model, self.data, AdamConfig(epochs=1, frozen=(2,)))

    def test_unknown_option_rejected(self):
        with pytest.raises(ValueError):
            AdamConfig(learning_rate=0.1)


def test_one_step_gradient_matches_finite_differences(rng):
    """Prediction-error gradient of a small network"""
    model = MlpNioModel(order=2, n_outputs=1, n_inputs=1, hidden_layers=(3,))
    data = lti_dataset(n_samples=30, seed=5)
    theta = model.initial_theta(rng)
    weighting = Weighting.identity(1, ridge_coeff=0.1)
    _, gradient = one_step_loss_and_gradient(model, theta, data, weighting)

    numeric = np.empty_like(theta)
    for k in range(theta.size):
        delta = np.zeros_like(theta)
        delta[k] = 1e-6
        upper, _ = one_step_loss_and_gradient(model, theta + delta, data, weighting)
        lower, _ = one_step_loss_and_gradient(model, theta - delta, data, weighting)
        numeric[k] = (upper - lower) / 2e-6
    np.testing.assert_allclose(gradient, numeric, rtol=1e-5, atol=1e-8)


class TestLeastSquares:

    def test_lti_noiseless_recovery(self):
        theta = pem_ls(LtiFirstOrder(), lti_dataset(n_samples=50))
        np.testing.assert_allclose(theta, [0.5, 1.0], rtol=1e-12)

    def test_maglev_noiseless_recovery(self):
        data = gen_maglev(n_samples=200, seed=3, noise=None)
        theta = pem_ls(MaglevModel(), data)
        assert theta[0] == pytest.approx(MAGLEV_TRUE_THETA[0], rel=1e-8)
        assert abs(theta[1]) < 1e-12
        print(f"✓ LS recovered k_m={theta[0]:.6e}, k_0={theta[1]:.2e}")

    def test_weighting_does_not_move_exact_solution(self):
        theta = pem_ls(LtiFirstOrder(), lti_dataset(n_samples=50), Weighting(np.array([[4.0]])))
        np.testing.assert_allclose(theta, [0.5, 1.0], rtol=1e-12)

    def test_constant_current_is_rank_deficient(self):
        model = MaglevModel()
        current = np.full(40, model.equilibrium_current(0.02))
        data = gen_maglev(n_samples=40, noise=None, current=current)
        with pytest.raises(RankDeficientRegressorError) as exc_info:
            pem_ls(model, data)
        assert exc_info.value.column == 1

    def test_nonlinear_model_rejected(self):
        with pytest.raises(ConfigError):
            pem_ls(MlpNioModel(order=1, n_outputs=1, n_inputs=1), lti_dataset())
