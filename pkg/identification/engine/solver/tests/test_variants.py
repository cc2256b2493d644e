"""
FL-CMO steps on the errors-in-variables, state-space and implicit maglev layouts,
checked against the dense formula.
"""

import numpy as np
import pytest

from identification.engine.conftest import lti_dataset
from identification.engine.datagen import NoiseSpec, add_noise, gen_maglev
from identification.engine.model_core.dataset import Dataset, Weighting
from identification.engine.models import LinearStateSpaceModel, LtiFirstOrder, MaglevModel
from identification.engine.sem_problem import (
    assemble,
    constraint_jacobian,
    constraint_residual,
    cost_and_gradient,
)
from identification.engine.solver import SolverConfig, flcmo_step, solve

INPUT_WEIGHTS = (0.1, 1.0, 10.0)


def _dense_step(problem, x, gain, tau):
    _, gradient = cost_and_gradient(problem, x)
    residual = constraint_residual(problem, x)
    jac = constraint_jacobian(problem, x).to_dense()
    sigma = np.linalg.solve(jac @ jac.T, jac @ gradient + gain * residual)
    return x + tau * (-gradient - jac.T @ sigma)


def _eiv_problem(input_weight, n_samples=15, noisy=False):
    data = lti_dataset(n_samples=n_samples, seed=6)
    if noisy:
        data = add_noise(data, NoiseSpec(kind="gaussian", amplitude=0.05, errors_in_variables=True,
                                         input_amplitude=0.05, seed=2))
    return assemble(LtiFirstOrder(), data, Weighting(np.eye(1), input_weight * np.eye(1)), "eiv")


@pytest.mark.parametrize("input_weight", INPUT_WEIGHTS)
def test_eiv_step_matches_dense_oracle(rng, input_weight):
    """Two-band Jacobian (inputs and outputs) through the sparse factorization"""
    problem = _eiv_problem(input_weight)
    x = rng.standard_normal(problem.n_vars)
    config = SolverConfig(K=3.0, tau=0.01)
    x_next, diagnostics = flcmo_step(problem, x, config)
    oracle = _dense_step(problem, x, 3.0, 0.01)
    assert np.linalg.norm(x_next - oracle) / np.linalg.norm(oracle) < 1e-10
    assert diagnostics.flops.total_flops > 0


@pytest.mark.parametrize("input_weight", INPUT_WEIGHTS)
def test_eiv_truth_is_fixed_point(input_weight):
    problem = _eiv_problem(input_weight)
    data = problem.dataset
    x = problem.compose(np.array([0.5, 1.0]), data.outputs, data.inputs)
    x_next, diagnostics = flcmo_step(problem, x, SolverConfig())
    np.testing.assert_allclose(x_next, x, atol=1e-12)
    assert diagnostics.constraint_norm < 1e-12


@pytest.mark.parametrize("input_weight", INPUT_WEIGHTS)
def test_eiv_solve_enforces_constraints(input_weight):
    """Step size scaled down with the input weight keeps the Euler loop stable"""
    problem = _eiv_problem(input_weight, n_samples=30, noisy=True)
    tau = 1e-2 / max(1.0, input_weight)
    x0 = problem.initial_point(theta0=np.array([0.3, 0.7]))
    result = solve(problem, x0, SolverConfig(K=5.0, tau=tau, max_iters=300, track_flops=False))
    records = list(result.trace)
    assert np.all(np.isfinite(result.x))
    assert records[-1].constraint_norm < 0.5 * records[0].constraint_norm
    assert result.estimated_inputs.shape == (30, 1)
    print(f"✓ W_u={input_weight}: ||h|| {records[0].constraint_norm:.3e} -> {records[-1].constraint_norm:.3e}")


def test_state_space_step_matches_dense_oracle(rng):
    model = LinearStateSpaceModel(n_states=2, n_outputs=1, n_inputs=1)
    data = Dataset(rng.standard_normal((12, 1)), rng.standard_normal((12, 1)))
    problem = assemble(model, data, variant="ss")
    x = 0.5 * rng.standard_normal(problem.n_vars)
    x_next, _ = flcmo_step(problem, x, SolverConfig(K=1.0, tau=0.05))
    oracle = _dense_step(problem, x, 1.0, 0.05)
    assert np.linalg.norm(x_next - oracle) / np.linalg.norm(oracle) < 1e-10


@pytest.mark.parametrize("scale", [None, "auto"])
def test_maglev_step_matches_dense_oracle(scale):
    """Implicit residual: the dependent diagonal blocks are not the identity"""
    data = gen_maglev(n_samples=25, seed=4)
    problem = assemble(MaglevModel(), data, constraint_scale=scale)
    x = problem.initial_point(theta0=np.array([1.5e-4, 2.0e-5]))
    x_next, _ = flcmo_step(problem, x, SolverConfig(K=2.0, tau=1e-3))
    oracle = _dense_step(problem, x, 2.0, 1e-3)
    assert np.linalg.norm(x_next - oracle) / np.linalg.norm(oracle) < 1e-10

    dense_next, _ = flcmo_step(problem, x, SolverConfig(K=2.0, tau=1e-3, dense_fallback=True))
    np.testing.assert_allclose(dense_next, x_next, rtol=1e-9, atol=1e-15)
