"""
Gradient of the unconstrained simulation-error loss by sensitivity propagation.

With z = [theta | y_1 .. y_n] and the rollout y_t = M(y_{t-1..t-n}, u_{t..t-n}, theta),
the sensitivities S_t = dy_t/dz obey

    S_t = dM/dtheta [I 0] + sum_l dM/dy_{t-1-l} S_{t-1-l},     S_t = [0 e_t] for t < n

which is forward-mode BPTT. A finite horizon H keeps only the chain terms
that reach back at most H samples.
"""

import logging
from typing import Optional, Tuple

import numpy as np

from ..errors import DimensionError
from ..model_core.dataset import Dataset, Weighting
from ..model_core.model_spec import LocalJacobians, ModelSpec
from ..model_core.simulation import input_windows, output_windows, simulate_free_run

logger = logging.getLogger(__name__)


def _local_jacobians(model: ModelSpec, theta: np.ndarray, outputs: np.ndarray,
                     inputs: np.ndarray) -> LocalJacobians:
    _, lagged = output_windows(outputs, model.order)
    return model.jacobians_batch(lagged, input_windows(inputs, model.order), theta)


def _seed_sensitivity(model: ModelSpec, t: int) -> np.ndarray:
    """dy_t/dz for an initial-condition sample t < n."""
    p, n_theta = model.n_outputs, model.n_params
    block = np.zeros((p, n_theta + p * model.order))
    block[:, n_theta + t * p:n_theta + (t + 1) * p] = np.eye(p)
    return block


def _propagate(jac: LocalJacobians, sens: np.ndarray, t: int, order: int, n_theta: int,
               start: int = 0) -> np.ndarray:
    """One recursion step; samples before `start` are treated as constants."""
    i = t - order
    value = np.zeros_like(sens[t])
    value[:, :n_theta] = jac.wrt_theta[i]
    for lag in range(order):
        s = t - 1 - lag
        if s >= start:
            value += jac.wrt_outputs[i, lag] @ sens[s]
    return value


def output_sensitivities(model: ModelSpec, theta: np.ndarray, init_outputs: np.ndarray,
                         inputs: np.ndarray, horizon: Optional[int] = None) -> Tuple[np.ndarray, np.ndarray]:
    """
    Free-run outputs and their sensitivities to z = [theta | y_1 .. y_n].

    Args:
        model: explicit NIO model
        theta: parameters
        init_outputs: (n, p) initial conditions
        inputs: (N, q) input sequence
        horizon: keep only chain terms spanning at most this many samples; None for the full chain

    Returns:
        outputs (N, p) and sensitivities (N, p, n_theta + p n)

    Raises:
        DivergedSimulationError: the rollout left the finite range
    """
    if horizon is not None and horizon < 1:
        raise DimensionError(f"horizon must be positive, got {horizon}")
    theta = model.check_theta(theta)
    outputs = simulate_free_run(model, theta, init_outputs, inputs)
    inputs = np.asarray(inputs, dtype=np.float64).reshape(outputs.shape[0], -1)
    jac = _local_jacobians(model, theta, outputs, inputs)

    n, p, n_theta = model.order, model.n_outputs, model.n_params
    n_samples = outputs.shape[0]
    sens = np.zeros((n_samples, p, n_theta + p * n))
    for t in range(n):
        sens[t] = _seed_sensitivity(model, t)

    if horizon is None or horizon >= n_samples:
        for t in range(n, n_samples):
            sens[t] = _propagate(jac, sens, t, n, n_theta)
        return outputs, sens

    scratch = np.zeros_like(sens)
    for t in range(n, n_samples):
        start = t - horizon
        for s in range(max(start, 0), t + 1):
            scratch[s] = _seed_sensitivity(model, s) if s < n else _propagate(jac, scratch, s, n, n_theta, start)
        sens[t] = scratch[t]
    return outputs, sens


def simulation_loss(outputs: np.ndarray, dataset: Dataset, weighting: Weighting, theta: np.ndarray) -> float:
    error = outputs - dataset.outputs
    return float(np.sum((error @ weighting.output_weight) * error)) + weighting.ridge(theta)


def bptt_gradient(model: ModelSpec, theta: np.ndarray, init_outputs: np.ndarray, dataset: Dataset,
                  weighting: Optional[Weighting] = None, horizon: Optional[int] = None) -> np.ndarray:
    """
    Gradient of sum_t ||y~_t - y_t||^2_W + rho(theta) with respect to [theta | y_1 .. y_n].

    The sum runs over every sample, initial conditions included, so at a
    feasible point the result equals the reduced gradient of the constrained
    problem.
    """
    _, gradient = bptt_loss_and_gradient(model, theta, init_outputs, dataset, weighting, horizon)
    return gradient


def bptt_loss_and_gradient(model: ModelSpec, theta: np.ndarray, init_outputs: np.ndarray, dataset: Dataset,
                           weighting: Optional[Weighting] = None,
                           horizon: Optional[int] = None) -> Tuple[float, np.ndarray]:
    weighting = weighting or Weighting.identity(model.n_outputs)
    theta = model.check_theta(theta)
    outputs, sens = output_sensitivities(model, theta, init_outputs, dataset.inputs, horizon)
    weighted = (outputs - dataset.outputs) @ weighting.output_weight
    gradient = 2.0 * np.einsum("tp,tpk->k", weighted, sens)
    gradient[:model.n_params] += weighting.ridge_gradient(theta)
    return simulation_loss(outputs, dataset, weighting, theta), gradient
