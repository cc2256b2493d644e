import logging
from typing import Tuple

import numpy as np

from ..model_core.simulation import input_windows, output_windows
from ..utils.accepted_types import Variant
from .problem import ProblemInstance
from .sparse_jacobian import JacobianBand, SparseJacobian

logger = logging.getLogger(__name__)


def _weighted_error(residual: np.ndarray, weight: np.ndarray) -> Tuple[float, np.ndarray]:
    """Sum_t r_t^T W r_t and the rows of r W."""
    weighted = residual @ weight
    return float(np.sum(weighted * residual)), weighted


def cost_and_gradient(problem: ProblemInstance, x: np.ndarray) -> Tuple[float, np.ndarray]:
    """
    Simulation-error objective f(x) and its exact gradient.

    OE:  sum_t ||y~_t - y_t||^2_Wy + rho(theta)
    EIV: adds sum_t ||u~_t - u_t||^2_Wu
    SS:  sum_t ||y~_t - M2(x_t, u_t, theta)||^2_Wy + rho(theta)
    """
    blocks = problem.split(x)
    layout, weighting, data = problem.layout, problem.weighting, problem.dataset
    gradient = np.zeros(layout.n_vars)
    theta_gradient = gradient[layout.theta_slice]

    cost = weighting.ridge(blocks.theta)
    theta_gradient += weighting.ridge_gradient(blocks.theta)

    if problem.variant == Variant.SS:
        model = problem.model
        states = blocks.trajectory
        predicted = model.output_batch(states, data.inputs, blocks.theta)
        error_cost, weighted = _weighted_error(predicted - data.outputs, weighting.output_weight)
        jac = model.output_jacobians_batch(states, data.inputs, blocks.theta)
        gradient[layout.trajectory_slice] = 2.0 * np.einsum("tpi,tp->ti", jac.wrt_state, weighted).ravel()
        theta_gradient += 2.0 * np.einsum("tpk,tp->k", jac.wrt_theta, weighted)
        return cost + error_cost, gradient

    error_cost, weighted = _weighted_error(blocks.trajectory - data.outputs, weighting.output_weight)
    cost += error_cost
    gradient[layout.trajectory_slice] = 2.0 * weighted.ravel()

    if problem.variant == Variant.EIV:
        input_cost, weighted_inputs = _weighted_error(blocks.inputs - data.inputs, weighting.input_weight)
        cost += input_cost
        gradient[layout.input_slice] = 2.0 * weighted_inputs.ravel()
    return cost, gradient


def _windows(problem: ProblemInstance, blocks):
    order = problem.layout.order
    current, lagged = output_windows(blocks.trajectory, order)
    windows = (input_windows(blocks.inputs, order) if problem.variant == Variant.EIV
               else problem.data_input_windows)
    return current, lagged, windows


def constraint_residual(problem: ProblemInstance, x: np.ndarray) -> np.ndarray:
    """
    h(x) stacked time-major, one entry per scalar constraint.

    Trajectory values come from x, never from data. Non-finite model outputs
    propagate into h unchanged.
    """
    blocks = problem.split(x)
    if problem.variant == Variant.SS:
        states = blocks.trajectory
        successor = problem.model.state_batch(states[:-1], problem.dataset.inputs[:-1], blocks.theta)
        residual = (states[1:] - successor).ravel()
    else:
        current, lagged, windows = _windows(problem, blocks)
        with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
            residual = problem.model.residual_batch(current, lagged, windows, blocks.theta).ravel()
    if problem.constraint_scale is not None:
        residual = residual * problem.constraint_scale
    return residual


def constraint_jacobian(problem: ProblemInstance, x: np.ndarray) -> SparseJacobian:
    """
    Exact dh/dx in block form.

    Block t of rows has a dense theta segment, a band over the trajectory window
    (y_t .. y_{t+n} or x_t, x_{t+1}) and, for EIV, a band over u_t .. u_{t+n}.
    """
    blocks = problem.split(x)
    layout = problem.layout
    n_blocks = layout.n_samples - layout.order
    width = layout.trajectory_width
    m = layout.n_constraints
    trajectory_starts = layout.trajectory_offset + width * np.arange(n_blocks)

    if problem.variant == Variant.SS:
        states = blocks.trajectory
        jac = problem.model.state_jacobians_batch(states[:-1], problem.dataset.inputs[:-1], blocks.theta)
        identity = np.broadcast_to(np.eye(width), (n_blocks, width, width))
        band_values = np.concatenate([-jac.wrt_state, identity], axis=2)
        theta_block = -jac.wrt_theta.reshape(m, layout.n_params)
        bands = [JacobianBand(band_values, trajectory_starts)]
    else:
        order = layout.order
        current, lagged, windows = _windows(problem, blocks)
        jac = problem.model.residual_jacobians_batch(current, lagged, windows, blocks.theta)
        # window position k holds y_{t+k}; lag l of the target y_{t+n} is position n-1-l
        positions = [jac.wrt_lagged[:, order - 1 - k] for k in range(order)] + [jac.wrt_current]
        band_values = np.concatenate(positions, axis=2)
        theta_block = np.array(jac.wrt_theta.reshape(m, layout.n_params))
        bands = [JacobianBand(band_values, trajectory_starts)]
        if problem.variant == Variant.EIV:
            q = layout.input_width
            input_values = np.concatenate([jac.wrt_inputs[:, order - k] for k in range(order + 1)], axis=2)
            input_starts = layout.n_params + q * np.arange(n_blocks)
            bands.insert(0, JacobianBand(input_values, input_starts))

    if problem.constraint_scale is not None:
        row_scale = problem.constraint_scale
        theta_block = theta_block * row_scale[:, None]
        bands = [JacobianBand(band.values * row_scale.reshape(n_blocks, width, 1), band.column_starts)
                 for band in bands]

    return SparseJacobian(
        shape=(m, layout.n_vars),
        block_rows=width,
        theta_block=theta_block,
        bands=tuple(bands),
        trajectory_band=len(bands) - 1,
    )
