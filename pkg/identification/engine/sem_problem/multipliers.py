"""
Multiplier recovery and reduced gradients.

Split x into the free block z = [theta | (u) | first n trajectory values] and the
dependent block w (remaining trajectory values). Dependent columns of the
Jacobian form a block-lower-triangular J_w, so

    lambda = -J_w^{-T} grad_w f                    (back substitution over time)
    reduced gradient = grad_z f + J_z^T lambda

At a feasible point the reduced gradient is the gradient of the unconstrained
simulation-error loss with respect to z.
"""

import logging
from dataclasses import dataclass
from typing import Optional

import numpy as np

from ..errors import DimensionError
from ..model_core.simulation import simulate_free_run, simulate_state_space
from ..utils.accepted_types import Variant
from .constraints import constraint_jacobian, constraint_residual, cost_and_gradient
from .problem import ProblemInstance
from .sparse_jacobian import SparseJacobian

logger = logging.getLogger(__name__)


def _back_substitute(problem: ProblemInstance, jacobian: SparseJacobian, rhs: np.ndarray) -> np.ndarray:
    """Solve J_w^T lambda = rhs block by block, last time step first."""
    r = jacobian.block_rows
    band = jacobian.dependent_band.values
    n_blocks, positions = band.shape[0], band.shape[2] // r
    rhs = rhs.reshape(n_blocks, r)
    multipliers = np.zeros((n_blocks, r))
    identity = problem.diagonal_is_identity
    last = positions - 1

    for t in range(n_blocks - 1, -1, -1):
        acc = rhs[t].copy()
        for s in range(t + 1, min(n_blocks, t + positions)):
            k = t - s + last
            acc -= band[s, :, k * r:(k + 1) * r].T @ multipliers[s]
        if identity:
            multipliers[t] = acc
        else:
            multipliers[t] = np.linalg.solve(band[t, :, last * r:].T, acc)
    return multipliers.ravel()


def recover_multipliers(problem: ProblemInstance, x: np.ndarray,
                        jacobian: Optional[SparseJacobian] = None,
                        gradient: Optional[np.ndarray] = None) -> np.ndarray:
    """lambda = -J_w^{-T} grad_w f, one multiplier per scalar constraint."""
    if jacobian is None:
        jacobian = constraint_jacobian(problem, x)
    if gradient is None:
        _, gradient = cost_and_gradient(problem, x)
    n_free = problem.layout.n_free
    return _back_substitute(problem, jacobian, -gradient[n_free:])


@dataclass(frozen=True, eq=False)
class ReducedGradientResult:
    """
    Attributes:
        gradient: reduced gradient over the free block z
        multipliers: lambda used to build it
        infeasibility: ||h(x)||_inf at the evaluation point
        stale: True when infeasibility exceeded the caller's bound, so the value
            is not the unconstrained-loss gradient
    """
    gradient: np.ndarray
    multipliers: np.ndarray
    infeasibility: float
    stale: bool


def reduced_gradient(problem: ProblemInstance, x: np.ndarray,
                     feasibility_bound: float = 1e-6) -> ReducedGradientResult:
    x = problem.check_point(x)
    _, gradient = cost_and_gradient(problem, x)
    jacobian = constraint_jacobian(problem, x)
    multipliers = recover_multipliers(problem, x, jacobian, gradient)
    full = gradient + jacobian.rmatvec(multipliers)
    infeasibility = float(np.max(np.abs(constraint_residual(problem, x)), initial=0.0))
    stale = not infeasibility <= feasibility_bound
    if stale:
        logger.warning(
            f"⚠️ Reduced gradient evaluated at an infeasible point (||h||_inf={infeasibility:.3e} "
            f"> {feasibility_bound:.3e}); value is stale"
        )
    return ReducedGradientResult(full[:problem.layout.n_free], multipliers, infeasibility, stale)


def rollout_point(problem: ProblemInstance, z: np.ndarray) -> np.ndarray:
    """Feasible x whose free block is z: the dependent trajectory is simulated from z."""
    layout = problem.layout
    z = np.asarray(z, dtype=np.float64)
    if z.shape != (layout.n_free,):
        raise DimensionError(f"z has shape {z.shape}, expected ({layout.n_free},)")
    theta = z[layout.theta_slice]
    head = z[layout.trajectory_offset:].reshape(layout.order, layout.trajectory_width)

    if problem.variant == Variant.SS:
        trajectory, _ = simulate_state_space(problem.model, theta, head[0], problem.dataset.inputs)
    else:
        inputs = (z[layout.input_slice].reshape(layout.n_samples, layout.input_width)
                  if problem.variant == Variant.EIV else problem.dataset.inputs)
        trajectory = simulate_free_run(problem.model, theta, head, inputs)
    return np.concatenate([z, trajectory[layout.order:].ravel()])


def unconstrained_loss(problem: ProblemInstance, z: np.ndarray) -> float:
    """Simulation-error loss as a function of the free block only (rolled out)."""
    cost, _ = cost_and_gradient(problem, rollout_point(problem, z))
    return cost
