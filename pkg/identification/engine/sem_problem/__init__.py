from .constraints import constraint_jacobian, constraint_residual, cost_and_gradient
from .multipliers import (
    ReducedGradientResult,
    recover_multipliers,
    reduced_gradient,
    rollout_point,
    unconstrained_loss,
)
from .problem import ProblemInstance, VariableBlocks, VariableLayout, assemble
from .sparse_jacobian import JacobianBand, SparseJacobian

__all__ = [
    "constraint_jacobian",
    "constraint_residual",
    "cost_and_gradient",
    "ReducedGradientResult",
    "recover_multipliers",
    "reduced_gradient",
    "rollout_point",
    "unconstrained_loss",
    "ProblemInstance",
    "VariableBlocks",
    "VariableLayout",
    "assemble",
    "JacobianBand",
    "SparseJacobian",
]
