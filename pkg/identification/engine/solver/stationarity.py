import logging
from dataclasses import asdict, dataclass
from typing import Dict, Optional

import numpy as np

from ..sem_problem.constraints import constraint_jacobian, constraint_residual, cost_and_gradient
from ..sem_problem.multipliers import recover_multipliers
from ..sem_problem.problem import ProblemInstance
from .config import SolverConfig

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class StationarityReport:
    """
    First-order optimality check of a candidate point.

    Attributes:
        constraint_norm: ||h(x)||_inf
        reduced_gradient_norm: ||grad_z f + J_z^T lambda||_inf over the free block
        lagrangian_gradient_norm: ||grad f + J^T lambda||_inf over all variables
        tolerance: bound each norm must stay under
        passed: all three norms below tolerance
    """
    constraint_norm: float
    reduced_gradient_norm: float
    lagrangian_gradient_norm: float
    tolerance: float
    passed: bool

    def to_dict(self) -> Dict[str, object]:
        return asdict(self)


def verify_stationarity(problem: ProblemInstance, x_star: np.ndarray,
                        config: Optional[SolverConfig] = None,
                        tolerance: Optional[float] = None) -> StationarityReport:
    """
    Check feasibility and stationarity of the Lagrangian at x_star.

    The multipliers come from back substitution on the dependent block, so the
    dependent components of grad f + J^T lambda vanish by construction and the
    free components are the reduced gradient.

    Args:
        problem: assembled SEM problem
        x_star: candidate point
        config: tolerance defaults to 10 * max(eps_f, eps_h) of this config
        tolerance: explicit bound, overrides config
    """
    if tolerance is None:
        config = config or SolverConfig()
        tolerance = 10.0 * max(config.eps_f, config.eps_h)
    x_star = problem.check_point(x_star)

    _, gradient = cost_and_gradient(problem, x_star)
    jacobian = constraint_jacobian(problem, x_star)
    multipliers = recover_multipliers(problem, x_star, jacobian, gradient)
    lagrangian_gradient = gradient + jacobian.rmatvec(multipliers)

    constraint_norm = float(np.max(np.abs(constraint_residual(problem, x_star)), initial=0.0))
    reduced_norm = float(np.max(np.abs(lagrangian_gradient[:problem.layout.n_free]), initial=0.0))
    lagrangian_norm = float(np.max(np.abs(lagrangian_gradient), initial=0.0))
    passed = all(value < tolerance for value in (constraint_norm, reduced_norm, lagrangian_norm))

    report = StationarityReport(constraint_norm, reduced_norm, lagrangian_norm, float(tolerance), passed)
    if not passed:
        logger.warning(f"⚠️ Stationarity check failed: {report}")
    return report
