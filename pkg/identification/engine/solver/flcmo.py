"""
Euler-discretized FL-CMO dynamics.

Each iteration computes

    sigma = (J J^T)^{-1} (J grad f + K h)
    dx    = -grad f - J^T sigma
    x    <- x + tau dx

with J J^T factored through the Q-less QR of J^T. The loop stops at the first
iterate where ||dx||_2 < eps_f and ||h||_2 < eps_h; that iterate is returned
unchanged.
"""

import logging
import time
from dataclasses import dataclass, field
from typing import Callable, Optional, Tuple

import numpy as np

from ..errors import RankBreakdownError, SolverDivergenceError
from ..sem_problem.constraints import constraint_jacobian, constraint_residual, cost_and_gradient
from ..sem_problem.problem import ProblemInstance
from ..sem_problem.sparse_jacobian import SparseJacobian
from ..sparse_qr.flop_ledger import FlopLedger
from ..sparse_qr.flop_model import predicted_column_counts
from ..sparse_qr.matvec import sparse_matvec, sparse_matvec_t
from ..sparse_qr.qless_qr import (
    dense_solve_step_system,
    dense_triangular_factor,
    qless_qr,
    solve_step_system,
)
from ..utils.accepted_types import SolveStatus, Variant
from ..utils.global_config import BREAKDOWN_RTOL
from .config import SolverConfig
from .trace import IterationRecord, SolverTrace

logger = logging.getLogger(__name__)


def flcmo_log(message: str) -> None:
    logger.info(f"[FLCMO] {message}")


@dataclass(frozen=True, eq=False)
class StepDiagnostics:
    """
    Quantities of one step, all evaluated at the step's starting point.

    Attributes:
        cost: f(x)
        constraint_norm: ||h(x)||_2
        step_norm: ||dx||_2
        sigma: multiplier-like vector (J J^T)^{-1} (J grad f + K h)
        factorization_ms: wall time of the triangular factorization
        flops: ledger charged by this step
    """
    cost: float
    constraint_norm: float
    step_norm: float
    sigma: np.ndarray
    factorization_ms: float
    flops: FlopLedger = field(default_factory=FlopLedger)

    def meets(self, config: SolverConfig) -> bool:
        return self.step_norm < config.eps_f and self.constraint_norm < config.eps_h


def _dense_sigma(jacobian: SparseJacobian, rhs: np.ndarray) -> np.ndarray:
    upper = dense_triangular_factor(jacobian)
    row_norms = np.sqrt(np.asarray(jacobian.csr.multiply(jacobian.csr).sum(axis=1)).ravel())
    diagonal = np.abs(np.diag(upper))
    broken = np.flatnonzero(~(diagonal >= BREAKDOWN_RTOL * row_norms) | (row_norms == 0.0))
    if broken.size:
        k = int(broken[0])
        raise RankBreakdownError(k, float(upper[k, k]), float(row_norms[k]))
    return dense_solve_step_system(upper, rhs)


def _expected_pattern(problem: ProblemInstance, jacobian: SparseJacobian) -> Optional[np.ndarray]:
    """Predicted band-plus-fill column counts for single-band layouts, None otherwise."""
    layout = problem.layout
    width = layout.trajectory_width
    if len(jacobian.bands) != 1 or layout.n_params < 1 or layout.n_constraints <= layout.n_params:
        return None
    if jacobian.row_nnz != layout.n_params + width * (layout.order + 1):
        return None
    return predicted_column_counts(layout.n_params, width, layout.order, layout.n_samples)


def flcmo_step(problem: ProblemInstance, x: np.ndarray, config: SolverConfig,
               iteration: int = 0) -> Tuple[np.ndarray, StepDiagnostics]:
    """
    One Euler step of the multiplier dynamics.

    Args:
        problem: assembled SEM problem
        x: current point, length problem.n_vars
        config: gain, step size and factorization options
        iteration: index reported in errors

    Returns:
        (x + tau dx, diagnostics at x)

    Raises:
        RankBreakdownError: J lost row rank
        FillPatternError: tracked factorization left the predicted fill pattern
        SolverDivergenceError: non-finite cost, constraints or step
    """
    x = problem.check_point(x)
    ledger = FlopLedger()
    cost, gradient = cost_and_gradient(problem, x)
    residual = constraint_residual(problem, x)
    if not (np.isfinite(cost) and np.all(np.isfinite(residual)) and np.all(np.isfinite(gradient))):
        raise SolverDivergenceError(iteration)

    jacobian = constraint_jacobian(problem, x)
    if not np.all(np.isfinite(jacobian.csr.data)):
        raise SolverDivergenceError(iteration)
    rhs = sparse_matvec(jacobian, gradient, ledger) + config.gain * residual

    started = time.perf_counter()
    if config.dense_fallback:
        sigma = _dense_sigma(jacobian, rhs)
    else:
        expected = _expected_pattern(problem, jacobian) if config.track_flops else None
        factor = qless_qr(jacobian, ledger, track_flops=config.track_flops, expected_counts=expected)
        sigma = solve_step_system(factor, rhs)
    factorization_ms = (time.perf_counter() - started) * 1e3

    step = -gradient - sparse_matvec_t(jacobian, sigma, ledger)
    step_norm = float(np.linalg.norm(step))
    if not np.isfinite(step_norm):
        raise SolverDivergenceError(iteration)

    diagnostics = StepDiagnostics(
        cost=float(cost),
        constraint_norm=float(np.linalg.norm(residual)),
        step_norm=step_norm,
        sigma=sigma,
        factorization_ms=factorization_ms,
        flops=ledger,
    )
    return x + config.tau * step, diagnostics


@dataclass(frozen=True, eq=False)
class SolveResult:
    """
    Outcome of one solve.

    Attributes:
        x: final point (the converged iterate, or the last one reached)
        theta: parameter block of x
        initial_conditions: (n, width) first trajectory values, estimated jointly with theta
        trace: per-iteration records
        status: converged, max-iters, diverged or rank-breakdown
        wall_time: seconds spent in the loop
        message: failure detail, empty on success
        seed: initialization seed, when the solve was seeded
    """
    x: np.ndarray
    theta: np.ndarray
    initial_conditions: np.ndarray
    trace: SolverTrace
    status: SolveStatus
    wall_time: float
    message: str = ""
    seed: Optional[int] = None
    estimated_inputs: Optional[np.ndarray] = None

    @property
    def converged(self) -> bool:
        return self.status == SolveStatus.CONVERGED

    @property
    def iterations(self) -> int:
        return len(self.trace)

    @property
    def final_cost(self) -> float:
        last = self.trace.last
        return float("inf") if last is None else last.cost


def _result(problem: ProblemInstance, x: np.ndarray, trace: SolverTrace, status: SolveStatus,
            started: float, message: str = "", seed: Optional[int] = None) -> SolveResult:
    blocks = problem.split(x)
    layout = problem.layout
    return SolveResult(
        x=x,
        theta=blocks.theta.copy(),
        initial_conditions=blocks.trajectory[:layout.order].copy(),
        trace=trace,
        status=status,
        wall_time=time.perf_counter() - started,
        message=message,
        seed=seed,
        estimated_inputs=blocks.inputs.copy() if problem.variant == Variant.EIV else None,
    )


def solve(problem: ProblemInstance, x0: np.ndarray, config: Optional[SolverConfig] = None,
          callback: Optional[Callable[[int, np.ndarray, StepDiagnostics], None]] = None,
          seed: Optional[int] = None) -> SolveResult:
    """
    Iterate flcmo_step until both stopping criteria hold or max_iters is reached.

    Failures are reported through SolveResult.status; the returned x is then the
    last finite iterate.
    """
    config = config or SolverConfig()
    x = problem.check_point(x0).copy()
    if not np.all(np.isfinite(x)):
        raise SolverDivergenceError(0, "initial point contains non-finite values")

    trace = SolverTrace()
    cumulative = FlopLedger()
    started = time.perf_counter()
    debug = logger.isEnabledFor(logging.DEBUG)

    for iteration in range(config.max_iters):
        try:
            x_next, diagnostics = flcmo_step(problem, x, config, iteration)
        except RankBreakdownError as e:
            logger.error(f"❌ [FLCMO] {e}")
            return _result(problem, x, trace, SolveStatus.RANK_BREAKDOWN, started, str(e), seed)
        except SolverDivergenceError as e:
            logger.error(f"❌ [FLCMO] {e}")
            return _result(problem, x, trace, SolveStatus.DIVERGED, started, str(e), seed)

        cumulative.absorb(diagnostics.flops)
        trace.append(IterationRecord(
            iteration=iteration,
            cost=diagnostics.cost,
            constraint_norm=diagnostics.constraint_norm,
            step_norm=diagnostics.step_norm,
            factorization_ms=diagnostics.factorization_ms,
            cumulative_flops=cumulative.total_flops,
        ))
        if callback is not None:
            callback(iteration, x, diagnostics)

        if diagnostics.meets(config):
            flcmo_log(f"✅ Converged after {iteration} iterations: f={diagnostics.cost:.6g}, "
                      f"||h||={diagnostics.constraint_norm:.3e}, ||dx||={diagnostics.step_norm:.3e}")
            return _result(problem, x, trace, SolveStatus.CONVERGED, started, seed=seed)

        if debug:
            logger.debug(f"[FLCMO] it={iteration} f={diagnostics.cost:.6g} "
                         f"||h||={diagnostics.constraint_norm:.3e} ||dx||={diagnostics.step_norm:.3e}")
        elif iteration % config.log_every == 0:
            flcmo_log(f"it={iteration} f={diagnostics.cost:.6g} ||h||={diagnostics.constraint_norm:.3e}")
        x = x_next

    logger.warning(f"⚠️ [FLCMO] Stopped at max_iters={config.max_iters} without meeting the tolerances")
    return _result(problem, x, trace, SolveStatus.MAX_ITERS, started, seed=seed)
