"""
Multi-seed restarts over one shared problem.

Each seed draws its own initial theta; solves run in a bounded process pool and
are reported in seed order regardless of completion order.
"""

import logging
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from typing import List, Optional, Sequence

import numpy as np

from ..sem_problem.problem import ProblemInstance
from ..utils.accepted_types import SolveStatus
from .config import SolverConfig
from .flcmo import SolveResult, flcmo_log, solve

logger = logging.getLogger(__name__)

_USABLE = (SolveStatus.CONVERGED, SolveStatus.MAX_ITERS)


def solve_seed(problem: ProblemInstance, config: SolverConfig, seed: int,
               theta0: Optional[np.ndarray] = None) -> SolveResult:
    """Warm-start from `seed` and solve; top-level so worker processes can pickle it."""
    x0 = problem.initial_point(np.random.default_rng(seed), theta0)
    return solve(problem, x0, config, seed=seed)


@dataclass(frozen=True, eq=False)
class MultiSeedResult:
    results: List[SolveResult]

    @property
    def best(self) -> SolveResult:
        """Lowest final cost among usable runs; any run when none is usable."""
        usable = [r for r in self.results if r.status in _USABLE] or self.results
        return min(usable, key=lambda r: (r.final_cost, r.seed))

    @property
    def seeds(self) -> List[int]:
        return [r.seed for r in self.results]


def resolve_workers(max_workers: Optional[int], n_tasks: int) -> int:
    if max_workers is None:
        max_workers = os.cpu_count() or 1
    return max(1, min(int(max_workers), n_tasks))


def run_seeds(problem: ProblemInstance, config: SolverConfig, seeds: Sequence[int],
              theta0: Optional[np.ndarray] = None, max_workers: Optional[int] = None) -> MultiSeedResult:
    """
    Solve once per seed and keep every result.

    Args:
        problem: shared, immutable problem
        config: solver settings applied to every seed
        seeds: initialization seeds; results follow this order
        theta0: fixed starting theta for every seed (trajectory warm start still applies)
        max_workers: pool size; 1 runs inline in this process
    """
    seeds = [int(s) for s in seeds]
    if not seeds:
        raise ValueError("at least one seed is required")
    workers = resolve_workers(max_workers, len(seeds))
    flcmo_log(f"Running {len(seeds)} seed(s) on {workers} worker(s)")

    if workers == 1:
        results = [solve_seed(problem, config, seed, theta0) for seed in seeds]
    else:
        try:
            with ProcessPoolExecutor(max_workers=workers) as pool:
                futures = [pool.submit(solve_seed, problem, config, seed, theta0) for seed in seeds]
                results = [future.result() for future in futures]
        except Exception as e:
            logger.error(f"❌ Multi-seed pool failed: {e}")
            raise

    outcome = MultiSeedResult(results)
    best = outcome.best
    flcmo_log(f"Best seed {best.seed}: status={best.status.value}, f={best.final_cost:.6g}")
    return outcome
