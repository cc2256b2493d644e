"""
Sparse versus dense FL-CMO step timing and FLOP predictions.
"""

import logging
import time
from typing import Iterable, Optional, Tuple

import numpy as np
import pandas as pd

from ..model_core.dataset import Dataset
from ..models.mlp_nio import MlpNioModel
from ..sem_problem.problem import assemble
from ..solver.config import SolverConfig
from ..solver.flcmo import flcmo_step
from ..sparse_qr.flop_model import predict_flops

logger = logging.getLogger(__name__)

BENCH_SIZES = (1000, 5000, 10000)
BENCH_COLUMNS = ["N", "m", "n_vars", "dense_ms", "sparse_ms", "ratio", "flops_pred", "flops_meas"]


def bench_log(message: str) -> None:
    logger.info(f"[BENCH] {message}")


def _best_of(reps: int, run) -> float:
    """Minimum wall time over `reps` calls after one untimed warm-up, in milliseconds."""
    run()
    best = float("inf")
    for _ in range(reps):
        started = time.perf_counter()
        run()
        best = min(best, time.perf_counter() - started)
    return best * 1e3


def bench_problem(n_samples: int, order: int = 2, n_outputs: int = 2, hidden: Tuple[int, ...] = (5,),
                  seed: int = 0):
    """Output-error NNOE problem of the requested size on random data, and its warm-start point."""
    rng = np.random.default_rng(seed)
    model = MlpNioModel(order=order, n_outputs=n_outputs, n_inputs=1, hidden_layers=hidden)
    dataset = Dataset(rng.standard_normal((n_samples, 1)), 0.5 * rng.standard_normal((n_samples, n_outputs)))
    problem = assemble(model, dataset)
    return problem, problem.initial_point(rng)


def bench_qr(sizes: Iterable[int] = BENCH_SIZES, reps: int = 3, order: int = 2, n_outputs: int = 2,
             hidden: Tuple[int, ...] = (5,), seed: int = 0) -> pd.DataFrame:
    """
    Time one full flcmo_step through the sparse factorization and through the
    dense LAPACK fallback for each N.

    The measured FLOP column is the ledger of a separate, instrumented sparse step;
    timed steps run without instrumentation.
    """
    rows = []
    sparse_config = SolverConfig(track_flops=False)
    dense_config = SolverConfig(track_flops=False, dense_fallback=True)
    for n_samples in sizes:
        problem, x = bench_problem(int(n_samples), order, n_outputs, hidden, seed)
        layout = problem.layout
        dense_ms = _best_of(reps, lambda: flcmo_step(problem, x, dense_config))
        sparse_ms = _best_of(reps, lambda: flcmo_step(problem, x, sparse_config))
        _, diagnostics = flcmo_step(problem, x, SolverConfig(track_flops=True))
        predicted = predict_flops(layout.n_params, n_outputs, order, int(n_samples))
        rows.append({
            "N": int(n_samples),
            "m": layout.n_constraints,
            "n_vars": layout.n_vars,
            "dense_ms": dense_ms,
            "sparse_ms": sparse_ms,
            "ratio": dense_ms / sparse_ms,
            "flops_pred": predicted.factorization_flops,
            "flops_meas": diagnostics.flops.factorization_flops,
        })
        bench_log(f"N={n_samples}: dense {dense_ms:.1f} ms, sparse {sparse_ms:.1f} ms, "
                  f"speedup {dense_ms / sparse_ms:.2f}x")
    return pd.DataFrame(rows, columns=BENCH_COLUMNS)


def flops_table(n_params: int, n_outputs: int, order: int, n_samples: int,
                families: Optional[Iterable[str]] = None) -> pd.DataFrame:
    """Predicted counts as (quantity, value) rows, optionally restricted to `exact`, `printed`, `dense` or `fill`."""
    counts = predict_flops(n_params, n_outputs, order, n_samples).to_dict()
    dimensions = ("n_params", "n_outputs", "order", "n_samples", "m", "n_vars")
    wanted = set(families or ("exact", "printed", "dense", "fill"))

    def family(name: str) -> str:
        if name in dimensions:
            return "dimension"
        if "fill" in name:
            return "fill"
        return next((prefix for prefix in ("printed", "dense") if name.startswith(prefix + "_")), "exact")

    rows = [{"quantity": name, "family": family(name), "value": int(value)} for name, value in counts.items()
            if family(name) == "dimension" or family(name) in wanted]
    return pd.DataFrame(rows, columns=["quantity", "family", "value"])
