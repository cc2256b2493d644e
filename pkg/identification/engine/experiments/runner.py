"""
Experiment orchestration: build data, fit every requested method over every
seed, score the fits and hand the outcome to the artifact writers.
"""

import logging
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Dict, List, Optional, Tuple, Union

import numpy as np
import orjson

from ..baselines.adam import adam_fit
from ..baselines.bptt import simulation_loss
from ..baselines.least_squares import pem_ls
from ..datagen import gen_lti, gen_maglev, gen_wh_mimo
from ..errors import ConfigError, DivergedSimulationError
from ..model_core.dataset import Dataset, Standardization, Weighting, read_dataset
from ..model_core.model_spec import ModelSpec, StateSpaceSpec
from ..model_core.simulation import simulate_free_run
from ..models.maglev import MAGLEV_TRUE_THETA
from ..models.registry import build_model
from ..sem_problem.problem import ProblemInstance, assemble
from ..solver.flcmo import SolveResult
from ..solver.multi_seed import resolve_workers, run_seeds
from ..utils.accepted_types import Method, SolveStatus, SystemKind, Variant
from .config import ExperimentConfig
from .evaluation import AnyModel, measured_initial_conditions, score

logger = logging.getLogger(__name__)

_USABLE = (SolveStatus.CONVERGED, SolveStatus.MAX_ITERS)
_FAILED = (SolveStatus.DIVERGED, SolveStatus.RANK_BREAKDOWN)


def run_log(message: str) -> None:
    logger.info(f"[RUN] {message}")


@dataclass(frozen=True, eq=False)
class RunData:
    """Training and optional test record, both in model units, plus the scaling that produced them."""
    train: Dataset
    test: Optional[Dataset] = None
    scaling: Optional[Standardization] = None


@dataclass(frozen=True, eq=False)
class FitRecord:
    """One method fitted from one seed, reduced to what the artifacts need."""
    method: Method
    seed: int
    theta: np.ndarray
    initial_conditions: np.ndarray
    status: SolveStatus
    iterations: int
    final_cost: float
    wall_time: float
    constraint_norm: Optional[float] = None
    estimated_inputs: Optional[np.ndarray] = None
    trace: bytes = b""
    message: str = ""

    @classmethod
    def from_solve(cls, result: SolveResult) -> "FitRecord":
        last = result.trace.last
        return cls(
            method=Method.FLCMO,
            seed=int(result.seed),
            theta=result.theta,
            initial_conditions=result.initial_conditions,
            status=result.status,
            iterations=result.iterations,
            final_cost=result.final_cost,
            wall_time=result.wall_time,
            constraint_norm=None if last is None else last.constraint_norm,
            estimated_inputs=result.estimated_inputs,
            trace=result.trace.to_jsonl(method=Method.FLCMO.value, seed=result.seed),
            message=result.message,
        )


@dataclass(frozen=True, eq=False)
class RunOutcome:
    config: ExperimentConfig
    model: AnyModel
    records: List[FitRecord]
    scores: List[Dict[str, Dict[str, np.ndarray]]]
    data: Dict[Optional[int], RunData]
    run_dir: Optional[Path] = None
    timings: Dict[str, float] = field(default_factory=dict)

    def data_for(self, record: FitRecord) -> RunData:
        return _data_for(self.data, record)

    def records_of(self, method: Union[Method, str]) -> List[FitRecord]:
        method = Method(method)
        return [r for r in self.records if r.method == method]

    def best(self, method: Optional[Union[Method, str]] = None) -> FitRecord:
        """Lowest final cost among usable runs of `method` (primary method by default)."""
        candidates = self.records_of(method or self.config.solver.method)
        usable = [r for r in candidates if r.status in _USABLE] or candidates
        return min(usable, key=lambda r: (r.final_cost, r.seed))

    @property
    def failed(self) -> bool:
        """Every run of the primary method diverged or broke down."""
        return all(r.status in _FAILED for r in self.records_of(self.config.solver.method))


# --------------------------------------------------------------------------- data


def _generate(config: ExperimentConfig, seed: int, n_samples: int, noise) -> Dataset:
    data = config.data
    if data.system == SystemKind.LTI:
        return gen_lti(data.theta_true or (0.5, 1.0), n_samples=n_samples, seed=seed, noise=noise)
    if data.system == SystemKind.WH:
        return gen_wh_mimo(n_samples, seed, n_skip=data.n_skip, noise=noise)
    return gen_maglev(n_samples, seed, noise=noise, plant=data.plant, theta=data.theta_true or MAGLEV_TRUE_THETA)


def build_run_data(config: ExperimentConfig, run_seed: Optional[int] = None) -> RunData:
    """
    Training and test records for one run.

    `run_seed` selects the noise realization when the data section resamples per seed.
    Test records are generated noiselessly from `test_seed`.
    """
    data = config.data
    if data.path is not None:
        train = read_dataset(data.path)
        test = read_dataset(data.test_path) if data.test_path else None
    else:
        noise = data.noise_spec(run_seed if data.resample_per_seed else None)
        train = _generate(config, data.seed, data.n_samples, noise)
        test = _generate(config, data.test_seed, data.n_test, None) if data.n_test > 0 else None

    if not data.standardize:
        return RunData(train, test)
    train, scaling = train.standardize()
    return RunData(train, None if test is None else scaling.apply(test), scaling)


def build_experiment_model(config: ExperimentConfig, dataset: Dataset) -> AnyModel:
    """Model from the [model] section; channel counts default to the dataset's."""
    description = config.model.to_description()
    description.setdefault("n_outputs", dataset.n_outputs)
    description.setdefault("n_inputs", dataset.n_inputs)
    return build_model(description)


def _weighting(config: ExperimentConfig, model: AnyModel) -> Weighting:
    solver = config.solver
    n_inputs = model.n_inputs if solver.variant == Variant.EIV else None
    return Weighting.identity(model.n_outputs, n_inputs, ridge_coeff=solver.ridge, input_scale=solver.input_weight)


def build_problem(config: ExperimentConfig, model: AnyModel, dataset: Dataset) -> ProblemInstance:
    return assemble(model, dataset, _weighting(config, model), config.solver.variant,
                    config.solver.constraint_scale)


# --------------------------------------------------------------------------- fitting


def _explicit_model(model: AnyModel, method: Method) -> ModelSpec:
    if isinstance(model, StateSpaceSpec):
        raise ConfigError("solver.method", f"{method.value} needs an input-output model, got '{model.kind}'")
    return model


def _theta0(config: ExperimentConfig) -> Optional[np.ndarray]:
    theta0 = config.solver.theta0
    return None if theta0 is None else np.asarray(theta0, dtype=np.float64)


def _fit_adam(config: ExperimentConfig, model: AnyModel, dataset: Dataset, seed: int) -> FitRecord:
    model = _explicit_model(model, Method.ADAM)
    result = adam_fit(model, dataset, config.solver.adam_config(seed), _weighting(config, model), _theta0(config))
    trace = b"".join(
        orjson.dumps({"method": Method.ADAM.value, "seed": seed, "iteration": epoch,
                      "cost": float(f"{loss:.6g}")}) + b"\n"
        for epoch, loss in enumerate(result.loss_trace)
    )
    return FitRecord(
        method=Method.ADAM, seed=seed, theta=result.theta, initial_conditions=result.initial_conditions,
        status=result.status, iterations=result.iterations, final_cost=result.final_cost,
        wall_time=result.wall_time, trace=trace, message=result.message,
    )


def _fit_least_squares(config: ExperimentConfig, model: AnyModel, dataset: Dataset, seed: int) -> FitRecord:
    model = _explicit_model(model, Method.LS)
    weighting = _weighting(config, model)
    started = time.perf_counter()
    theta = pem_ls(model, dataset, weighting)
    wall_time = time.perf_counter() - started
    init = measured_initial_conditions(model, dataset)
    try:
        cost = simulation_loss(simulate_free_run(model, theta, init, dataset.inputs), dataset, weighting, theta)
        status = SolveStatus.CONVERGED
    except DivergedSimulationError as e:
        logger.warning(f"⚠️ [RUN] least-squares estimate diverges in free run: {e}")
        cost, status = float("inf"), SolveStatus.DIVERGED
    return FitRecord(method=Method.LS, seed=seed, theta=theta, initial_conditions=init, status=status,
                     iterations=1, final_cost=cost, wall_time=wall_time)


def _fit_flcmo(config: ExperimentConfig, model: AnyModel, dataset: Dataset, seeds: List[int],
               workers: Optional[int]) -> List[FitRecord]:
    problem = build_problem(config, model, dataset)
    outcome = run_seeds(problem, config.solver.solver_config(), seeds, _theta0(config), workers)
    return [FitRecord.from_solve(result) for result in outcome.results]


def fit_methods(config: ExperimentConfig, model: AnyModel, dataset: Dataset, seeds: List[int],
                workers: Optional[int] = 1) -> List[FitRecord]:
    """
    Fit every configured method on one record.

    FL-CMO and Adam run once per seed; least squares is deterministic and runs
    once, reported under the first seed.
    """
    records: List[FitRecord] = []
    for method in config.solver.methods:
        run_log(f"Fitting {method.value} on N={dataset.n_samples} over seeds {seeds}")
        if method == Method.FLCMO:
            records.extend(_fit_flcmo(config, model, dataset, seeds, workers))
        elif method == Method.ADAM:
            records.extend(_fit_adam(config, model, dataset, seed) for seed in seeds)
        else:
            records.append(_fit_least_squares(config, model, dataset, seeds[0]))
    return records


def fit_resampled_seed(config: ExperimentConfig, seed: int) -> Tuple[int, RunData, List[FitRecord]]:
    """All methods on the noise realization of `seed`; top-level so worker processes can pickle it."""
    data = build_run_data(config, seed)
    model = build_experiment_model(config, data.train)
    return seed, data, fit_methods(config, model, data.train, [seed], workers=1)


def _data_for(data: Dict[Optional[int], RunData], record: FitRecord) -> RunData:
    return data.get(record.seed, data.get(None))


def _score_records(model: AnyModel, records: List[FitRecord],
                   data: Dict[Optional[int], RunData]) -> List[Dict[str, Dict[str, np.ndarray]]]:
    scores = []
    for record in records:
        run_data = _data_for(data, record)
        entry = {"train": score(model, record.theta, record.initial_conditions, run_data.train, run_data.scaling)}
        if run_data.test is not None:
            entry["test"] = score(model, record.theta, measured_initial_conditions(model, run_data.test),
                                  run_data.test, run_data.scaling)
        scores.append(entry)
    return scores


def run_experiment(config: ExperimentConfig, workers: Optional[int] = None) -> RunOutcome:
    """
    Execute a configured experiment without touching the filesystem (except to read data).

    Args:
        config: resolved experiment
        workers: process-pool size for seed fan-out; overrides [solver].workers

    Returns:
        RunOutcome with records in method order, then seed order
    """
    seeds = [int(s) for s in config.solver.seeds]
    workers = workers if workers is not None else config.solver.workers
    started = time.perf_counter()

    if config.data.resample_per_seed:
        n_workers = resolve_workers(workers, len(seeds))
        run_log(f"Resampling noise per seed: {len(seeds)} seed(s) on {n_workers} worker(s)")
        if n_workers == 1:
            per_seed = [fit_resampled_seed(config, seed) for seed in seeds]
        else:
            try:
                with ProcessPoolExecutor(max_workers=n_workers) as pool:
                    futures = [pool.submit(fit_resampled_seed, config, seed) for seed in seeds]
                    per_seed = [future.result() for future in futures]
            except Exception as e:
                logger.error(f"❌ [RUN] Seed pool failed: {e}")
                raise
        data: Dict[Optional[int], RunData] = {seed: run_data for seed, run_data, _ in per_seed}
        model = build_experiment_model(config, per_seed[0][1].train)
        order = {method: i for i, method in enumerate(config.solver.methods)}
        records = sorted((r for _, _, fits in per_seed for r in fits), key=lambda r: (order[r.method], r.seed))
    else:
        run_data = build_run_data(config)
        data = {None: run_data}
        model = build_experiment_model(config, run_data.train)
        records = fit_methods(config, model, run_data.train, seeds, workers)

    outcome_scores = _score_records(model, records, data)
    elapsed = time.perf_counter() - started
    outcome = RunOutcome(config, model, records, outcome_scores, data, timings={"total": elapsed})

    best = outcome.best()
    status = "failed" if outcome.failed else best.status.value
    marker = "❌" if outcome.failed else "✅"
    run_log(f"{marker} {config.run_name}: best {best.method.value} seed {best.seed} ({status}), "
            f"f={best.final_cost:.6g}, {elapsed:.1f}s")
    return outcome
