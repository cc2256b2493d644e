"""
Run directory layout.

    config.json               resolved configuration (sorted keys)
    theta.csv                 best primary-method parameters, 17 significant digits
    initial_conditions.csv    estimated y_1..y_n (or x_1) of that run
    estimated_inputs.csv      errors-in-variables input estimate, when fitted
    model.json                model description, chosen run and standardization
    parameters.csv            every method and seed side by side
    summary.csv               status and metrics per method and seed, with mean/std rows
    timing.csv                wall times per method and seed, with mean/std rows
    trace.jsonl               per-iteration records of every run

Every file except timing.csv and trace.jsonl is a pure function of (config, seeds).
"""

import logging
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence, Union

import numpy as np
import orjson
import pandas as pd

from ..errors import DataError
from ..model_core.dataset import Standardization
from ..model_core.model_spec import StateSpaceSpec
from ..models.registry import build_model
from ..utils.file_io import atomic_write_bytes, atomic_write_text
from ..utils.global_config import CSV_FLOAT_FORMAT, THETA_FLOAT_FORMAT
from .config import freeze_config
from .evaluation import AnyModel
from .runner import FitRecord, RunOutcome

logger = logging.getLogger(__name__)


def write_frame(frame: pd.DataFrame, path: Path, float_format: str = CSV_FLOAT_FORMAT) -> Path:
    return atomic_write_text(path, frame.to_csv(index=False, float_format=float_format, lineterminator="\n"))


def parameter_names(model: AnyModel) -> List[str]:
    names = getattr(model, "parameter_names", None)
    if names is not None and len(names) == model.n_params:
        return list(names)
    return [f"theta_{i}" for i in range(model.n_params)]


def _channel_columns(prefix: str, values: np.ndarray) -> Dict[str, float]:
    return {f"{prefix}_y{i + 1}": float(v) for i, v in enumerate(np.ravel(values))}


def _theta_error(record: FitRecord, theta_true: Optional[Sequence[float]]) -> float:
    if theta_true is None or len(theta_true) != record.theta.size:
        return float("nan")
    return float(np.max(np.abs(record.theta - np.asarray(theta_true))))


def _with_aggregates(frame: pd.DataFrame, label_columns: Sequence[str]) -> pd.DataFrame:
    """Append mean and (population) standard deviation rows for every method run over several seeds."""
    rows = []
    for method, group in frame.groupby("method", sort=False):
        if len(group) < 2:
            continue
        numeric = group.drop(columns=list(label_columns)).apply(pd.to_numeric, errors="coerce")
        for label, values in (("mean", numeric.mean()), ("std", numeric.std(ddof=0))):
            rows.append({"method": method, "seed": label, **values.to_dict()})
    if not rows:
        return frame
    return pd.concat([frame, pd.DataFrame(rows)], ignore_index=True)[frame.columns]


def summary_frame(outcome: RunOutcome) -> pd.DataFrame:
    theta_true = outcome.config.data.theta_true
    rows = []
    for record, scores in zip(outcome.records, outcome.scores):
        row: Dict[str, Any] = {
            "method": record.method.value,
            "seed": str(record.seed),
            "status": record.status.value,
            "iterations": record.iterations,
            "final_cost": record.final_cost,
            "constraint_norm": np.nan if record.constraint_norm is None else record.constraint_norm,
            "theta_error": _theta_error(record, theta_true),
        }
        row.update(_channel_columns("train_rmse", scores["train"]["rmse"]))
        if "test" in scores:
            row.update(_channel_columns("test_rmse", scores["test"]["rmse"]))
            row.update(_channel_columns("test_bfr", scores["test"]["bfr"]))
        rows.append(row)
    frame = _with_aggregates(pd.DataFrame(rows), ("method", "seed", "status"))
    frame["status"] = frame["status"].fillna("")
    return frame


def timing_frame(outcome: RunOutcome) -> pd.DataFrame:
    frame = pd.DataFrame([{"method": r.method.value, "seed": str(r.seed), "wall_time": r.wall_time}
                          for r in outcome.records])
    return _with_aggregates(frame, ("method", "seed"))


def parameters_frame(outcome: RunOutcome) -> pd.DataFrame:
    """Estimates of every method and seed; a `true` row leads when the generating parameters are known."""
    names = parameter_names(outcome.model)
    rows = []
    theta_true = outcome.config.data.theta_true
    if theta_true is not None and len(theta_true) == len(names):
        rows.append({"method": "true", "seed": "", "status": "", **dict(zip(names, theta_true))})
    for record in outcome.records:
        rows.append({"method": record.method.value, "seed": str(record.seed), "status": record.status.value,
                     **dict(zip(names, record.theta.tolist()))})
    return pd.DataFrame(rows, columns=["method", "seed", "status", *names])


def _trajectory_frame(values: np.ndarray, prefix: str) -> pd.DataFrame:
    values = np.atleast_2d(values)
    return pd.DataFrame(values, columns=[f"{prefix}{i + 1}" for i in range(values.shape[1])])


def write_run(outcome: RunOutcome, run_dir: Union[str, Path]) -> Path:
    """Write every artifact of `outcome` into `run_dir` (created if needed)."""
    run_dir = Path(run_dir)
    run_dir.mkdir(parents=True, exist_ok=True)
    config = outcome.config
    freeze_config(config, run_dir)

    best = outcome.best()
    data = outcome.data_for(best)
    names = parameter_names(outcome.model)
    write_frame(pd.DataFrame({"index": np.arange(best.theta.size), "name": names, "theta": best.theta}),
                 run_dir / "theta.csv", THETA_FLOAT_FORMAT)
    is_state_space = isinstance(outcome.model, StateSpaceSpec)
    write_frame(_trajectory_frame(best.initial_conditions, "x" if is_state_space else "y"),
                 run_dir / "initial_conditions.csv", THETA_FLOAT_FORMAT)
    if best.estimated_inputs is not None:
        write_frame(_trajectory_frame(best.estimated_inputs, "u"), run_dir / "estimated_inputs.csv")

    description = {
        "model": outcome.model.to_config(),
        "method": best.method.value,
        "seed": best.seed,
        "status": best.status.value,
        "variant": config.solver.variant.value,
        "parameter_names": names,
        "standardization": None if data.scaling is None else data.scaling.to_dict(),
    }
    atomic_write_bytes(run_dir / "model.json",
                       orjson.dumps(description, option=orjson.OPT_SORT_KEYS | orjson.OPT_INDENT_2) + b"\n")

    write_frame(parameters_frame(outcome), run_dir / "parameters.csv", THETA_FLOAT_FORMAT)
    write_frame(summary_frame(outcome), run_dir / "summary.csv")
    write_frame(timing_frame(outcome), run_dir / "timing.csv")
    if config.output.write_trace:
        atomic_write_bytes(run_dir / "trace.jsonl", b"".join(record.trace for record in outcome.records))

    logger.info(f"✅ Wrote run artifacts to {run_dir}")
    return run_dir


@dataclass(frozen=True, eq=False)
class FittedModel:
    """What `evaluate` needs from a run directory."""
    model: AnyModel
    theta: np.ndarray
    initial_conditions: np.ndarray
    scaling: Optional[Standardization] = None


def load_fitted(run_dir: Union[str, Path]) -> FittedModel:
    """
    Raises:
        DataError: a required artifact is missing or unreadable
    """
    run_dir = Path(run_dir)
    try:
        description = orjson.loads((run_dir / "model.json").read_bytes())
        theta = pd.read_csv(run_dir / "theta.csv")["theta"].to_numpy(dtype=np.float64)
        initial_conditions = pd.read_csv(run_dir / "initial_conditions.csv").to_numpy(dtype=np.float64)
    except (OSError, KeyError, ValueError, orjson.JSONDecodeError) as e:
        logger.error(f"❌ Cannot load fitted model from {run_dir}: {e}")
        raise DataError(f"cannot load fitted model from {run_dir}: {e}") from e

    scaling = description.get("standardization")
    return FittedModel(
        model=build_model(description["model"]),
        theta=theta,
        initial_conditions=initial_conditions,
        scaling=None if scaling is None else Standardization.from_dict(scaling),
    )
