"""
Free-run evaluation of fitted models on a record.
"""

import logging
from typing import Dict, Optional, Union

import numpy as np
import pandas as pd

from ..errors import DegenerateReferenceError, DivergedSimulationError
from ..model_core.dataset import Dataset, Standardization
from ..model_core.metrics import bfr, rmse
from ..model_core.model_spec import ModelSpec, StateSpaceSpec
from ..model_core.simulation import simulate_free_run, simulate_state_space

logger = logging.getLogger(__name__)

AnyModel = Union[ModelSpec, StateSpaceSpec]


def measured_initial_conditions(model: AnyModel, dataset: Dataset) -> np.ndarray:
    """First n measured outputs; the zero state for state-space models."""
    if isinstance(model, StateSpaceSpec):
        return np.zeros((1, model.n_states))
    return dataset.outputs[:model.order].copy()


def simulate_model(model: AnyModel, theta: np.ndarray, initial_conditions: np.ndarray,
                   dataset: Dataset) -> np.ndarray:
    """(N, p) free-run outputs driven by the dataset inputs."""
    if isinstance(model, StateSpaceSpec):
        _, outputs = simulate_state_space(model, theta, np.ravel(initial_conditions)[:model.n_states],
                                          dataset.inputs)
        return outputs
    return simulate_free_run(model, theta, initial_conditions, dataset.inputs)


def score(model: AnyModel, theta: np.ndarray, initial_conditions: np.ndarray, dataset: Dataset,
          scaling: Optional[Standardization] = None) -> Dict[str, np.ndarray]:
    """
    Per-channel RMSE and BFR of the free run against the recorded outputs.

    `dataset` is in the model's (possibly standardized) units; metrics are taken
    after mapping both signals back through `scaling`. A diverged rollout or a
    constant reference channel yields NaN instead of raising.
    """
    p = dataset.n_outputs
    nan = np.full(p, np.nan)
    try:
        simulated = simulate_model(model, theta, initial_conditions, dataset)
    except DivergedSimulationError as e:
        logger.warning(f"⚠️ Free run diverged: {e}")
        return {"rmse": nan, "bfr": nan}

    reference = dataset.outputs
    if scaling is not None:
        simulated = scaling.invert_outputs(simulated)
        reference = scaling.invert_outputs(reference)
    try:
        fit = bfr(simulated, reference)
    except DegenerateReferenceError as e:
        logger.warning(f"⚠️ BFR undefined: {e}")
        fit = nan
    return {"rmse": rmse(simulated, reference), "bfr": fit}


def evaluate(model: AnyModel, theta: np.ndarray, initial_conditions: np.ndarray, dataset: Dataset,
             scaling: Optional[Standardization] = None) -> pd.DataFrame:
    """Metrics table with one row per output channel: channel, rmse, bfr."""
    if scaling is not None:
        dataset = scaling.apply(dataset)
    metrics = score(model, theta, initial_conditions, dataset, scaling)
    return pd.DataFrame({
        "channel": [f"y{i + 1}" for i in range(dataset.n_outputs)],
        "rmse": metrics["rmse"],
        "bfr": metrics["bfr"],
    })
