from .dataset import Dataset, Standardization, Weighting, read_dataset, write_dataset
from .metrics import bfr, rmse
from .model_spec import (
    LocalJacobians,
    ModelSpec,
    ResidualJacobians,
    StateJacobians,
    StateSpaceSpec,
    check_shape,
)
from .simulation import input_windows, output_windows, simulate_free_run, simulate_state_space

__all__ = [
    "Dataset",
    "Standardization",
    "Weighting",
    "read_dataset",
    "write_dataset",
    "bfr",
    "rmse",
    "LocalJacobians",
    "ModelSpec",
    "ResidualJacobians",
    "StateJacobians",
    "StateSpaceSpec",
    "check_shape",
    "input_windows",
    "output_windows",
    "simulate_free_run",
    "simulate_state_space",
]
