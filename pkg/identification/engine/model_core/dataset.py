"""
Trajectory containers: measured datasets, weighting matrices and CSV exchange.

Datasets are stored time-major: row t holds the sample at time t, columns are
channels. Arrays are made read-only on construction.
"""

import io
import logging
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Dict, Optional, Tuple, Union

import numpy as np
import pandas as pd

from ..errors import DataError, DimensionError
from ..utils.file_io import atomic_write_text
from ..utils.global_config import CSV_FLOAT_FORMAT

logger = logging.getLogger(__name__)


def _as_matrix(name: str, values) -> np.ndarray:
    array = np.asarray(values, dtype=np.float64)
    if array.ndim == 1:
        array = array[:, None]
    if array.ndim != 2:
        raise DimensionError(f"{name} must be a sequence of vectors, got array of shape {array.shape}")
    array = np.array(array, copy=True)
    array.flags.writeable = False
    return array


@dataclass(frozen=True, eq=False)
class Dataset:
    """
    Measured input/output record.

    Attributes:
        inputs: (N, q) input samples u_t
        outputs: (N, p) measured outputs y~_t
        sample_period: sampling period T_s in seconds
        metadata: generation parameters, written as header comments in CSV files
    """
    inputs: np.ndarray
    outputs: np.ndarray
    sample_period: float = 1.0
    metadata: Dict[str, str] = field(default_factory=dict)

    def __post_init__(self):
        inputs = _as_matrix("inputs", self.inputs)
        outputs = _as_matrix("outputs", self.outputs)
        if inputs.shape[0] != outputs.shape[0]:
            raise DimensionError(
                f"inputs and outputs differ in length ({inputs.shape[0]} vs {outputs.shape[0]})"
            )
        if inputs.shape[0] < 1:
            raise DimensionError("dataset must contain at least one sample")
        if not self.sample_period > 0:
            raise DimensionError(f"sample_period must be positive, got {self.sample_period}")
        object.__setattr__(self, "inputs", inputs)
        object.__setattr__(self, "outputs", outputs)
        object.__setattr__(self, "sample_period", float(self.sample_period))
        object.__setattr__(self, "metadata", {str(k): str(v) for k, v in self.metadata.items()})

    @property
    def n_samples(self) -> int:
        return self.inputs.shape[0]

    @property
    def n_inputs(self) -> int:
        return self.inputs.shape[1]

    @property
    def n_outputs(self) -> int:
        return self.outputs.shape[1]

    def split(self, n_train: int) -> Tuple["Dataset", "Dataset"]:
        """First n_train samples for training, the remainder for validation."""
        if not 0 < n_train < self.n_samples:
            raise DimensionError(f"n_train must lie in (0, {self.n_samples}), got {n_train}")
        head = replace(self, inputs=self.inputs[:n_train], outputs=self.outputs[:n_train])
        tail = replace(self, inputs=self.inputs[n_train:], outputs=self.outputs[n_train:])
        return head, tail

    def standardize(self) -> Tuple["Dataset", "Standardization"]:
        """Per-channel zero mean, unit standard deviation. Constant channels keep scale 1."""
        scaling = Standardization.fit(self)
        return scaling.apply(self), scaling


@dataclass(frozen=True, eq=False)
class Standardization:
    input_mean: np.ndarray
    input_scale: np.ndarray
    output_mean: np.ndarray
    output_scale: np.ndarray

    @classmethod
    def fit(cls, dataset: Dataset) -> "Standardization":
        def scale_of(values):
            std = values.std(axis=0)
            return np.where(std > 0, std, 1.0)

        return cls(
            input_mean=dataset.inputs.mean(axis=0),
            input_scale=scale_of(dataset.inputs),
            output_mean=dataset.outputs.mean(axis=0),
            output_scale=scale_of(dataset.outputs),
        )

    def apply(self, dataset: Dataset) -> Dataset:
        return replace(
            dataset,
            inputs=(dataset.inputs - self.input_mean) / self.input_scale,
            outputs=(dataset.outputs - self.output_mean) / self.output_scale,
            metadata={**dataset.metadata, "standardized": "true"},
        )

    def invert_outputs(self, outputs: np.ndarray) -> np.ndarray:
        return np.asarray(outputs) * self.output_scale + self.output_mean

    def to_dict(self) -> Dict[str, list]:
        return {
            "input_mean": self.input_mean.tolist(),
            "input_scale": self.input_scale.tolist(),
            "output_mean": self.output_mean.tolist(),
            "output_scale": self.output_scale.tolist(),
        }

    @classmethod
    def from_dict(cls, data: Dict[str, list]) -> "Standardization":
        return cls(**{key: np.asarray(data[key], dtype=np.float64) for key in
                      ("input_mean", "input_scale", "output_mean", "output_scale")})


def _check_positive_definite(name: str, matrix: np.ndarray) -> np.ndarray:
    matrix = np.atleast_2d(np.asarray(matrix, dtype=np.float64))
    if matrix.ndim != 2 or matrix.shape[0] != matrix.shape[1]:
        raise DimensionError(f"{name} must be square, got shape {matrix.shape}")
    if not np.allclose(matrix, matrix.T, rtol=0.0, atol=1e-12 * max(1.0, np.abs(matrix).max())):
        raise ValueError(f"{name} must be symmetric")
    for k in range(1, matrix.shape[0] + 1):
        if np.linalg.det(matrix[:k, :k]) <= 0:
            raise ValueError(f"{name} is not positive definite (leading minor {k} <= 0)")
    matrix = matrix.copy()
    matrix.flags.writeable = False
    return matrix


@dataclass(frozen=True, eq=False)
class Weighting:
    """
    Quadratic weights of the simulation-error cost.

    Attributes:
        output_weight: W_y, symmetric positive-definite p x p
        input_weight: W_u, symmetric positive-definite q x q (errors-in-variables only)
        ridge_coeff: c in rho(theta) = c * ||theta||^2
    """
    output_weight: np.ndarray
    input_weight: Optional[np.ndarray] = None
    ridge_coeff: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, "output_weight", _check_positive_definite("W_y", self.output_weight))
        if self.input_weight is not None:
            object.__setattr__(self, "input_weight", _check_positive_definite("W_u", self.input_weight))
        if self.ridge_coeff < 0:
            raise ValueError(f"ridge_coeff must be nonnegative, got {self.ridge_coeff}")

    @classmethod
    def identity(cls, n_outputs: int, n_inputs: Optional[int] = None,
                 ridge_coeff: float = 0.0, input_scale: float = 1.0) -> "Weighting":
        input_weight = None if n_inputs is None else input_scale * np.eye(n_inputs)
        return cls(np.eye(n_outputs), input_weight, ridge_coeff)

    def ridge(self, theta: np.ndarray) -> float:
        return float(self.ridge_coeff * (theta @ theta))

    def ridge_gradient(self, theta: np.ndarray) -> np.ndarray:
        return 2.0 * self.ridge_coeff * theta


# --------------------------------------------------------------------------- CSV


def write_dataset(dataset: Dataset, path: Union[str, Path]) -> Path:
    """
    Write `t,u1..uq,y1..yp` rows preceded by `# key=value` header lines.

    The time column is t = k * T_s for k = 0..N-1.
    """
    columns = {"t": np.arange(dataset.n_samples) * dataset.sample_period}
    for j in range(dataset.n_inputs):
        columns[f"u{j + 1}"] = dataset.inputs[:, j]
    for j in range(dataset.n_outputs):
        columns[f"y{j + 1}"] = dataset.outputs[:, j]
    frame = pd.DataFrame(columns)

    header = {"sample_period": repr(dataset.sample_period), **dataset.metadata}
    buffer = io.StringIO()
    for key, value in header.items():
        buffer.write(f"# {key}={value}\n")
    frame.to_csv(buffer, index=False, float_format=CSV_FLOAT_FORMAT, lineterminator="\n")
    return atomic_write_text(path, buffer.getvalue())


def read_dataset(path: Union[str, Path]) -> Dataset:
    path = Path(path)
    metadata: Dict[str, str] = {}
    try:
        with open(path, "r", encoding="utf-8") as handle:
            for line in handle:
                if not line.startswith("#"):
                    break
                key, _, value = line[1:].strip().partition("=")
                metadata[key.strip()] = value.strip()
        frame = pd.read_csv(path, comment="#")
    except (OSError, pd.errors.ParserError, pd.errors.EmptyDataError) as e:
        logger.error(f"Failed to read dataset {path}: {e}")
        raise DataError(f"cannot read dataset {path}: {e}") from e

    input_cols = sorted((c for c in frame.columns if c.startswith("u")), key=lambda c: int(c[1:]))
    output_cols = sorted((c for c in frame.columns if c.startswith("y")), key=lambda c: int(c[1:]))
    if "t" not in frame.columns or not input_cols or not output_cols:
        raise DataError(f"{path}: expected header t,u1..uq,y1..yp, got {list(frame.columns)}")
    values = frame[input_cols + output_cols].to_numpy(dtype=np.float64)
    if not np.all(np.isfinite(values)):
        raise DataError(f"{path}: dataset contains missing or non-finite values")

    sample_period = metadata.pop("sample_period", None)
    if sample_period is not None:
        sample_period = float(sample_period)
    elif len(frame) > 1:
        sample_period = float(frame["t"].iloc[1] - frame["t"].iloc[0])
    else:
        sample_period = 1.0

    return Dataset(
        inputs=frame[input_cols].to_numpy(dtype=np.float64),
        outputs=frame[output_cols].to_numpy(dtype=np.float64),
        sample_period=sample_period,
        metadata=metadata,
    )
