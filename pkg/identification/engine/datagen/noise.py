import logging
from typing import Tuple, Union

import numpy as np
from pydantic import BaseModel, ConfigDict, Field

from ..errors import DimensionError
from ..model_core.dataset import Dataset
from ..utils.accepted_types import NoiseKind

logger = logging.getLogger(__name__)


class NoiseSpec(BaseModel):
    """
    Additive measurement noise.

    `amplitude` is the half-width for uniform noise and the standard deviation
    for gaussian noise, per channel or shared. Zero amplitude leaves data as is.
    """
    model_config = ConfigDict(frozen=True, extra="forbid")

    kind: NoiseKind = NoiseKind.UNIFORM
    amplitude: Union[float, Tuple[float, ...]] = Field(0.0)
    seed: int = 0
    errors_in_variables: bool = Field(False, description="Also perturb the inputs")
    input_amplitude: Union[float, Tuple[float, ...]] = Field(0.0)

    def amplitudes(self, n_channels: int, inputs: bool = False) -> np.ndarray:
        raw = np.asarray(self.input_amplitude if inputs else self.amplitude, dtype=np.float64)
        if raw.ndim > 1 or (raw.ndim == 1 and raw.size != n_channels):
            raise DimensionError(f"noise amplitude must be a scalar or hold {n_channels} values, got {raw.tolist()}")
        if np.any(raw < 0):
            raise DimensionError(f"noise amplitude must be nonnegative, got {raw.tolist()}")
        return np.broadcast_to(raw, (n_channels,))


def _draw(kind: NoiseKind, amplitudes: np.ndarray, shape, rng: np.random.Generator) -> np.ndarray:
    if kind == NoiseKind.UNIFORM:
        return rng.uniform(-1.0, 1.0, size=shape) * amplitudes
    if kind == NoiseKind.GAUSSIAN:
        return rng.standard_normal(shape) * amplitudes
    return np.zeros(shape)


def add_noise(dataset: Dataset, spec: NoiseSpec) -> Dataset:
    """
    Noisy copy of `dataset`, channel-wise independent draws seeded by spec.seed.

    Inputs are perturbed only with errors_in_variables; their draws come after
    the output draws from the same stream.
    """
    rng = np.random.default_rng(spec.seed)
    metadata = {"noise_kind": spec.kind.value, "noise_amp": str(spec.amplitude), "noise_seed": str(spec.seed)}
    amplitudes = spec.amplitudes(dataset.n_outputs)
    outputs = dataset.outputs
    if spec.kind != NoiseKind.NONE and np.any(amplitudes > 0):
        outputs = outputs + _draw(spec.kind, amplitudes, outputs.shape, rng)

    inputs = dataset.inputs
    if spec.errors_in_variables:
        input_amplitudes = spec.amplitudes(dataset.n_inputs, inputs=True)
        metadata["input_noise_amp"] = str(spec.input_amplitude)
        if spec.kind != NoiseKind.NONE and np.any(input_amplitudes > 0):
            inputs = inputs + _draw(spec.kind, input_amplitudes, inputs.shape, rng)

    return Dataset(inputs, outputs, dataset.sample_period, {**dataset.metadata, **metadata})
