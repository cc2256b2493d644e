from typing import Optional

import numpy as np
from pydantic import BaseModel, ConfigDict, Field

from ..errors import DimensionError
from ..utils.accepted_types import InputKind


class InputSpec(BaseModel):
    """Excitation signal settings."""
    model_config = ConfigDict(frozen=True, extra="forbid")

    kind: InputKind = InputKind.WHITE
    amplitude: float = Field(1.0, ge=0.0, description="Standard deviation (white, staircase) or impulse height")
    stair_length: int = Field(100, ge=1)


def staircase(n_samples: int, stair_length: int, rng: np.random.Generator,
              n_channels: int = 1, scale: float = 1.0) -> np.ndarray:
    """Piecewise-constant (N, channels) signal, each stair drawn from N(0, scale^2)."""
    if n_samples < 1 or stair_length < 1:
        raise DimensionError(f"need n_samples >= 1 and stair_length >= 1, got {n_samples}, {stair_length}")
    n_stairs = -(-n_samples // stair_length)
    levels = scale * rng.standard_normal((n_stairs, n_channels))
    return np.repeat(levels, stair_length, axis=0)[:n_samples]


def white_noise(n_samples: int, rng: np.random.Generator, n_channels: int = 1, scale: float = 1.0) -> np.ndarray:
    return scale * rng.standard_normal((n_samples, n_channels))


def impulse(n_samples: int, n_channels: int = 1, height: float = 1.0) -> np.ndarray:
    signal = np.zeros((n_samples, n_channels))
    signal[0] = height
    return signal


def make_input(spec: InputSpec, n_samples: int, rng: Optional[np.random.Generator] = None,
               n_channels: int = 1) -> np.ndarray:
    rng = rng if rng is not None else np.random.default_rng(0)
    if spec.kind == InputKind.WHITE:
        return white_noise(n_samples, rng, n_channels, spec.amplitude)
    if spec.kind == InputKind.STAIRCASE:
        return staircase(n_samples, spec.stair_length, rng, n_channels, spec.amplitude)
    if spec.kind == InputKind.IMPULSE:
        return impulse(n_samples, n_channels, spec.amplitude)
    return np.zeros((n_samples, n_channels))
