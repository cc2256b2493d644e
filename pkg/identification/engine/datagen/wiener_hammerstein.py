"""
Two-input two-output Wiener-Hammerstein benchmark system.

Static input block u -> zeta (4 channels), four continuous SISO filters
H_i: zeta_i -> z_i discretized by zero-order hold, static output block z -> y.
"""

import logging
from dataclasses import dataclass, field
from typing import List, Optional, Tuple

import numpy as np
import scipy.signal

from ..errors import ConfigError
from ..model_core.dataset import Dataset
from ..utils.global_config import RNG_NAME
from .lti import datagen_log
from .noise import NoiseSpec, add_noise
from .signals import staircase

logger = logging.getLogger(__name__)

WH_SAMPLE_PERIOD = 0.01


def _default_filters() -> List[Tuple[Tuple[float, ...], Tuple[float, ...]]]:
    return [
        ((16.0,), (1.0, 40.0, 130.0)),
        ((80.0,), (1.0, 31.0, 340.0, 2730.0)),
        ((30.0,), (1.0, 10.0)),
        ((-10.0,), (1.0, 6.0, 80.0)),
    ]


@dataclass(frozen=True)
class WhSystem:
    """
    Attributes:
        filters: (numerator, denominator) of H_1..H_4 in descending powers of s
        sample_period: T_s used for the zero-order-hold discretization
    """
    filters: List[Tuple[Tuple[float, ...], Tuple[float, ...]]] = field(default_factory=_default_filters)
    sample_period: float = WH_SAMPLE_PERIOD

    def __post_init__(self):
        for index, (num, den) in enumerate(self.filters):
            if len(num) >= len(den):
                raise ConfigError(f"wh.H{index + 1}", "transfer function must be strictly proper")
            poles = np.roots(den)
            if not np.all(poles.real < 0):
                raise ConfigError(f"wh.H{index + 1}", f"transfer function has poles {poles} outside the open LHP")

    @staticmethod
    def input_nonlinearity(inputs: np.ndarray) -> np.ndarray:
        u1, u2 = inputs[:, 0], inputs[:, 1]
        zeta1 = 0.2 * u1 * u2 - u1 - u2 - 0.04 * u2 ** 2 * (u2 + u1)
        zeta2 = u1 + u2
        zeta3 = 2.0 * u2 - 1.3 * zeta1
        zeta4 = u1
        return np.column_stack([zeta1, zeta2, zeta3, zeta4])

    @staticmethod
    def output_nonlinearity(z: np.ndarray) -> np.ndarray:
        z1, z2, z3, z4 = z.T
        y1 = 7.5 * z4 * z1 - 51.0 * z2 + 1.02 * z4 ** 2 * z2 - 9.0 * z1 ** 3
        y2 = 2.7 * z2 * z3 - 0.729 * z4 * z2 ** 2
        return np.column_stack([y1, y2])

    @property
    def dc_gains(self) -> np.ndarray:
        return np.array([num[-1] / den[-1] for num, den in self.filters])

    def discretize(self) -> List[Tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray, float]]:
        """ZOH discretization of each filter's controllable-canonical realization."""
        return [scipy.signal.cont2discrete(scipy.signal.tf2ss(num, den), self.sample_period, method="zoh")
                for num, den in self.filters]

    def simulate(self, inputs: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
        """(N, 2) inputs -> outputs (N, 2) and filter outputs z (N, 4), zero initial state."""
        zeta = self.input_nonlinearity(np.asarray(inputs, dtype=np.float64))
        z = np.empty_like(zeta)
        for index, system in enumerate(self.discretize()):
            _, response, _ = scipy.signal.dlsim(system, zeta[:, index])
            z[:, index] = np.ravel(response)
        return self.output_nonlinearity(z), z


def gen_wh_mimo(n_samples: int, seed: int = 0, stair_length: int = 100, n_skip: int = 0,
                system: Optional[WhSystem] = None, noise: Optional[NoiseSpec] = None,
                inputs: Optional[np.ndarray] = None) -> Dataset:
    """
    Staircase-excited record of the benchmark system.

    Args:
        n_samples: samples kept
        seed: staircase amplitudes are N(0, 1) draws from this seed
        stair_length: samples per stair
        n_skip: leading transient samples simulated and dropped
        system: defaults to the benchmark coefficients
        noise: optional output noise
        inputs: explicit (n_skip + n_samples, 2) excitation instead of the staircase
    """
    system = system or WhSystem()
    total = n_samples + n_skip
    if inputs is None:
        inputs = staircase(total, stair_length, np.random.default_rng(seed), n_channels=2)
    inputs = np.asarray(inputs, dtype=np.float64).reshape(total, 2)
    outputs, _ = system.simulate(inputs)

    dataset = Dataset(inputs[n_skip:], outputs[n_skip:], system.sample_period, {
        "generator": "wh",
        "seed": str(seed),
        "rng": RNG_NAME,
        "stair_length": str(stair_length),
        "n_skip": str(n_skip),
    })
    datagen_log(f"Generated WH record: N={n_samples}, stair={stair_length}, skip={n_skip}, seed={seed}")
    return add_noise(dataset, noise) if noise is not None else dataset
