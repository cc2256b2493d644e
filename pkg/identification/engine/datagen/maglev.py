"""
Magnetic levitation records.

The open-loop plant is unstable around any equilibrium, so the default excitation
closes a feedback-linearizing position loop around the reference gap and
perturbs the commanded i^2 by a seeded staircase of relative size up to
`perturbation`. An explicit current sequence bypasses the controller.

`discrete` plants roll the Euler-discretized equation exactly (the records are
then feasible for MaglevModel at the true parameters); `continuous` plants
integrate the differential equation with RK4 at T_s / substeps under a
zero-order-held current.
"""

import logging
from typing import Optional, Sequence, Union

import numpy as np

from ..errors import InsufficientDataError, MaglevAbortError
from ..model_core.dataset import Dataset
from ..models.maglev import GRAVITY, MAGLEV_MASS, MAGLEV_SAMPLE_PERIOD, MAGLEV_TRUE_THETA, MaglevModel
from ..utils.accepted_types import PlantKind
from ..utils.global_config import RNG_NAME
from .lti import datagen_log
from .noise import NoiseSpec, add_noise

logger = logging.getLogger(__name__)

MAGLEV_REFERENCE = 0.02
DEFAULT_MAGLEV_NOISE = NoiseSpec(kind="uniform", amplitude=0.005)


class _Controller:
    """i^2 that places the closed-loop acceleration at -kp e - kd de/dt."""

    def __init__(self, model: MaglevModel, theta, reference: float, kp: float, kd: float):
        self.model, self.theta = model, theta
        self.reference, self.kp, self.kd = reference, kp, kd

    def squared_current(self, position: float, velocity: float) -> float:
        k_m, k_0 = self.theta
        desired = -self.kp * (position - self.reference) - self.kd * velocity
        force = self.model.mass * position ** 2 * (self.model.gravity - desired)
        return (force - k_0) / k_m


def _acceleration(model: MaglevModel, theta, position: float, current: float) -> float:
    k_m, k_0 = theta
    return model.gravity - (k_m * current ** 2 + k_0) / (model.mass * position ** 2)


def _rk4_interval(model: MaglevModel, theta, state: np.ndarray, current: float, substeps: int) -> np.ndarray:
    h = model.sample_period / substeps

    def rhs(s):
        return np.array([s[1], _acceleration(model, theta, s[0], current)])

    for _ in range(substeps):
        k1 = rhs(state)
        k2 = rhs(state + 0.5 * h * k1)
        k3 = rhs(state + 0.5 * h * k2)
        k4 = rhs(state + h * k3)
        state = state + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
    return state


def gen_maglev(n_samples: int = 200, seed: int = 0, noise: Optional[NoiseSpec] = DEFAULT_MAGLEV_NOISE,
               plant: Union[PlantKind, str] = PlantKind.DISCRETE, theta: Sequence[float] = MAGLEV_TRUE_THETA,
               mass: float = MAGLEV_MASS, gravity: float = GRAVITY,
               sample_period: float = MAGLEV_SAMPLE_PERIOD, reference: float = MAGLEV_REFERENCE,
               initial_position: Optional[float] = None, perturbation: float = 0.1, stair_length: int = 10,
               kp: float = 400.0, kd: float = 28.0, current: Optional[np.ndarray] = None,
               substeps: int = 10) -> Dataset:
    """
    Position record z (output) under coil current i (input).

    Args:
        n_samples: N
        seed: seed of the staircase perturbation
        noise: measurement noise on z; None for a clean record
        plant: discrete (Euler recursion) or continuous (RK4)
        theta: (k_m, k_0) of the simulated magnet
        reference: gap held by the position loop
        initial_position: z at rest for the first two samples, defaults to the reference
        perturbation: half-width of the relative staircase applied to the commanded i^2
        current: open-loop current sequence of length N; disables the controller
        substeps: RK4 steps per sample in continuous mode

    Raises:
        MaglevAbortError: the gap reached z <= 0
    """
    plant = PlantKind(plant)
    if n_samples < 3:
        raise InsufficientDataError(f"maglev generator needs at least 3 samples, got {n_samples}")
    model = MaglevModel(mass, gravity, sample_period)
    theta = np.asarray(theta, dtype=np.float64)
    z0 = reference if initial_position is None else float(initial_position)
    controller = _Controller(model, theta, reference, kp, kd)
    levels = np.random.default_rng(seed).uniform(-1.0, 1.0, -(-n_samples // stair_length))
    factors = 1.0 + perturbation * np.repeat(levels, stair_length)[:n_samples]
    open_loop = current is not None
    if open_loop:
        current = np.asarray(current, dtype=np.float64).reshape(n_samples)

    positions = np.empty(n_samples)
    currents = np.empty(n_samples)
    positions[0] = positions[1] = z0
    velocity = 0.0
    state = np.array([z0, 0.0])

    for k in range(n_samples):
        if k > 0:
            velocity = (positions[k] - positions[k - 1]) / sample_period
        if open_loop:
            currents[k] = current[k]
        else:
            squared = controller.squared_current(positions[k], velocity) * factors[k]
            currents[k] = np.sqrt(max(squared, 0.0))

        if plant == PlantKind.DISCRETE:
            target = k + 2
            if target < n_samples:
                lagged = np.array([[positions[k + 1]], [positions[k]]])
                # only i_{t-2} enters the map
                window = np.array([[0.0], [0.0], [currents[k]]])
                positions[target] = model.step(lagged, window, theta)[0]
        else:
            target = k + 1
            state = _rk4_interval(model, theta, state, currents[k], substeps)
            if target < n_samples:
                positions[target] = state[0]

        if target < n_samples and not positions[target] > 0.0:
            logger.error(f"❌ [DATAGEN] maglev gap closed at sample {target}")
            raise MaglevAbortError(target, float(positions[target]))

    dataset = Dataset(currents, positions, sample_period, {
        "generator": "maglev",
        "seed": str(seed),
        "rng": RNG_NAME,
        "plant": plant.value,
        "theta_true": ",".join(repr(float(v)) for v in theta),
        "excitation": "open_loop" if open_loop else "closed_loop",
        "reference": repr(reference),
    })
    datagen_log(f"Generated maglev record: N={n_samples}, plant={plant.value}, "
                f"{'open' if open_loop else 'closed'} loop, seed={seed}")
    return add_noise(dataset, noise) if noise is not None else dataset
