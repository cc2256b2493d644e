"""
Model interfaces shared by the problem assembly, the solver and the baselines.

Two kinds of parametric dynamic maps are supported:

- ModelSpec: nonlinear input-output (NIO) maps
      y_t = M(y_{t-1}, ..., y_{t-n}, u_t, ..., u_{t-n}, theta)
  either explicit (M given directly) or implicit (only a residual h = 0 is
  known, e.g. a discretized physical equation).
- StateSpaceSpec: x_{t+1} = M1(x_t, u_t, theta), y_t = M2(x_t, u_t, theta).

Window convention used everywhere: lagged outputs are ordered most recent first
(row l holds y_{t-1-l}) and input windows likewise (row i holds u_{t-i}).
Batched methods take a leading time axis T.
"""

import logging
from abc import ABC, abstractmethod
from dataclasses import dataclass
from typing import Any, Dict

import numpy as np

from ..errors import DimensionError
from ..utils.global_config import DEFAULT_THETA_SCALE

logger = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class LocalJacobians:
    """
    Partial derivatives of an explicit map M with respect to its direct arguments.

    Attributes:
        wrt_outputs: (..., n, p, p) block l is dM/dy_{t-1-l}
        wrt_inputs: (..., n+1, p, q) block i is dM/du_{t-i}
        wrt_theta: (..., p, n_theta)
    """
    wrt_outputs: np.ndarray
    wrt_inputs: np.ndarray
    wrt_theta: np.ndarray


@dataclass(frozen=True, eq=False)
class ResidualJacobians:
    """Partials of the residual h_t with respect to y_t, the lagged outputs, the inputs and theta."""
    wrt_current: np.ndarray
    wrt_lagged: np.ndarray
    wrt_inputs: np.ndarray
    wrt_theta: np.ndarray


@dataclass(frozen=True, eq=False)
class StateJacobians:
    wrt_state: np.ndarray
    wrt_input: np.ndarray
    wrt_theta: np.ndarray


def check_shape(name: str, array: np.ndarray, expected: tuple) -> np.ndarray:
    """Coerce to float64 and raise DimensionError unless the shape matches exactly."""
    array = np.asarray(array, dtype=np.float64)
    if array.shape != tuple(expected):
        raise DimensionError(f"{name} has shape {array.shape}, expected {tuple(expected)}")
    return array


class ModelSpec(ABC):
    """
    Parametric NIO model of dynamical order n with p outputs, q inputs and n_theta parameters.

    Subclasses implement the batched evaluation and Jacobians. Implicit models
    (is_implicit = True) also override the residual methods; their evaluate_batch
    returns the residual equation solved for y_t, used by free-run simulation.
    """

    kind: str = "model"
    is_implicit: bool = False

    def __init__(self, order: int, n_outputs: int, n_inputs: int, n_params: int):
        if order < 1 or n_outputs < 1 or n_inputs < 1 or n_params < 1:
            raise DimensionError(
                f"model dimensions must be positive (order={order}, p={n_outputs}, q={n_inputs}, n_theta={n_params})"
            )
        self.order = int(order)
        self.n_outputs = int(n_outputs)
        self.n_inputs = int(n_inputs)
        self.n_params = int(n_params)

    # ----------------------------------------------------------------- batched core

    @abstractmethod
    def evaluate_batch(self, lagged_outputs: np.ndarray, input_windows: np.ndarray,
                       theta: np.ndarray) -> np.ndarray:
        """(T, n, p), (T, n+1, q), (n_theta,) -> (T, p)"""

    @abstractmethod
    def jacobians_batch(self, lagged_outputs: np.ndarray, input_windows: np.ndarray,
                        theta: np.ndarray) -> LocalJacobians:
        """Batched LocalJacobians with a leading time axis."""

    def residual_batch(self, current: np.ndarray, lagged_outputs: np.ndarray,
                       input_windows: np.ndarray, theta: np.ndarray) -> np.ndarray:
        """Constraint residual h_t for every window; explicit models use y_t - M(...)."""
        return current - self.evaluate_batch(lagged_outputs, input_windows, theta)

    def residual_jacobians_batch(self, current: np.ndarray, lagged_outputs: np.ndarray,
                                 input_windows: np.ndarray, theta: np.ndarray) -> ResidualJacobians:
        jac = self.jacobians_batch(lagged_outputs, input_windows, theta)
        n_windows = current.shape[0]
        eye = np.broadcast_to(np.eye(self.n_outputs), (n_windows, self.n_outputs, self.n_outputs))
        return ResidualJacobians(
            wrt_current=eye,
            wrt_lagged=-jac.wrt_outputs,
            wrt_inputs=-jac.wrt_inputs,
            wrt_theta=-jac.wrt_theta,
        )

    # ----------------------------------------------------------------- single sample

    def _check_window(self, lagged_outputs, input_window, theta):
        n, p, q = self.order, self.n_outputs, self.n_inputs
        lagged = check_shape("lagged_outputs", lagged_outputs, (n, p))
        window = check_shape("input_window", input_window, (n + 1, q))
        theta = self.check_theta(theta)
        return lagged, window, theta

    def check_theta(self, theta: np.ndarray) -> np.ndarray:
        return check_shape("theta", np.ravel(np.asarray(theta, dtype=np.float64)), (self.n_params,))

    def evaluate(self, lagged_outputs: np.ndarray, input_window: np.ndarray,
                 theta: np.ndarray) -> np.ndarray:
        """Value of M for one window; returns a p-vector."""
        lagged, window, theta = self._check_window(lagged_outputs, input_window, theta)
        return self.evaluate_batch(lagged[None], window[None], theta)[0]

    def local_jacobians(self, lagged_outputs: np.ndarray, input_window: np.ndarray,
                        theta: np.ndarray) -> LocalJacobians:
        lagged, window, theta = self._check_window(lagged_outputs, input_window, theta)
        jac = self.jacobians_batch(lagged[None], window[None], theta)
        return LocalJacobians(jac.wrt_outputs[0], jac.wrt_inputs[0], jac.wrt_theta[0])

    def step(self, lagged_outputs: np.ndarray, input_window: np.ndarray, theta: np.ndarray) -> np.ndarray:
        """Unchecked one-window evaluation used inside rollouts."""
        return self.evaluate_batch(lagged_outputs[None], input_window[None], theta)[0]

    # ----------------------------------------------------------------- misc

    def initial_theta(self, rng: np.random.Generator) -> np.ndarray:
        """Random starting parameters: standard normal scaled by 0.1."""
        return DEFAULT_THETA_SCALE * rng.standard_normal(self.n_params)

    def to_config(self) -> Dict[str, Any]:
        """Constructor description persisted next to estimated parameters."""
        return {"kind": self.kind, "order": self.order}

    def __repr__(self) -> str:
        return (f"{type(self).__name__}(n={self.order}, p={self.n_outputs}, "
                f"q={self.n_inputs}, n_theta={self.n_params})")


class StateSpaceSpec(ABC):
    """Parametric state-space model x_{t+1} = M1(x_t, u_t, theta), y_t = M2(x_t, u_t, theta)."""

    kind: str = "state_space"

    def __init__(self, n_states: int, n_outputs: int, n_inputs: int, n_params: int):
        if min(n_states, n_outputs, n_inputs, n_params) < 1:
            raise DimensionError("state-space model dimensions must be positive")
        self.n_states = int(n_states)
        self.n_outputs = int(n_outputs)
        self.n_inputs = int(n_inputs)
        self.n_params = int(n_params)

    @abstractmethod
    def state_batch(self, states: np.ndarray, inputs: np.ndarray, theta: np.ndarray) -> np.ndarray:
        """(T, n_states), (T, q) -> (T, n_states)"""

    @abstractmethod
    def output_batch(self, states: np.ndarray, inputs: np.ndarray, theta: np.ndarray) -> np.ndarray:
        """(T, n_states), (T, q) -> (T, p)"""

    @abstractmethod
    def state_jacobians_batch(self, states: np.ndarray, inputs: np.ndarray,
                              theta: np.ndarray) -> StateJacobians:
        """Partials of M1: (T, ns, ns), (T, ns, q), (T, ns, n_theta)."""

    @abstractmethod
    def output_jacobians_batch(self, states: np.ndarray, inputs: np.ndarray,
                               theta: np.ndarray) -> StateJacobians:
        """Partials of M2: (T, p, ns), (T, p, q), (T, p, n_theta)."""

    def check_theta(self, theta: np.ndarray) -> np.ndarray:
        return check_shape("theta", np.ravel(np.asarray(theta, dtype=np.float64)), (self.n_params,))

    def initial_theta(self, rng: np.random.Generator) -> np.ndarray:
        return DEFAULT_THETA_SCALE * rng.standard_normal(self.n_params)

    def to_config(self) -> Dict[str, Any]:
        return {"kind": self.kind, "n_states": self.n_states}
