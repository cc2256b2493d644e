import logging
from typing import Tuple

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view

from ..errors import DimensionError, DivergedSimulationError, InsufficientDataError
from .model_spec import ModelSpec, StateSpaceSpec, check_shape

logger = logging.getLogger(__name__)


def output_windows(outputs: np.ndarray, order: int) -> Tuple[np.ndarray, np.ndarray]:
    """
    Split a (N, p) trajectory into regression windows for targets t = n..N-1.

    Returns:
        current: (N-n, p) y_t
        lagged: (N-n, n, p) with lagged[:, l] = y_{t-1-l}
    """
    windows = sliding_window_view(outputs, order + 1, axis=0)   # (N-n, p, n+1), oldest first
    newest_first = windows[:, :, ::-1].transpose(0, 2, 1)
    return np.ascontiguousarray(newest_first[:, 0]), np.ascontiguousarray(newest_first[:, 1:])


def input_windows(inputs: np.ndarray, order: int) -> np.ndarray:
    """(N, q) inputs -> (N-n, n+1, q) windows with row i holding u_{t-i}."""
    windows = sliding_window_view(inputs, order + 1, axis=0)
    return np.ascontiguousarray(windows[:, :, ::-1].transpose(0, 2, 1))


def simulate_free_run(model: ModelSpec, theta: np.ndarray, init_outputs: np.ndarray,
                      inputs: np.ndarray) -> np.ndarray:
    """
    Roll the model out from estimated initial conditions.

    Args:
        model: NIO model of order n
        theta: parameter vector
        init_outputs: (n, p) values of y_1..y_n, copied verbatim into the result
        inputs: (N, q) input sequence with N > n

    Returns:
        (N, p) simulated outputs

    Raises:
        DivergedSimulationError: first 0-based sample index at which a non-finite value appears
    """
    n, p = model.order, model.n_outputs
    theta = model.check_theta(theta)
    inputs = np.asarray(inputs, dtype=np.float64)
    if inputs.ndim == 1:
        inputs = inputs[:, None]
    if inputs.ndim != 2 or inputs.shape[1] != model.n_inputs:
        raise DimensionError(f"inputs must have shape (N, {model.n_inputs}), got {inputs.shape}")
    n_samples = inputs.shape[0]
    if n_samples <= n:
        raise InsufficientDataError(f"need more than {n} samples, got {n_samples}")
    init = np.asarray(init_outputs, dtype=np.float64)
    if init.size != n * p:
        raise DimensionError(f"init_outputs must hold {n} vectors of width {p}, got shape {init.shape}")
    init = init.reshape(n, p)

    y = np.empty((n_samples, p))
    y[:n] = init
    for t in range(n, n_samples):
        y[t] = model.step(y[t - n:t][::-1], inputs[t - n:t + 1][::-1], theta)
        if not np.all(np.isfinite(y[t])):
            raise DivergedSimulationError(t)
    return y


def simulate_state_space(model: StateSpaceSpec, theta: np.ndarray, initial_state: np.ndarray,
                         inputs: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    """Roll x_{t+1} = M1(x_t, u_t) from x_1; returns (states (N, ns), outputs (N, p))."""
    theta = model.check_theta(theta)
    inputs = np.atleast_2d(np.asarray(inputs, dtype=np.float64))
    if inputs.shape[1] != model.n_inputs:
        raise DimensionError(f"inputs must have shape (N, {model.n_inputs}), got {inputs.shape}")
    states = np.empty((inputs.shape[0], model.n_states))
    states[0] = check_shape("initial_state", initial_state, (model.n_states,))
    for t in range(inputs.shape[0] - 1):
        states[t + 1] = model.state_batch(states[t:t + 1], inputs[t:t + 1], theta)[0]
        if not np.all(np.isfinite(states[t + 1])):
            raise DivergedSimulationError(t + 1)
    return states, model.output_batch(states, inputs, theta)
