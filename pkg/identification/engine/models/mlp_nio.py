"""
Multilayer-perceptron NIO model (NNOE when fitted by simulation error).

Input feature vector: [y_{t-1}, ..., y_{t-n}, u_t, ..., u_{t-n}] flattened
channel-minor, width p*n + q*(n+1). Hidden layers use tanh, the output layer is
affine. theta stacks each layer's weight matrix (row-major, out x in) followed by
its bias vector.
"""

from typing import List, Sequence, Tuple

import numpy as np

from ..errors import DimensionError
from ..model_core.model_spec import LocalJacobians, ModelSpec


class MlpNioModel(ModelSpec):

    kind = "mlp"

    def __init__(self, order: int, n_outputs: int, n_inputs: int, hidden_layers: Sequence[int] = (5, 5)):
        hidden_layers = tuple(int(w) for w in hidden_layers)
        if any(w < 1 for w in hidden_layers):
            raise DimensionError(f"hidden layer widths must be positive, got {hidden_layers}")
        self.hidden_layers = hidden_layers
        self.input_width = n_outputs * order + n_inputs * (order + 1)
        widths = (self.input_width, *hidden_layers, n_outputs)
        self.layer_shapes: List[Tuple[int, int]] = [(widths[i + 1], widths[i]) for i in range(len(widths) - 1)]
        n_params = sum(rows * cols + rows for rows, cols in self.layer_shapes)
        super().__init__(order=order, n_outputs=n_outputs, n_inputs=n_inputs, n_params=n_params)

    @property
    def layer_widths(self) -> Tuple[int, ...]:
        return (self.input_width, *self.hidden_layers, self.n_outputs)

    def unpack(self, theta: np.ndarray) -> List[Tuple[np.ndarray, np.ndarray]]:
        """Views (W, b) per layer into theta."""
        layers = []
        offset = 0
        for rows, cols in self.layer_shapes:
            weight = theta[offset:offset + rows * cols].reshape(rows, cols)
            offset += rows * cols
            bias = theta[offset:offset + rows]
            offset += rows
            layers.append((weight, bias))
        return layers

    def pack(self, layers: Sequence[Tuple[np.ndarray, np.ndarray]]) -> np.ndarray:
        return np.concatenate([np.concatenate([np.ravel(w), np.ravel(b)]) for w, b in layers])

    def _features(self, lagged_outputs, input_windows):
        n_windows = lagged_outputs.shape[0]
        return np.concatenate(
            [lagged_outputs.reshape(n_windows, -1), input_windows.reshape(n_windows, -1)], axis=1
        )

    def _forward(self, features, layers):
        activations = [features]
        for weight, bias in layers[:-1]:
            activations.append(np.tanh(activations[-1] @ weight.T + bias))
        weight, bias = layers[-1]
        return activations, activations[-1] @ weight.T + bias

    def evaluate_batch(self, lagged_outputs, input_windows, theta):
        layers = self.unpack(theta)
        _, out = self._forward(self._features(lagged_outputs, input_windows), layers)
        return out

    def jacobians_batch(self, lagged_outputs, input_windows, theta):
        layers = self.unpack(theta)
        activations, _ = self._forward(self._features(lagged_outputs, input_windows), layers)
        n_windows, p = lagged_outputs.shape[0], self.n_outputs

        # output layer
        weight, _ = layers[-1]
        last = activations[-1]
        # collected back to front, bias before weight, then reversed
        blocks = [
            np.broadcast_to(np.eye(p), (n_windows, p, p)),
            np.einsum("ir,tc->tirc", np.eye(p), last).reshape(n_windows, p, -1),
        ]
        grad = np.broadcast_to(weight, (n_windows, *weight.shape))

        # hidden layers, back to front
        for index in range(len(layers) - 2, -1, -1):
            weight, _ = layers[index]
            hidden = activations[index + 1]
            delta = grad * (1.0 - hidden ** 2)[:, None, :]
            previous = activations[index]
            blocks.append(delta)
            blocks.append((delta[:, :, :, None] * previous[:, None, None, :]).reshape(n_windows, p, -1))
            grad = delta @ weight
        blocks.reverse()
        wrt_theta = np.concatenate(blocks, axis=2)

        n, q = self.order, self.n_inputs
        wrt_outputs = grad[:, :, :n * p].reshape(n_windows, p, n, p).transpose(0, 2, 1, 3)
        wrt_inputs = grad[:, :, n * p:].reshape(n_windows, p, n + 1, q).transpose(0, 2, 1, 3)
        return LocalJacobians(wrt_outputs, wrt_inputs, wrt_theta)

    def initial_theta(self, rng: np.random.Generator) -> np.ndarray:
        """Weights ~ N(0, 1/fan_in), biases zero."""
        layers = [(rng.standard_normal((rows, cols)) / np.sqrt(cols), np.zeros(rows))
                  for rows, cols in self.layer_shapes]
        return self.pack(layers)

    def output_bound(self, theta: np.ndarray) -> np.ndarray:
        """|output_i| <= sum_j |W_L[i, j]| + |b_L[i]| whenever a hidden layer exists."""
        weight, bias = self.unpack(self.check_theta(theta))[-1]
        return np.abs(weight).sum(axis=1) + np.abs(bias)

    def to_config(self):
        return {"kind": self.kind, "order": self.order, "n_outputs": self.n_outputs,
                "n_inputs": self.n_inputs, "layers": list(self.hidden_layers)}
