import numpy as np

from ..model_core.model_spec import StateJacobians, StateSpaceSpec


def _outer_blocks(rows: int, values: np.ndarray) -> np.ndarray:
    """d(M v)_i / dM_{rc} = delta_{ir} v_c for a row-major flattened M: (T, rows, rows*len(v))."""
    return np.einsum("ir,tc->tirc", np.eye(rows), values).reshape(values.shape[0], rows, -1)


class LinearStateSpaceModel(StateSpaceSpec):
    """
    x_{t+1} = A x_t + B u_t,  y_t = C x_t + D u_t with every matrix entry a parameter.

    theta = [A, B, C, D], each flattened row-major.
    """

    kind = "linear_ss"

    def __init__(self, n_states: int, n_outputs: int, n_inputs: int):
        n_params = n_states * (n_states + n_inputs) + n_outputs * (n_states + n_inputs)
        super().__init__(n_states, n_outputs, n_inputs, n_params)

    def unpack(self, theta: np.ndarray):
        ns, p, q = self.n_states, self.n_outputs, self.n_inputs
        sizes = np.cumsum([ns * ns, ns * q, p * ns])
        a, b, c, d = np.split(theta, sizes)
        return a.reshape(ns, ns), b.reshape(ns, q), c.reshape(p, ns), d.reshape(p, q)

    def state_batch(self, states, inputs, theta):
        a, b, _, _ = self.unpack(theta)
        return states @ a.T + inputs @ b.T

    def output_batch(self, states, inputs, theta):
        _, _, c, d = self.unpack(theta)
        return states @ c.T + inputs @ d.T

    def state_jacobians_batch(self, states, inputs, theta):
        a, b, _, _ = self.unpack(theta)
        n_windows, ns = states.shape[0], self.n_states
        wrt_theta = np.concatenate([
            _outer_blocks(ns, states),
            _outer_blocks(ns, inputs),
            np.zeros((n_windows, ns, self.n_outputs * (ns + self.n_inputs))),
        ], axis=2)
        return StateJacobians(
            wrt_state=np.broadcast_to(a, (n_windows, *a.shape)),
            wrt_input=np.broadcast_to(b, (n_windows, *b.shape)),
            wrt_theta=wrt_theta,
        )

    def output_jacobians_batch(self, states, inputs, theta):
        _, _, c, d = self.unpack(theta)
        n_windows, ns, p = states.shape[0], self.n_states, self.n_outputs
        wrt_theta = np.concatenate([
            np.zeros((n_windows, p, ns * (ns + self.n_inputs))),
            _outer_blocks(p, states),
            _outer_blocks(p, inputs),
        ], axis=2)
        return StateJacobians(
            wrt_state=np.broadcast_to(c, (n_windows, *c.shape)),
            wrt_input=np.broadcast_to(d, (n_windows, *d.shape)),
            wrt_theta=wrt_theta,
        )

    def to_config(self):
        return {"kind": self.kind, "n_states": self.n_states, "n_outputs": self.n_outputs,
                "n_inputs": self.n_inputs}
