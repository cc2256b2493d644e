import numpy as np

from ..model_core.model_spec import LocalJacobians, ModelSpec


class LtiFirstOrder(ModelSpec):
    """
    First-order linear model y_t = theta_1 * y_{t-1} + theta_2 * u_{t-1}.

    The input window is (u_t, u_{t-1}); u_t does not enter the map.
    """

    kind = "lti"
    parameter_names = ("a", "b")

    def __init__(self):
        super().__init__(order=1, n_outputs=1, n_inputs=1, n_params=2)

    def evaluate_batch(self, lagged_outputs, input_windows, theta):
        return theta[0] * lagged_outputs[:, 0, :] + theta[1] * input_windows[:, 1, :]

    def jacobians_batch(self, lagged_outputs, input_windows, theta):
        n_windows = lagged_outputs.shape[0]
        wrt_outputs = np.full((n_windows, 1, 1, 1), theta[0])
        wrt_inputs = np.zeros((n_windows, 2, 1, 1))
        wrt_inputs[:, 1] = theta[1]
        wrt_theta = np.stack([lagged_outputs[:, 0, :], input_windows[:, 1, :]], axis=-1)
        return LocalJacobians(wrt_outputs, wrt_inputs, wrt_theta)

    def linear_regression(self, current, lagged_outputs, input_windows):
        """Residual h = A theta + b with A = -[y_{t-1}, u_{t-1}], b = y_t."""
        regressor = -np.column_stack([lagged_outputs[:, 0, 0], input_windows[:, 1, 0]])
        return regressor, current[:, 0].copy()

    def to_config(self):
        return {"kind": self.kind}
