"""
Magnetic levitation gray-box model.

Continuous plant:  z'' = g - (k_m * i^2 + k_0) / (m * z^2), z the gap to the magnet.
Euler discretization gives the implicit residual

    h_t = m z_{t-2}^2 ((z_t - 2 z_{t-1} + z_{t-2}) / T_s^2 - g) + k_m i_{t-2}^2 + k_0

which is linear in theta = (k_m, k_0) and free of divisions. Free-run simulation
uses the same equation solved for z_t.
"""

import numpy as np

from ..model_core.model_spec import LocalJacobians, ModelSpec, ResidualJacobians

MAGLEV_MASS = 24.197e-3
GRAVITY = 9.81
MAGLEV_SAMPLE_PERIOD = 0.01
MAGLEV_TRUE_THETA = (2.1039e-4, 0.0)


class MaglevModel(ModelSpec):

    kind = "maglev"
    is_implicit = True
    parameter_names = ("k_m", "k_0")

    def __init__(self, mass: float = MAGLEV_MASS, gravity: float = GRAVITY,
                 sample_period: float = MAGLEV_SAMPLE_PERIOD):
        super().__init__(order=2, n_outputs=1, n_inputs=1, n_params=2)
        self.mass = float(mass)
        self.gravity = float(gravity)
        self.sample_period = float(sample_period)

    @property
    def residual_scale(self) -> float:
        """T_s^2 / m, brings the residual to acceleration units."""
        return self.sample_period ** 2 / self.mass

    @staticmethod
    def _unpack(current, lagged_outputs, input_windows):
        z0 = None if current is None else current[:, 0]
        return z0, lagged_outputs[:, 0, 0], lagged_outputs[:, 1, 0], input_windows[:, 2, 0]

    # ----------------------------------------------------------------- implicit form

    def residual_batch(self, current, lagged_outputs, input_windows, theta):
        z0, z1, z2, i2 = self._unpack(current, lagged_outputs, input_windows)
        m, g, ts2 = self.mass, self.gravity, self.sample_period ** 2
        h = m * z2 ** 2 * ((z0 - 2.0 * z1 + z2) / ts2 - g) + theta[0] * i2 ** 2 + theta[1]
        return h[:, None]

    def residual_jacobians_batch(self, current, lagged_outputs, input_windows, theta):
        z0, z1, z2, i2 = self._unpack(current, lagged_outputs, input_windows)
        m, g, ts2 = self.mass, self.gravity, self.sample_period ** 2
        n_windows = z0.shape[0]

        wrt_current = (m * z2 ** 2 / ts2)[:, None, None]
        wrt_lagged = np.empty((n_windows, 2, 1, 1))
        wrt_lagged[:, 0, 0, 0] = -2.0 * m * z2 ** 2 / ts2
        wrt_lagged[:, 1, 0, 0] = (m / ts2) * z2 * (2.0 * z0 - 4.0 * z1 + 3.0 * z2) - 2.0 * m * g * z2
        wrt_inputs = np.zeros((n_windows, 3, 1, 1))
        wrt_inputs[:, 2, 0, 0] = 2.0 * theta[0] * i2
        wrt_theta = np.stack([i2 ** 2, np.ones(n_windows)], axis=-1)[:, None, :]
        return ResidualJacobians(wrt_current, wrt_lagged, wrt_inputs, wrt_theta)

    def linear_regression(self, current, lagged_outputs, input_windows):
        """Residual h = A theta + b evaluated on measured windows."""
        z0, z1, z2, i2 = self._unpack(current, lagged_outputs, input_windows)
        m, g, ts2 = self.mass, self.gravity, self.sample_period ** 2
        regressor = np.column_stack([i2 ** 2, np.ones_like(i2)])
        offset = m * z2 ** 2 * ((z0 - 2.0 * z1 + z2) / ts2 - g)
        return regressor, offset

    # ----------------------------------------------------------------- solved form

    def evaluate_batch(self, lagged_outputs, input_windows, theta):
        _, z1, z2, i2 = self._unpack(None, lagged_outputs, input_windows)
        ts2 = self.sample_period ** 2
        force = (theta[0] * i2 ** 2 + theta[1]) / (self.mass * z2 ** 2)
        return (2.0 * z1 - z2 + ts2 * (self.gravity - force))[:, None]

    def jacobians_batch(self, lagged_outputs, input_windows, theta):
        _, z1, z2, i2 = self._unpack(None, lagged_outputs, input_windows)
        m, ts2 = self.mass, self.sample_period ** 2
        n_windows = z1.shape[0]

        wrt_outputs = np.empty((n_windows, 2, 1, 1))
        wrt_outputs[:, 0, 0, 0] = 2.0
        wrt_outputs[:, 1, 0, 0] = -1.0 + 2.0 * ts2 * (theta[0] * i2 ** 2 + theta[1]) / (m * z2 ** 3)
        wrt_inputs = np.zeros((n_windows, 3, 1, 1))
        wrt_inputs[:, 2, 0, 0] = -2.0 * ts2 * theta[0] * i2 / (m * z2 ** 2)
        scale = -ts2 / (m * z2 ** 2)
        wrt_theta = np.stack([scale * i2 ** 2, scale], axis=-1)[:, None, :]
        return LocalJacobians(wrt_outputs, wrt_inputs, wrt_theta)

    # ----------------------------------------------------------------- helpers

    def equilibrium_current(self, position: float, theta=MAGLEV_TRUE_THETA) -> float:
        """Current holding the object still at `position`: k_m i^2 + k_0 = m g z^2."""
        k_m, k_0 = theta
        return float(np.sqrt((self.mass * self.gravity * position ** 2 - k_0) / k_m))

    def initial_theta(self, rng: np.random.Generator) -> np.ndarray:
        return 1e-4 * rng.standard_normal(self.n_params)

    def to_config(self):
        return {"kind": self.kind, "mass": self.mass, "gravity": self.gravity,
                "sample_period": self.sample_period}
