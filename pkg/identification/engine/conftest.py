import numpy as np
import pytest

from .model_core.dataset import Dataset
from .sem_problem.sparse_jacobian import JacobianBand, SparseJacobian


def random_oe_jacobian(rng: np.random.Generator, n_params: int, n_outputs: int, order: int,
                       n_samples: int) -> SparseJacobian:
    """Output-error block pattern with random values and a well-conditioned dependent block."""
    p = n_outputs
    n_blocks = n_samples - order
    m = p * n_blocks
    band = rng.standard_normal((n_blocks, p, p * (order + 1)))
    band[:, :, p * order:] += 3.0 * np.eye(p)
    return SparseJacobian(
        shape=(m, n_params + p * n_samples),
        block_rows=p,
        theta_block=rng.standard_normal((m, n_params)),
        bands=(JacobianBand(band, n_params + p * np.arange(n_blocks)),),
        trajectory_band=0,
    )


def lti_dataset(theta=(0.5, 1.0), n_samples: int = 50, seed: int = 0) -> Dataset:
    """Noiseless first-order data from y_1 = 0 driven by white noise."""
    rng = np.random.default_rng(seed)
    inputs = rng.standard_normal(n_samples)
    outputs = np.zeros(n_samples)
    for t in range(1, n_samples):
        outputs[t] = theta[0] * outputs[t - 1] + theta[1] * inputs[t - 1]
    return Dataset(inputs, outputs)


@pytest.fixture
def rng():
    return np.random.default_rng(20240501)


@pytest.fixture
def oe_jacobian(rng):
    def build(n_params=2, n_outputs=1, order=1, n_samples=12):
        return random_oe_jacobian(rng, n_params, n_outputs, order, n_samples)
    return build
