import logging
from typing import Optional

import numpy as np
import scipy.linalg

from ..errors import ConfigError, RankDeficientRegressorError
from ..model_core.dataset import Dataset, Weighting
from ..model_core.model_spec import ModelSpec
from ..model_core.simulation import input_windows, output_windows
from ..utils.global_config import BREAKDOWN_RTOL

logger = logging.getLogger(__name__)


def pem_ls(model: ModelSpec, dataset: Dataset, weighting: Optional[Weighting] = None) -> np.ndarray:
    """
    One-step-ahead least squares for models whose residual is affine in theta.

    The model supplies h = A theta + b on measured windows; theta minimizes
    sum_t ||h_t||^2_W through a QR factorization of the (whitened) regressor.

    Raises:
        ConfigError: the model has no linear regression form
        RankDeficientRegressorError: column i of the regressor is dependent on columns 0..i-1
    """
    if not hasattr(model, "linear_regression"):
        raise ConfigError("solver.method", f"least squares needs a model linear in theta, got '{model.kind}'")
    current, lagged = output_windows(dataset.outputs, model.order)
    regressor, offset = model.linear_regression(current, lagged, input_windows(dataset.inputs, model.order))
    p = model.n_outputs
    regressor = np.asarray(regressor, dtype=np.float64).reshape(-1, p, model.n_params)
    offset = np.asarray(offset, dtype=np.float64).reshape(-1, p)

    if weighting is not None:
        root = np.linalg.cholesky(weighting.output_weight).T
        regressor = np.einsum("ij,tjk->tik", root, regressor)
        offset = offset @ root.T
    regressor = regressor.reshape(-1, model.n_params)
    offset = offset.ravel()

    q, r = scipy.linalg.qr(regressor, mode="economic")
    column_norms = np.linalg.norm(regressor, axis=0)
    for i in range(model.n_params):
        if not abs(r[i, i]) > BREAKDOWN_RTOL * column_norms[i]:
            logger.error(f"❌ Regressor rank deficient at column {i}")
            raise RankDeficientRegressorError(i)

    theta = scipy.linalg.solve_triangular(r, -(q.T @ offset))
    logger.info(f"[LS] theta={np.array2string(theta, precision=6)}, "
                f"residual={np.linalg.norm(regressor @ theta + offset):.6g}")
    return theta
