import logging
from typing import Optional, Sequence

import numpy as np

from ..errors import InsufficientDataError
from ..model_core.dataset import Dataset
from ..models.lti_first_order import LtiFirstOrder
from ..model_core.simulation import simulate_free_run
from ..utils.global_config import RNG_NAME
from .noise import NoiseSpec, add_noise
from .signals import InputSpec, make_input

logger = logging.getLogger(__name__)


def datagen_log(message: str) -> None:
    logger.info(f"[DATAGEN] {message}")


def gen_lti(theta_true: Sequence[float] = (0.5, 1.0), input_spec: Optional[InputSpec] = None,
            n_samples: int = 200, seed: int = 0, noise: Optional[NoiseSpec] = None) -> Dataset:
    """
    First-order data y_t = a y_{t-1} + b u_{t-1} from y_1 = 0.

    Raises:
        InsufficientDataError: n_samples < 2
    """
    if n_samples < 2:
        raise InsufficientDataError(f"LTI generator needs at least 2 samples, got {n_samples}")
    input_spec = input_spec or InputSpec()
    theta = np.asarray(theta_true, dtype=np.float64)
    if abs(theta[0]) >= 1.0 and n_samples > 50:
        logger.warning(f"⚠️ [DATAGEN] |a|={abs(theta[0]):.3g} >= 1: the generating system is unstable "
                       f"over {n_samples} samples")

    inputs = make_input(input_spec, n_samples, np.random.default_rng(seed))
    with np.errstate(over="ignore", invalid="ignore"):
        outputs = simulate_free_run(LtiFirstOrder(), theta, np.zeros((1, 1)), inputs)
    dataset = Dataset(inputs, outputs, 1.0, {
        "generator": "lti",
        "seed": str(seed),
        "rng": RNG_NAME,
        "theta_true": ",".join(repr(float(v)) for v in theta),
        "input_kind": input_spec.kind.value,
        "input_amplitude": repr(input_spec.amplitude),
    })
    datagen_log(f"Generated LTI record: N={n_samples}, input={input_spec.kind.value}, seed={seed}")
    return add_noise(dataset, noise) if noise is not None else dataset
