from .linear_state_space import LinearStateSpaceModel
from .lti_first_order import LtiFirstOrder
from .maglev import GRAVITY, MAGLEV_MASS, MAGLEV_SAMPLE_PERIOD, MAGLEV_TRUE_THETA, MaglevModel
from .mlp_nio import MlpNioModel
from .registry import build_model

__all__ = [
    "LinearStateSpaceModel",
    "LtiFirstOrder",
    "MaglevModel",
    "MlpNioModel",
    "build_model",
    "GRAVITY",
    "MAGLEV_MASS",
    "MAGLEV_SAMPLE_PERIOD",
    "MAGLEV_TRUE_THETA",
]
