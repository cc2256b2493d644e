import logging
from typing import Any, Dict, Union

from ..errors import ConfigError
from ..model_core.model_spec import ModelSpec, StateSpaceSpec
from .linear_state_space import LinearStateSpaceModel
from .lti_first_order import LtiFirstOrder
from .maglev import MaglevModel
from .mlp_nio import MlpNioModel

logger = logging.getLogger(__name__)


def build_model(description: Dict[str, Any]) -> Union[ModelSpec, StateSpaceSpec]:
    """Instantiate a model from the dictionary written by `to_config()` or a `[model]` section."""
    kind = str(description.get("kind", "")).lower()
    try:
        if kind == "lti":
            return LtiFirstOrder()
        if kind == "mlp":
            return MlpNioModel(
                order=int(description["order"]),
                n_outputs=int(description["n_outputs"]),
                n_inputs=int(description["n_inputs"]),
                hidden_layers=description.get("layers", (5, 5)),
            )
        if kind == "maglev":
            kwargs = {key: float(description[key]) for key in ("mass", "gravity", "sample_period")
                      if description.get(key) is not None}
            return MaglevModel(**kwargs)
        if kind == "linear_ss":
            return LinearStateSpaceModel(
                n_states=int(description["n_states"]),
                n_outputs=int(description["n_outputs"]),
                n_inputs=int(description["n_inputs"]),
            )
    except KeyError as e:
        raise ConfigError(f"model.{e.args[0]}", f"required for model kind '{kind}'") from e
    raise ConfigError("model.kind", f"unknown model kind '{kind}'")
