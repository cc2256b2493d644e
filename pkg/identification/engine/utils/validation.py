from typing import Any, Dict, Mapping, Optional, Type, TypeVar

from pydantic import BaseModel, ValidationError

from ..errors import ConfigError

M = TypeVar("M", bound=BaseModel)


def config_error_from(error: ValidationError, section: Optional[str] = None) -> ConfigError:
    """First pydantic failure as a ConfigError keyed by its dotted location."""
    first = error.errors()[0]
    location = ".".join(str(part) for part in first.get("loc", ()))
    key = ".".join(part for part in (section, location) if part) or (section or "config")
    return ConfigError(key, first.get("msg", str(error)))


def validated(model_cls: Type[M], data: Optional[Mapping[str, Any]] = None,
              section: Optional[str] = None, **overrides: Any) -> M:
    """Build a settings model, turning validation failures into ConfigError."""
    values: Dict[str, Any] = dict(data or {})
    values.update({key: value for key, value in overrides.items() if value is not None})
    try:
        return model_cls.model_validate(values)
    except ValidationError as e:
        raise config_error_from(e, section) from e
