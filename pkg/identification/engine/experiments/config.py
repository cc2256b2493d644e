"""
Typed experiment configuration.

A run is described by four sections, [model], [data], [solver] and [output],
read from TOML or from the config.json frozen into an earlier run directory.
"""

import logging

try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib
from pathlib import Path
from typing import Any, Dict, Optional, Tuple, Union

import orjson
from pydantic import BaseModel, ConfigDict, Field, model_validator

from ..errors import ConfigError
from ..baselines.adam import AdamConfig
from ..datagen.noise import NoiseSpec
from ..solver.config import SolverConfig
from ..utils.accepted_types import AdamLoss, Method, ModelKind, NoiseKind, PlantKind, SystemKind, Variant
from ..utils.file_io import atomic_write_bytes
from ..utils.validation import validated

logger = logging.getLogger(__name__)


class ModelSection(BaseModel):
    model_config = ConfigDict(frozen=True, extra="forbid")

    kind: ModelKind
    order: Optional[int] = Field(None, ge=1)
    n_outputs: Optional[int] = Field(None, ge=1)
    n_inputs: Optional[int] = Field(None, ge=1)
    layers: Tuple[int, ...] = (5, 5)
    n_states: Optional[int] = Field(None, ge=1)
    mass: Optional[float] = Field(None, gt=0.0)
    gravity: Optional[float] = None
    sample_period: Optional[float] = Field(None, gt=0.0)

    def to_description(self) -> Dict[str, Any]:
        return {**self.model_dump(exclude_none=True), "kind": self.kind.value}


class DataSection(BaseModel):
    """
    Either CSV paths or a generator description.

    With `resample_per_seed`, every run seed draws a fresh noise realization
    (noise seed = run seed) on the same noiseless record.
    """
    model_config = ConfigDict(frozen=True, extra="forbid")

    path: Optional[str] = None
    test_path: Optional[str] = None
    system: Optional[SystemKind] = None
    n_samples: int = Field(200, ge=2)
    n_test: int = Field(0, ge=0)
    n_skip: int = Field(0, ge=0)
    seed: int = 0
    test_seed: int = 1
    theta_true: Optional[Tuple[float, ...]] = None
    plant: PlantKind = PlantKind.DISCRETE
    noise_kind: NoiseKind = NoiseKind.NONE
    noise_amp: float = Field(0.0, ge=0.0)
    noise_seed: int = 0
    errors_in_variables: bool = False
    input_noise_amp: float = Field(0.0, ge=0.0)
    resample_per_seed: bool = False
    standardize: bool = False

    @model_validator(mode="after")
    def _one_source(self) -> "DataSection":
        if (self.path is None) == (self.system is None):
            raise ValueError("give exactly one of 'path' or 'system'")
        return self

    def noise_spec(self, seed: Optional[int] = None) -> Optional[NoiseSpec]:
        if self.noise_kind == NoiseKind.NONE or (self.noise_amp == 0.0 and self.input_noise_amp == 0.0):
            return None
        return NoiseSpec(
            kind=self.noise_kind,
            amplitude=self.noise_amp,
            seed=self.noise_seed if seed is None else seed,
            errors_in_variables=self.errors_in_variables,
            input_amplitude=self.input_noise_amp,
        )


class SolverSection(BaseModel):
    model_config = ConfigDict(frozen=True, extra="forbid", populate_by_name=True)

    method: Method = Method.FLCMO
    compare: Tuple[Method, ...] = Field((), description="Extra methods fitted on the same data")
    variant: Variant = Variant.OE
    gain: float = Field(1.0, gt=0.0, alias="K")
    tau: float = Field(1e-2, gt=0.0)
    eps_f: float = Field(1e-8, gt=0.0)
    eps_h: float = Field(1e-8, gt=0.0)
    max_iters: int = Field(10_000, ge=1)
    seeds: Tuple[int, ...] = (0,)
    workers: Optional[int] = Field(None, ge=1)
    theta0: Optional[Tuple[float, ...]] = None
    constraint_scale: Optional[Union[float, str]] = None
    ridge: float = Field(0.0, ge=0.0)
    input_weight: float = Field(1.0, gt=0.0)
    dense_fallback: bool = False
    track_flops: bool = True
    log_every: int = Field(100, ge=1)
    adam_lr: float = Field(1e-3, gt=0.0)
    adam_epochs: int = Field(10_000, ge=1)
    adam_loss: AdamLoss = AdamLoss.SIMULATION
    adam_fit_initial_conditions: bool = False

    @model_validator(mode="after")
    def _check(self) -> "SolverSection":
        if not self.seeds:
            raise ValueError("at least one seed is required")
        if isinstance(self.constraint_scale, str) and self.constraint_scale != "auto":
            raise ValueError("constraint_scale must be a positive number or 'auto'")
        return self

    @property
    def methods(self) -> Tuple[Method, ...]:
        return (self.method,) + tuple(m for m in self.compare if m != self.method)

    def solver_config(self) -> SolverConfig:
        return SolverConfig(
            K=self.gain, tau=self.tau, eps_f=self.eps_f, eps_h=self.eps_h, max_iters=self.max_iters,
            dense_fallback=self.dense_fallback, track_flops=self.track_flops, log_every=self.log_every,
        )

    def adam_config(self, seed: int) -> AdamConfig:
        return AdamConfig(
            lr=self.adam_lr, epochs=self.adam_epochs, seed=seed, loss=self.adam_loss,
            fit_initial_conditions=self.adam_fit_initial_conditions,
            log_every=max(1, self.adam_epochs // 10),
        )


class OutputSection(BaseModel):
    model_config = ConfigDict(frozen=True, extra="forbid")

    directory: Optional[str] = Field(None, description="Parent of the run directory; SYSID_OUTPUT_DIR when unset")
    name: Optional[str] = None
    write_trace: bool = True


class ExperimentConfig(BaseModel):
    model_config = ConfigDict(frozen=True, extra="forbid")

    name: str = "experiment"
    model: ModelSection
    data: DataSection
    solver: SolverSection = SolverSection()
    output: OutputSection = OutputSection()

    @property
    def run_name(self) -> str:
        return self.output.name or self.name

    def to_json(self) -> bytes:
        return orjson.dumps(self.model_dump(mode="json", by_alias=True),
                            option=orjson.OPT_SORT_KEYS | orjson.OPT_INDENT_2)


def parse_config(data: Dict[str, Any]) -> ExperimentConfig:
    """
    Raises:
        ConfigError: keyed by the dotted location of the first invalid value, e.g. `solver.tau`
    """
    return validated(ExperimentConfig, data)


def load_config(path: Union[str, Path]) -> ExperimentConfig:
    """Read a TOML experiment file or a frozen config.json."""
    path = Path(path)
    try:
        raw = path.read_bytes()
    except OSError as e:
        raise ConfigError("config", f"cannot read {path}: {e}") from e
    try:
        data = orjson.loads(raw) if path.suffix == ".json" else tomllib.loads(raw.decode("utf-8"))
    except (orjson.JSONDecodeError, tomllib.TOMLDecodeError, UnicodeDecodeError) as e:
        raise ConfigError("config", f"cannot parse {path}: {e}") from e
    logger.info(f"Loaded experiment config from {path}")
    return parse_config(data)


def freeze_config(config: ExperimentConfig, run_dir: Union[str, Path]) -> Path:
    """Write the resolved config as sorted-key JSON; load_config accepts it back."""
    return atomic_write_bytes(Path(run_dir) / "config.json", config.to_json() + b"\n")


def with_solver_overrides(config: ExperimentConfig, **overrides: Any) -> ExperimentConfig:
    """Copy of `config` with [solver] keys replaced; None values are ignored."""
    overrides = {key: value for key, value in overrides.items() if value is not None}
    if not overrides:
        return config
    data = config.model_dump(mode="json", by_alias=True)
    data["solver"] = {**data["solver"], **overrides}
    return parse_config(data)
