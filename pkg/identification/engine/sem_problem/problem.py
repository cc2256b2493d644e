"""
Constrained simulation-error problem: variable layout and assembly.

The decision vector is time-major and parameter-first:

    OE:  x = [theta | y_1 ... y_N]
    EIV: x = [theta | u_1 ... u_N | y_1 ... y_N]
    SS:  x = [theta | x_1 ... x_N]

Constraint block t (0-based) ties the trajectory value at time t + n to its
predecessors, so the trailing m entries of x are determined by the leading
free block [theta | (u) | first n trajectory values] whenever x is feasible.
"""

import logging
from dataclasses import dataclass
from functools import cached_property
from typing import NamedTuple, Optional, Union

import numpy as np

from ..errors import ConfigError, DimensionError, InsufficientDataError
from ..model_core.dataset import Dataset, Weighting
from ..model_core.model_spec import ModelSpec, StateSpaceSpec
from ..model_core.simulation import input_windows
from ..utils.accepted_types import Variant

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class VariableLayout:
    variant: Variant
    n_params: int
    n_samples: int
    trajectory_width: int
    input_width: int
    order: int

    @property
    def n_inputs_block(self) -> int:
        return self.input_width * self.n_samples if self.variant == Variant.EIV else 0

    @property
    def n_vars(self) -> int:
        return self.n_params + self.n_inputs_block + self.trajectory_width * self.n_samples

    @property
    def n_constraints(self) -> int:
        return self.trajectory_width * (self.n_samples - self.order)

    @property
    def n_free(self) -> int:
        """Length of the leading block [theta | (u) | first n trajectory values]."""
        return self.n_vars - self.n_constraints

    @property
    def theta_slice(self) -> slice:
        return slice(0, self.n_params)

    @property
    def input_slice(self) -> slice:
        return slice(self.n_params, self.n_params + self.n_inputs_block)

    @property
    def trajectory_slice(self) -> slice:
        return slice(self.n_params + self.n_inputs_block, self.n_vars)

    @property
    def trajectory_offset(self) -> int:
        return self.n_params + self.n_inputs_block


class VariableBlocks(NamedTuple):
    theta: np.ndarray
    inputs: np.ndarray
    trajectory: np.ndarray


@dataclass(frozen=True, eq=False)
class ProblemInstance:
    """
    Assembled constrained SEM problem. Immutable; safe to share across workers.

    Attributes:
        model: NIO model (OE, EIV) or state-space model (SS)
        dataset: measured record
        weighting: cost weights and ridge coefficient
        variant: OE, EIV or SS
        layout: variable layout derived from the above
        constraint_scale: optional (m,) per-row scale applied to h and its Jacobian
    """
    model: Union[ModelSpec, StateSpaceSpec]
    dataset: Dataset
    weighting: Weighting
    variant: Variant
    layout: VariableLayout
    constraint_scale: Optional[np.ndarray] = None

    @property
    def n_constraints(self) -> int:
        return self.layout.n_constraints

    @property
    def n_vars(self) -> int:
        return self.layout.n_vars

    @property
    def order(self) -> int:
        return self.layout.order

    @property
    def diagonal_is_identity(self) -> bool:
        """True when every dependent-variable diagonal block of the Jacobian is I."""
        return (self.variant == Variant.SS or not self.model.is_implicit) and self.constraint_scale is None

    @cached_property
    def data_input_windows(self) -> np.ndarray:
        return input_windows(self.dataset.inputs, self.layout.order)

    def split(self, x: np.ndarray) -> VariableBlocks:
        """Views of theta, the input block (EIV) and the (N, width) trajectory."""
        x = self.check_point(x)
        layout = self.layout
        inputs = (x[layout.input_slice].reshape(layout.n_samples, layout.input_width)
                  if self.variant == Variant.EIV else self.dataset.inputs)
        trajectory = x[layout.trajectory_slice].reshape(layout.n_samples, layout.trajectory_width)
        return VariableBlocks(x[layout.theta_slice], inputs, trajectory)

    def check_point(self, x: np.ndarray) -> np.ndarray:
        x = np.asarray(x, dtype=np.float64)
        if x.shape != (self.n_vars,):
            raise DimensionError(f"x has shape {x.shape}, expected ({self.n_vars},) for {self.variant.value} layout")
        return x

    def initial_point(self, rng: Optional[np.random.Generator] = None,
                      theta0: Optional[np.ndarray] = None) -> np.ndarray:
        """
        Warm start: random theta (model initializer), trajectory at the measurements
        (inputs too for EIV), zero states for SS.
        """
        if theta0 is None:
            rng = rng if rng is not None else np.random.default_rng(0)
            theta0 = self.model.initial_theta(rng)
        theta0 = self.model.check_theta(theta0)
        if self.variant == Variant.SS:
            trajectory = np.zeros(self.layout.n_samples * self.layout.trajectory_width)
        else:
            trajectory = self.dataset.outputs.ravel()
        blocks = [theta0]
        if self.variant == Variant.EIV:
            blocks.append(self.dataset.inputs.ravel())
        blocks.append(trajectory)
        return np.concatenate(blocks)

    def compose(self, theta: np.ndarray, trajectory: np.ndarray,
                inputs: Optional[np.ndarray] = None) -> np.ndarray:
        """Inverse of split."""
        blocks = [np.ravel(theta)]
        if self.variant == Variant.EIV:
            blocks.append(np.ravel(self.dataset.inputs if inputs is None else inputs))
        blocks.append(np.ravel(trajectory))
        return self.check_point(np.concatenate(blocks))


def assemble(model: Union[ModelSpec, StateSpaceSpec], dataset: Dataset,
             weighting: Optional[Weighting] = None, variant: Union[Variant, str] = Variant.OE,
             constraint_scale: Union[None, str, float, np.ndarray] = None) -> ProblemInstance:
    """
    Build the constrained SEM problem.

    Args:
        model: ModelSpec for OE/EIV, StateSpaceSpec for SS
        dataset: record with N > n samples
        weighting: defaults to identity weights and no ridge term
        variant: Variant or its string value
        constraint_scale: None (unscaled), "auto" (model's residual_scale if any),
            a scalar, or an (m,) array of per-row factors

    Raises:
        InsufficientDataError: N <= n
        DimensionError: dataset channel counts disagree with the model
    """
    variant = Variant(variant)
    is_state_space = isinstance(model, StateSpaceSpec)
    if (variant == Variant.SS) != is_state_space:
        raise ConfigError("variant", f"variant '{variant.value}' does not match model {type(model).__name__}")
    if dataset.n_outputs != model.n_outputs or dataset.n_inputs != model.n_inputs:
        raise DimensionError(
            f"dataset has q={dataset.n_inputs}, p={dataset.n_outputs}; model expects "
            f"q={model.n_inputs}, p={model.n_outputs}"
        )

    order = 1 if is_state_space else model.order
    if dataset.n_samples <= order:
        raise InsufficientDataError(f"dataset length {dataset.n_samples} must exceed model order {order}")

    if weighting is None:
        weighting = Weighting.identity(model.n_outputs, model.n_inputs if variant == Variant.EIV else None)
    if weighting.output_weight.shape != (model.n_outputs, model.n_outputs):
        raise DimensionError(f"W_y must be {model.n_outputs}x{model.n_outputs}")
    if variant == Variant.EIV and weighting.input_weight is None:
        logger.warning("⚠️ EIV problem without W_u; using identity input weight")
        weighting = Weighting(weighting.output_weight, np.eye(model.n_inputs), weighting.ridge_coeff)

    layout = VariableLayout(
        variant=variant,
        n_params=model.n_params,
        n_samples=dataset.n_samples,
        trajectory_width=model.n_states if is_state_space else model.n_outputs,
        input_width=model.n_inputs,
        order=order,
    )

    scale = None
    if isinstance(constraint_scale, str):
        if constraint_scale != "auto":
            raise ConfigError("constraint_scale", f"unknown option '{constraint_scale}'")
        factor = getattr(model, "residual_scale", None)
        scale = None if factor is None else np.full(layout.n_constraints, float(factor))
    elif constraint_scale is not None:
        scale = np.broadcast_to(np.asarray(constraint_scale, dtype=np.float64), (layout.n_constraints,)).copy()
        if np.any(scale <= 0):
            raise ConfigError("constraint_scale", "row scales must be positive")
    if scale is not None:
        scale.flags.writeable = False

    problem = ProblemInstance(model, dataset, weighting, variant, layout, scale)
    logger.debug(f"Assembled {variant.value} problem: n_vars={layout.n_vars}, m={layout.n_constraints}")
    return problem
