"""
Full-batch Adam on the simulation-error loss (gradient by sensitivity propagation)
or on the one-step-ahead prediction loss.
"""

import logging
import time
from dataclasses import dataclass
from typing import List, Optional, Sequence, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict, Field

from ..errors import DivergedSimulationError
from ..model_core.dataset import Dataset, Weighting
from ..model_core.model_spec import ModelSpec
from ..model_core.simulation import input_windows, output_windows
from ..utils.accepted_types import AdamLoss, SolveStatus
from .bptt import bptt_loss_and_gradient

logger = logging.getLogger(__name__)


class AdamConfig(BaseModel):
    model_config = ConfigDict(frozen=True, extra="forbid")

    lr: float = Field(1e-3, gt=0.0)
    epochs: int = Field(10_000, ge=1)
    beta1: float = Field(0.9, ge=0.0, lt=1.0)
    beta2: float = Field(0.999, ge=0.0, lt=1.0)
    epsilon: float = Field(1e-8, gt=0.0)
    seed: int = 0
    loss: AdamLoss = AdamLoss.SIMULATION
    fit_initial_conditions: bool = Field(False, description="Optimize y_1..y_n jointly instead of pinning them to data")
    frozen: Tuple[int, ...] = Field((), description="Parameter indices held at their initial values")
    log_every: int = Field(1000, ge=1)


class AdamOptimizer:
    """Adam over a single flat parameter vector, updated in place."""

    def __init__(self, lr: float = 1e-3, beta1: float = 0.9, beta2: float = 0.999, epsilon: float = 1e-8):
        self.lr = lr
        self.beta1 = beta1
        self.beta2 = beta2
        self.epsilon = epsilon
        self.m: Optional[np.ndarray] = None
        self.v: Optional[np.ndarray] = None
        self.t = 0

    def step(self, params: np.ndarray, grad: np.ndarray) -> None:
        self.t += 1
        if self.m is None:
            self.m = np.zeros_like(params)
            self.v = np.zeros_like(params)

        bc1 = 1.0 - self.beta1 ** self.t
        bc2 = 1.0 - self.beta2 ** self.t

        self.m *= self.beta1
        self.m += (1.0 - self.beta1) * grad
        self.v *= self.beta2
        self.v += (1.0 - self.beta2) * (grad * grad)

        denom = np.sqrt(self.v / bc2) + self.epsilon
        params -= (self.lr / bc1) * self.m / denom


@dataclass(frozen=True, eq=False)
class AdamResult:
    """
    Attributes:
        theta: final parameters (last finite iterate on divergence)
        initial_conditions: (n, p) initial outputs used by the final rollout
        loss_trace: loss at every completed epoch
        status: max-iters when all epochs ran, diverged otherwise
    """
    theta: np.ndarray
    initial_conditions: np.ndarray
    loss_trace: np.ndarray
    status: SolveStatus
    wall_time: float
    seed: int
    message: str = ""

    @property
    def iterations(self) -> int:
        return int(self.loss_trace.size)

    @property
    def final_cost(self) -> float:
        return float(self.loss_trace[-1]) if self.loss_trace.size else float("inf")


def one_step_loss_and_gradient(model: ModelSpec, theta: np.ndarray, dataset: Dataset,
                               weighting: Optional[Weighting] = None) -> Tuple[float, np.ndarray]:
    """One-step-ahead prediction loss on measured windows, and its theta gradient."""
    weighting = weighting or Weighting.identity(model.n_outputs)
    current, lagged = output_windows(dataset.outputs, model.order)
    windows = input_windows(dataset.inputs, model.order)
    error = model.evaluate_batch(lagged, windows, theta) - current
    weighted = error @ weighting.output_weight
    jac = model.jacobians_batch(lagged, windows, theta)
    gradient = 2.0 * np.einsum("tp,tpk->k", weighted, jac.wrt_theta) + weighting.ridge_gradient(theta)
    return float(np.sum(weighted * error)) + weighting.ridge(theta), gradient


def _free_mask(size: int, n_params: int, frozen: Sequence[int]) -> np.ndarray:
    mask = np.ones(size)
    for index in frozen:
        if not 0 <= index < n_params:
            raise IndexError(f"frozen index {index} outside 0..{n_params - 1}")
        mask[index] = 0.0
    return mask


def adam_fit(model: ModelSpec, dataset: Dataset, config: Optional[AdamConfig] = None,
             weighting: Optional[Weighting] = None, theta0: Optional[np.ndarray] = None) -> AdamResult:
    """
    Run Adam for config.epochs full-batch steps.

    Args:
        model: explicit NIO model
        dataset: training record; y_1..y_n start at the measured values
        config: optimizer settings
        weighting: output weights and ridge term
        theta0: starting parameters; drawn with the model initializer from config.seed when omitted

    Returns:
        AdamResult; divergence is reported through its status
    """
    config = config or AdamConfig()
    rng = np.random.default_rng(config.seed)
    theta = model.check_theta(model.initial_theta(rng) if theta0 is None else theta0).copy()
    n_theta, n = model.n_params, model.order
    init = dataset.outputs[:n].copy()

    fit_init = config.fit_initial_conditions and config.loss == AdamLoss.SIMULATION
    params = np.concatenate([theta, init.ravel()]) if fit_init else theta
    mask = _free_mask(params.size, n_theta, config.frozen)
    optimizer = AdamOptimizer(config.lr, config.beta1, config.beta2, config.epsilon)

    losses: List[float] = []
    status, message = SolveStatus.MAX_ITERS, ""
    started = time.perf_counter()
    last_good = params.copy()

    for epoch in range(config.epochs):
        current_theta = params[:n_theta]
        current_init = params[n_theta:].reshape(n, -1) if fit_init else init
        try:
            if config.loss == AdamLoss.ONE_STEP:
                loss, gradient = one_step_loss_and_gradient(model, current_theta, dataset, weighting)
            else:
                loss, gradient = bptt_loss_and_gradient(model, current_theta, current_init, dataset, weighting)
                if not fit_init:
                    gradient = gradient[:n_theta]
        except DivergedSimulationError as e:
            status, message = SolveStatus.DIVERGED, str(e)
            break
        if not (np.isfinite(loss) and np.all(np.isfinite(gradient))):
            status, message = SolveStatus.DIVERGED, f"non-finite loss or gradient at epoch {epoch}"
            break

        losses.append(loss)
        last_good = params.copy()
        optimizer.step(params, gradient * mask)
        if epoch % config.log_every == 0:
            logger.info(f"[ADAM] epoch={epoch} loss={loss:.6g}")

    if status == SolveStatus.DIVERGED:
        logger.error(f"❌ [ADAM] {message}; keeping the last finite iterate")
        params = last_good
    else:
        logger.info(f"✅ [ADAM] Finished {config.epochs} epochs, loss={losses[-1]:.6g}")

    return AdamResult(
        theta=params[:n_theta].copy(),
        initial_conditions=params[n_theta:].reshape(n, -1).copy() if fit_init else init,
        loss_trace=np.asarray(losses),
        status=status,
        wall_time=time.perf_counter() - started,
        seed=config.seed,
        message=message,
    )
