from .adam import AdamConfig, AdamOptimizer, AdamResult, adam_fit, one_step_loss_and_gradient
from .bptt import bptt_gradient, bptt_loss_and_gradient, output_sensitivities, simulation_loss
from .least_squares import pem_ls

__all__ = [
    "AdamConfig",
    "AdamOptimizer",
    "AdamResult",
    "adam_fit",
    "one_step_loss_and_gradient",
    "bptt_gradient",
    "bptt_loss_and_gradient",
    "output_sensitivities",
    "simulation_loss",
    "pem_ls",
]
