"""
Ready-made experiments.

lti     noiseless first-order record, exact recovery over five initializations
wh      two-input two-output Wiener-Hammerstein benchmark fitted by a 3rd-order NNOE
maglev  magnetic levitation gray-box estimate against Adam and least squares
"""

from typing import Any, Dict, List

from ..errors import ConfigError
from ..models.maglev import MAGLEV_TRUE_THETA
from .config import ExperimentConfig, parse_config, with_solver_overrides

PRESETS: Dict[str, Dict[str, Any]] = {
    "lti": {
        "name": "lti",
        "model": {"kind": "lti"},
        "data": {"system": "lti", "n_samples": 200, "n_test": 200, "seed": 0, "test_seed": 1,
                 "theta_true": [0.5, 1.0]},
        "solver": {"method": "flcmo", "K": 1.0, "tau": 1e-2, "eps_f": 1e-8, "eps_h": 1e-8,
                   "max_iters": 20_000, "seeds": [0, 1, 2, 3, 4], "track_flops": False, "log_every": 2000},
    },
    "wh": {
        "name": "wh",
        "model": {"kind": "mlp", "order": 3, "n_outputs": 2, "n_inputs": 2, "layers": [5, 5]},
        "data": {"system": "wh", "n_samples": 800, "n_test": 2000, "n_skip": 200, "seed": 0, "test_seed": 1,
                 "standardize": True},
        "solver": {"method": "flcmo", "K": 100.0, "tau": 1e-2, "eps_f": 1e-3, "eps_h": 1e-3,
                   "max_iters": 500, "seeds": [0], "track_flops": False, "log_every": 50},
    },
    "maglev": {
        "name": "maglev",
        "model": {"kind": "maglev"},
        "data": {"system": "maglev", "n_samples": 200, "seed": 0, "plant": "discrete",
                 "noise_kind": "uniform", "noise_amp": 0.005, "resample_per_seed": True,
                 "theta_true": list(MAGLEV_TRUE_THETA)},
        "solver": {"method": "flcmo", "compare": ["adam", "ls"], "K": 2.0, "tau": 1e-3,
                   "eps_f": 1e-6, "eps_h": 1e-8, "max_iters": 20_000, "seeds": list(range(10)),
                   "constraint_scale": "auto", "track_flops": False, "log_every": 2000,
                   "adam_lr": 1e-3, "adam_epochs": 10_000},
    },
}


def preset_names() -> List[str]:
    return sorted(PRESETS)


def preset_config(name: str, **solver_overrides: Any) -> ExperimentConfig:
    """
    Resolve a preset, optionally overriding [solver] keys (e.g. workers, max_iters).

    Raises:
        ConfigError: unknown preset name or invalid override
    """
    try:
        raw = PRESETS[name.lower()]
    except KeyError as e:
        raise ConfigError("preset", f"unknown preset '{name}', expected one of {preset_names()}") from e
    return with_solver_overrides(parse_config(raw), **solver_overrides)
