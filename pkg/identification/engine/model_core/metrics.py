"""
Validation metrics. Both return one value per output channel; the best-fit rate
is a fraction (1 is a perfect fit, 0 matches the mean predictor).
"""

import numpy as np

from ..errors import DegenerateReferenceError, DimensionError
from ..utils.global_config import DEGENERATE_SPREAD_ULPS


def _as_channels(sim, ref):
    sim = np.asarray(sim, dtype=np.float64)
    ref = np.asarray(ref, dtype=np.float64)
    if sim.ndim == 1:
        sim = sim[:, None]
    if ref.ndim == 1:
        ref = ref[:, None]
    if sim.shape != ref.shape:
        raise DimensionError(f"simulation shape {sim.shape} differs from reference shape {ref.shape}")
    if sim.shape[0] < 1:
        raise DimensionError("metrics need at least one sample")
    return sim, ref


def rmse(sim, ref) -> np.ndarray:
    sim, ref = _as_channels(sim, ref)
    return np.sqrt(np.mean((sim - ref) ** 2, axis=0))


def bfr(sim, ref) -> np.ndarray:
    """
    1 - ||ref_i - sim_i|| / ||ref_i - mean(ref_i)|| per channel.

    A channel whose spread is at rounding level relative to its magnitude counts
    as constant and raises DegenerateReferenceError.
    """
    sim, ref = _as_channels(sim, ref)
    spread = np.linalg.norm(ref - ref.mean(axis=0), axis=0)
    scale = np.max(np.abs(ref), axis=0)
    floor = DEGENERATE_SPREAD_ULPS * np.finfo(np.float64).eps * np.sqrt(ref.shape[0]) * scale
    for channel in np.flatnonzero(spread <= floor):
        raise DegenerateReferenceError(int(channel))
    return 1.0 - np.linalg.norm(ref - sim, axis=0) / spread
