from typing import List

import numpy as np

from .lti import datagen_log, gen_lti
from .maglev import DEFAULT_MAGLEV_NOISE, MAGLEV_REFERENCE, gen_maglev
from .noise import NoiseSpec, add_noise
from .signals import InputSpec, impulse, make_input, staircase, white_noise
from .wiener_hammerstein import WH_SAMPLE_PERIOD, WhSystem, gen_wh_mimo


def spawn_seeds(seed: int, count: int) -> List[int]:
    """Independent child seeds of `seed` (excitation and noise streams must not share one)."""
    children = np.random.SeedSequence(seed).spawn(count)
    return [int(child.generate_state(1)[0]) for child in children]


__all__ = [
    "datagen_log",
    "gen_lti",
    "gen_maglev",
    "gen_wh_mimo",
    "spawn_seeds",
    "DEFAULT_MAGLEV_NOISE",
    "MAGLEV_REFERENCE",
    "NoiseSpec",
    "add_noise",
    "InputSpec",
    "impulse",
    "make_input",
    "staircase",
    "white_noise",
    "WH_SAMPLE_PERIOD",
    "WhSystem",
]
