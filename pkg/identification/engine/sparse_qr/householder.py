import math
from typing import Optional, Tuple

import numpy as np

from ..errors import DimensionError
from .flop_ledger import FlopLedger


def housegen(x: np.ndarray, pivot: int = 0, ledger: Optional[FlopLedger] = None,
             nnz: Optional[int] = None) -> Tuple[np.ndarray, float]:
    """
    Householder reflector generator.

    Returns (u, nu) with (I - u u^T) x = nu * e_pivot and ||u|| = sqrt(2) (or u = 0
    apart from u_pivot = sqrt(2) when x = 0). Zero entries of x stay zero in u, so
    the reflector keeps the sparsity of x.

    Args:
        x: column to reflect
        pivot: index of the entry that receives nu
        ledger: charged 3 * nnz(x) for nonzero x
        nnz: structural nonzero count to charge instead of counting numerically
    """
    x = np.asarray(x, dtype=np.float64)
    if x.size == 0:
        raise DimensionError("housegen needs a nonempty vector")
    nu = math.sqrt(float(x @ x))
    if nu == 0.0:
        u = np.zeros_like(x)
        u[pivot] = math.sqrt(2.0)
        return u, 0.0

    u = x / nu
    if u[pivot] >= 0:
        u[pivot] += 1.0
        nu = -nu
    else:
        u[pivot] -= 1.0
    u /= math.sqrt(abs(u[pivot]))

    if ledger is not None:
        ledger.charge_housegen(3 * (np.count_nonzero(x) if nnz is None else nnz))
    return u, nu
