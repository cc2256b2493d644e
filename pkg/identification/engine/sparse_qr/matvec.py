from typing import Optional

import numpy as np

from ..errors import DimensionError
from ..sem_problem.sparse_jacobian import SparseJacobian
from .flop_ledger import FlopLedger


def sparse_matvec(jacobian: SparseJacobian, v: np.ndarray, ledger: Optional[FlopLedger] = None) -> np.ndarray:
    """J v over the stored block pattern; charges one product per stored entry."""
    v = np.asarray(v, dtype=np.float64)
    if v.shape != (jacobian.shape[1],):
        raise DimensionError(f"vector has shape {v.shape}, expected ({jacobian.shape[1]},)")
    if ledger is not None:
        ledger.charge_matvec(jacobian.nnz)
    return jacobian.matvec(v)


def sparse_matvec_t(jacobian: SparseJacobian, w: np.ndarray, ledger: Optional[FlopLedger] = None) -> np.ndarray:
    """J^T w over the stored block pattern."""
    w = np.asarray(w, dtype=np.float64)
    if w.shape != (jacobian.shape[0],):
        raise DimensionError(f"vector has shape {w.shape}, expected ({jacobian.shape[0]},)")
    if ledger is not None:
        ledger.charge_matvec(jacobian.nnz)
    return jacobian.rmatvec(w)


def dense_matvec_flops(m: int, n_vars: int) -> int:
    return m * n_vars
