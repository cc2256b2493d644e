"""
Q-less sparse Householder QR of J^T.

X = J^T is n_vars x m. Column k of X is reflected onto e_k, the reflector is
applied to the columns to its right, and row k of the result is kept as row k of
R. Q is never formed. Since R^T R = J J^T, R^T is a Cholesky factor of the
normal-equations matrix used by the solver.

Rows of X enter a sliding window [k, B_k] where B_k is the deepest row reached by
columns 0..k. Only window rows are held in a dense work buffer, addressed
circularly by row index modulo the window height; rows outside the window are
either finished (above) or still untouched (below). With an optional pattern
mask the routine counts multiplications on the tracked nonzero structure.

The tracked structure of column k is the original entries of J row k at or
right of k plus fill: every earlier reflector shares the dense theta rows with
every later column, so its rows are merged into them. For the output-error
layout the union is exactly the contiguous rows k..B_k.
"""

import logging
import time
from dataclasses import dataclass, field
from typing import Optional, Union

import numpy as np
import scipy.linalg
import scipy.sparse
from scipy.linalg.blas import dger

from ..errors import DimensionError, FillPatternError, RankBreakdownError
from ..sem_problem.sparse_jacobian import SparseJacobian
from ..utils.global_config import BREAKDOWN_RTOL
from .flop_ledger import FlopLedger
from .householder import housegen

logger = logging.getLogger(__name__)


def qr_log(message: str) -> None:
    logger.info(f"[SPARSE_QR] {message}")


@dataclass(frozen=True, eq=False)
class TriangularFactor:
    """
    Upper-triangular m x m factor stored as compressed rows.

    Attributes:
        size: m
        values: packed rows, row k holds R[k, k:] starting at offset(k)
        flop_ledger: counts charged while factorizing
        column_counts: structural nonzeros of each reflected column, fill included (tracked runs only)
        pattern_counts: original nonzeros of J row k at columns >= k (tracked runs only)
    """
    size: int
    values: np.ndarray
    flop_ledger: FlopLedger = field(default_factory=FlopLedger)
    column_counts: Optional[np.ndarray] = None
    pattern_counts: Optional[np.ndarray] = None

    @property
    def fill_counts(self) -> Optional[np.ndarray]:
        """Rows each reflector touches beyond the original pattern."""
        if self.column_counts is None or self.pattern_counts is None:
            return None
        return self.column_counts - self.pattern_counts

    def offset(self, k: int) -> int:
        return k * self.size - k * (k - 1) // 2

    def row(self, k: int) -> np.ndarray:
        start = self.offset(k)
        return self.values[start:start + self.size - k]

    def diagonal(self) -> np.ndarray:
        return np.array([self.values[self.offset(k)] for k in range(self.size)])

    def to_dense(self) -> np.ndarray:
        dense = np.zeros((self.size, self.size))
        for k in range(self.size):
            dense[k, k:] = self.row(k)
        return dense

    @classmethod
    def from_dense(cls, upper: np.ndarray, ledger: Optional[FlopLedger] = None) -> "TriangularFactor":
        upper = np.asarray(upper, dtype=np.float64)
        size = upper.shape[0]
        if upper.shape != (size, size):
            raise DimensionError(f"triangular factor must be square, got {upper.shape}")
        values = np.concatenate([upper[k, k:] for k in range(size)]) if size else np.empty(0)
        return cls(size, values, ledger or FlopLedger())


def _as_csr(jacobian: Union[SparseJacobian, scipy.sparse.spmatrix, np.ndarray]):
    """(J in CSR with sorted indices, J^T in CSR)."""
    if isinstance(jacobian, SparseJacobian):
        return jacobian.csr, jacobian.transpose_csr
    csr = scipy.sparse.csr_matrix(jacobian, dtype=np.float64, copy=True)
    csr.sort_indices()
    return csr, csr.T.tocsr()


def qless_qr(jacobian: Union[SparseJacobian, scipy.sparse.spmatrix, np.ndarray],
             ledger: Optional[FlopLedger] = None, track_flops: bool = True,
             expected_counts: Optional[np.ndarray] = None) -> TriangularFactor:
    """
    Factor J^T = Q R without forming Q.

    Args:
        jacobian: m x n_vars constraint Jacobian with m <= n_vars
        ledger: ledger to charge; a fresh one is created when omitted
        track_flops: maintain the structural pattern and count multiplications
        expected_counts: predicted structural nonzeros per column; implies tracking

    Returns:
        TriangularFactor whose R satisfies R^T R = J J^T

    Raises:
        RankBreakdownError: |R_kk| < 1e-12 * ||J[k, :]|| at some column k
        FillPatternError: a column's tracked structure differs from expected_counts
    """
    csr, transpose = _as_csr(jacobian)
    m, n_vars = csr.shape
    if m > n_vars:
        raise DimensionError(f"J must have at most as many rows as columns, got {m} x {n_vars}")
    if expected_counts is not None:
        expected_counts = np.asarray(expected_counts, dtype=np.int64)
        if expected_counts.shape != (m,):
            raise DimensionError(f"expected_counts has shape {expected_counts.shape}, expected ({m},)")
        track_flops = True
    ledger = ledger if ledger is not None else FlopLedger()
    if m == 0:
        return TriangularFactor(0, np.empty(0), ledger)

    indptr = csr.indptr
    row_lengths = np.diff(indptr)
    steps = np.arange(m)
    pattern_counts = None
    if track_flops:
        owner = np.repeat(steps, row_lengths)
        pattern_counts = np.bincount(owner[csr.indices >= owner], minlength=m).astype(np.int64)
    deepest = np.where(row_lengths > 0, csr.indices[np.maximum(indptr[1:] - 1, 0)], steps)
    bottom = np.maximum.accumulate(np.maximum(deepest, steps))
    height = int(np.max(bottom - steps + 1))
    column_norms = np.sqrt(np.asarray(csr.multiply(csr).sum(axis=1)).ravel())

    work = np.zeros((height, m), order="F")
    mask = np.zeros((height, m), dtype=np.float32, order="F") if track_flops else None
    column_counts = np.zeros(m, dtype=np.int64) if track_flops else None
    values = np.empty(m * (m + 1) // 2)
    t_indptr, t_indices, t_data = transpose.indptr, transpose.indices, transpose.data
    loaded = -1
    started = time.perf_counter()
    debug = logger.isEnabledFor(logging.DEBUG)

    offset = 0
    for k in range(m):
        while loaded < bottom[k]:
            loaded += 1
            slot = loaded % height
            lo, hi = t_indptr[loaded], t_indptr[loaded + 1]
            work[slot, t_indices[lo:hi]] = t_data[lo:hi]
            if track_flops:
                mask[slot, t_indices[lo:hi]] = 1.0

        pivot = k % height
        column = work[:, k]
        if track_flops:
            pattern = mask[:, k].copy()
            structural = int(pattern.sum())
            column_counts[k] = structural
            if expected_counts is not None and structural != expected_counts[k]:
                raise FillPatternError(k, int(expected_counts[k]), structural)
            pattern[pivot] = 1.0
            u, nu = housegen(column, pivot, ledger, nnz=structural)
        else:
            u, nu = housegen(column, pivot)

        if not abs(nu) >= BREAKDOWN_RTOL * column_norms[k] or column_norms[k] == 0.0:
            raise RankBreakdownError(k, nu, float(column_norms[k]))
        # rows are stored with a positive diagonal; flipping a row leaves R^T R unchanged
        sign = -1.0 if nu < 0 else 1.0
        values[offset] = abs(nu)

        if k + 1 < m:
            block = work[:, k + 1:]
            v = u @ block
            updated = dger(-1.0, u, v, a=block, overwrite_a=True)
            if not np.shares_memory(updated, block):
                block[...] = updated
            np.multiply(block[pivot], sign, out=values[offset + 1:offset + m - k])

            if track_flops:
                trailing = mask[:, k + 1:]
                overlap = pattern @ trailing
                touched = overlap > 0
                n_touched = int(np.count_nonzero(touched))
                ledger.charge_inner_product(int(overlap.sum(dtype=np.float64)))
                ledger.charge_rank1_update(int(pattern.sum()) * n_touched)
                if n_touched == touched.size:
                    np.maximum(trailing, pattern[:, None], out=trailing)
                elif n_touched:
                    columns = np.flatnonzero(touched) + k + 1
                    mask[:, columns] = np.maximum(mask[:, columns], pattern[:, None])

        work[pivot, k:] = 0.0
        if track_flops:
            mask[pivot, k:] = 0.0
        offset += m - k

        if debug and k % 500 == 0:
            logger.debug(f"[SPARSE_QR] column {k}/{m}, window height {height}")

    if debug:
        qr_log(f"factorized m={m}, n_vars={n_vars}, window={height} in "
               f"{(time.perf_counter() - started) * 1e3:.2f} ms")
    return TriangularFactor(m, values, ledger, column_counts, pattern_counts)


def solve_step_system(factor: TriangularFactor, rhs: np.ndarray) -> np.ndarray:
    """Solve (R^T R) sigma = rhs: forward substitution with R^T, then backward with R."""
    m = factor.size
    rhs = np.asarray(rhs, dtype=np.float64)
    if rhs.shape != (m,):
        raise DimensionError(f"rhs has shape {rhs.shape}, expected ({m},)")
    values = factor.values

    z = rhs.copy()
    offset = 0
    for k in range(m):
        z[k] /= values[offset]
        if k + 1 < m:
            z[k + 1:] -= values[offset + 1:offset + m - k] * z[k]
        offset += m - k

    sigma = z
    for k in range(m - 1, -1, -1):
        offset = factor.offset(k)
        if k + 1 < m:
            sigma[k] -= values[offset + 1:offset + m - k] @ sigma[k + 1:]
        sigma[k] /= values[offset]
    return sigma


def dense_triangular_factor(jacobian: Union[SparseJacobian, np.ndarray]) -> np.ndarray:
    """Dense Householder QR of J^T (LAPACK); returns the m x m upper factor."""
    dense = jacobian.to_dense() if isinstance(jacobian, SparseJacobian) else np.asarray(jacobian, dtype=np.float64)
    m = dense.shape[0]
    result = scipy.linalg.qr(dense.T, mode="r", overwrite_a=True, check_finite=False)
    upper = result[0] if isinstance(result, tuple) else result
    return upper[:m, :m]


def dense_solve_step_system(upper: np.ndarray, rhs: np.ndarray) -> np.ndarray:
    z = scipy.linalg.solve_triangular(upper, rhs, trans="T", check_finite=False)
    return scipy.linalg.solve_triangular(upper, z, check_finite=False)
