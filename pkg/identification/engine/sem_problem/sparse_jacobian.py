"""
Block-structured constraint Jacobian.

Rows come in blocks of r = p (or n_states) scalar constraints, one block per
time step. Every row has the same layout: a dense theta segment followed by one
or more contiguous bands of trajectory columns. The last window position of the
trajectory band is the dependent variable of that block (y_{t+n}, or x_{t+1}).
"""

from dataclasses import dataclass
from functools import cached_property
from typing import Tuple

import numpy as np
import scipy.sparse

from ..errors import DimensionError


@dataclass(frozen=True, eq=False)
class JacobianBand:
    """
    Dense values of one band.

    Attributes:
        values: (n_blocks, r, width) entries
        column_starts: (n_blocks,) first column of each block's span
    """
    values: np.ndarray
    column_starts: np.ndarray

    @property
    def width(self) -> int:
        return self.values.shape[2]


@dataclass(frozen=True, eq=False)
class SparseJacobian:
    """
    Attributes:
        shape: (m, n_vars)
        block_rows: r, rows per time block
        theta_block: (m, n_theta) dense parameter columns
        bands: trajectory bands in ascending column order
        trajectory_band: index into bands of the band holding the dependent variables
    """
    shape: Tuple[int, int]
    block_rows: int
    theta_block: np.ndarray
    bands: Tuple[JacobianBand, ...]
    trajectory_band: int

    @property
    def n_params(self) -> int:
        return self.theta_block.shape[1]

    @property
    def row_nnz(self) -> int:
        """Stored entries per row, explicit zeros of the block pattern included."""
        return self.n_params + sum(band.width for band in self.bands)

    @property
    def nnz(self) -> int:
        return self.shape[0] * self.row_nnz

    @cached_property
    def csr(self) -> scipy.sparse.csr_matrix:
        """Row-compressed storage keeping the full block pattern."""
        m, n_vars = self.shape
        r = self.block_rows
        data = [self.theta_block]
        indices = [np.broadcast_to(np.arange(self.n_params), (m, self.n_params))]
        for band in self.bands:
            data.append(band.values.reshape(m, band.width))
            starts = np.repeat(band.column_starts, r)
            indices.append(starts[:, None] + np.arange(band.width))
        data = np.concatenate(data, axis=1).ravel()
        indices = np.concatenate(indices, axis=1).ravel().astype(np.int64)
        if indices.size and (indices.min() < 0 or indices.max() >= n_vars):
            raise DimensionError("Jacobian band extends beyond the variable vector")
        indptr = np.arange(m + 1, dtype=np.int64) * self.row_nnz
        return scipy.sparse.csr_matrix((data, indices, indptr), shape=self.shape)

    @cached_property
    def transpose_csr(self) -> scipy.sparse.csr_matrix:
        """J^T in row-compressed form: row i lists the constraints variable i enters."""
        return self.csr.T.tocsr()

    @property
    def dependent_band(self) -> JacobianBand:
        return self.bands[self.trajectory_band]

    def diagonal_blocks(self) -> np.ndarray:
        """(n_blocks, r, r) derivative of each block with respect to its dependent variable."""
        band = self.dependent_band
        return band.values[:, :, band.width - self.block_rows:]

    def to_dense(self) -> np.ndarray:
        return self.csr.toarray()

    def matvec(self, v: np.ndarray) -> np.ndarray:
        return self.csr @ v

    def rmatvec(self, w: np.ndarray) -> np.ndarray:
        return self.csr.T @ w
