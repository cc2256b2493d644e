"""
Multiplication counts of the Q-less QR for output-error Jacobians.

For n_theta parameters, p outputs, model order phi and N samples the
constraint Jacobian is m x n_vars with m = p (N - phi) and
n_vars = n_theta + p N. Row t holds a dense theta block and a band of
p (phi + 1) trajectory columns, so column k of J^T (1-based) reaches down to
b_k = n_theta + p (ceil(k / p) + phi) and its reflector touches
chi(k) = b_k - k + 1 rows.

Three families are reported:

- exact: fill-aware sums that the instrumented ledger reproduces to the unit
- printed_*: the closed forms as printed in the complexity analysis
- dense_*: the same loop run on a fully dense J^T

The printed forms count only the original entries of each column, which for
n_theta >= p - 1 is chi_0(k) = max(0, n_theta - k + 1) + p (phi + 1). Earlier
reflectors also fill the rows between the pivot or theta block and the band
head, d(k) = chi(k) - chi_0(k) =
p (ceil(k / p) - 1) - max(0, k - n_theta - 1) more per column, which sums to
p^2 B (B - 1) / 2 - (m - n_theta) (m - n_theta - 1) / 2 with B = N - phi. The
*_fill_* fields carry exact minus printed for each class; the inner-product
delta also absorbs the band pairs the printed sum counts past column m.
"""

from dataclasses import asdict, dataclass
from typing import Dict

import numpy as np

from ..errors import DimensionError


@dataclass(frozen=True)
class FlopPrediction:
    n_params: int
    n_outputs: int
    order: int
    n_samples: int
    m: int
    n_vars: int
    housegen_flops: int
    inner_product_flops: int
    rank1_update_flops: int
    matvec_flops: int
    printed_housegen_flops: int
    printed_inner_product_dense_part: int
    printed_inner_product_band_part: int
    printed_rank1_update_flops: int
    printed_matvec_flops: int
    dense_housegen_flops: int
    dense_inner_product_flops: int
    dense_rank1_update_flops: int
    dense_matvec_flops: int
    dense_square_matvec_flops: int
    fill_rows: int
    housegen_fill_flops: int
    inner_product_fill_flops: int
    rank1_update_fill_flops: int

    @property
    def factorization_flops(self) -> int:
        return self.housegen_flops + self.inner_product_flops + self.rank1_update_flops

    @property
    def printed_inner_product_flops(self) -> int:
        return self.printed_inner_product_dense_part + self.printed_inner_product_band_part

    @property
    def printed_factorization_flops(self) -> int:
        return self.printed_housegen_flops + self.printed_inner_product_flops + self.printed_rank1_update_flops

    @property
    def dense_factorization_flops(self) -> int:
        return self.dense_housegen_flops + self.dense_inner_product_flops + self.dense_rank1_update_flops

    def to_dict(self) -> Dict[str, int]:
        return {
            **asdict(self),
            "factorization_flops": self.factorization_flops,
            "printed_inner_product_flops": self.printed_inner_product_flops,
            "printed_factorization_flops": self.printed_factorization_flops,
            "dense_factorization_flops": self.dense_factorization_flops,
        }


def _check_dimensions(n_params: int, n_outputs: int, order: int, n_samples: int) -> int:
    if n_params < 1 or n_outputs < 1 or order < 1:
        raise DimensionError(
            f"n_params, n_outputs and order must be positive, got ({n_params}, {n_outputs}, {order})"
        )
    m = n_outputs * (n_samples - order)
    if m <= n_params:
        raise DimensionError(
            f"need m = p (N - phi) > n_params, got m={m} for n_params={n_params}"
        )
    return m


def _block_index(k: np.ndarray, n_outputs: int) -> np.ndarray:
    """ceil(k / p) for 1-based k."""
    return -(-k // n_outputs)


def predicted_column_counts(n_params: int, n_outputs: int, order: int, n_samples: int) -> np.ndarray:
    """chi(k) for k = 1..m: structural nonzeros of each reflected column."""
    m = _check_dimensions(n_params, n_outputs, order, n_samples)
    k = np.arange(1, m + 1, dtype=np.int64)
    bottom = n_params + n_outputs * (_block_index(k, n_outputs) + order)
    return bottom - k + 1


def printed_column_counts(n_params: int, n_outputs: int, order: int, n_samples: int) -> np.ndarray:
    """chi_0(k): the original band and theta entries of column k, no fill."""
    m = _check_dimensions(n_params, n_outputs, order, n_samples)
    k = np.arange(1, m + 1, dtype=np.int64)
    return np.maximum(0, n_params - k + 1) + n_outputs * (order + 1)


def fill_column_counts(n_params: int, n_outputs: int, order: int, n_samples: int) -> np.ndarray:
    """d(k) = chi(k) - chi_0(k), the fill rows each reflector adds."""
    m = _check_dimensions(n_params, n_outputs, order, n_samples)
    k = np.arange(1, m + 1, dtype=np.int64)
    return n_outputs * (_block_index(k, n_outputs) - 1) - np.maximum(0, k - n_params - 1)


def _inner_product_counts(n_params: int, n_outputs: int, order: int, m: int, chi: np.ndarray) -> np.ndarray:
    p = n_outputs
    counts = np.zeros(m, dtype=np.int64)
    if m == 1:
        return counts

    # first column: the dense theta rows plus the untouched band heads of later columns
    j = np.arange(2, m + 1, dtype=np.int64)
    counts[0] = int(np.sum(n_params + p * np.maximum(0, order + 2 - _block_index(j, p))))

    k = np.arange(2, m + 1, dtype=np.int64)
    previous = _block_index(k - 1, p)
    filled_bottom = n_params + p * (previous + order)
    reach = np.minimum(p * (previous + order + 1), m)
    inside = np.maximum(0, reach - k)
    outside = (m - k) - inside
    counts[1:] = chi[1:] * inside + (filled_bottom - k + 1) * outside
    return counts


def predict_flops(n_params: int, n_outputs: int, order: int, n_samples: int) -> FlopPrediction:
    """
    Predicted multiplication counts for one factorization and one mat-vec.

    Args:
        n_params: n_theta
        n_outputs: p
        order: phi, number of lagged outputs
        n_samples: N

    Returns:
        FlopPrediction with exact, printed and dense families

    Raises:
        DimensionError: m = p (N - phi) does not exceed n_theta
    """
    m = _check_dimensions(n_params, n_outputs, order, n_samples)
    p, phi, nt = n_outputs, order, n_params
    n_vars = nt + p * n_samples

    chi = predicted_column_counts(nt, p, phi, n_samples)
    steps = np.arange(1, m + 1, dtype=np.int64)
    housegen = int(3 * chi.sum())
    inner = int(_inner_product_counts(nt, p, phi, m, chi).sum())
    update = int(np.sum((m - steps) * chi))
    row_nnz = nt + p * (phi + 1)

    band = p * (phi + 1)
    printed_housegen = 3 * m * (1 + phi) * p + 3 * (nt * nt + nt) // 2
    printed_dense_part = m * (nt * nt - nt) // 2 - nt * (nt + 1) * (nt + 2) // 6
    printed_band_part = m * band * (band - 1) // 2
    printed_update = ((band + 1) * m * (m - 1) // 2 + m * (nt * nt - nt) // 2
                    - (nt - 1) * nt * (nt + 1) // 6)

    n_blocks = n_samples - phi
    tail = (m - nt) * (m - nt - 1) // 2
    fill_rows = p * p * n_blocks * (n_blocks - 1) // 2 - tail
    fill = fill_column_counts(nt, p, phi, n_samples)

    dense_heights = n_vars - steps + 1
    return FlopPrediction(
        n_params=nt,
        n_outputs=p,
        order=phi,
        n_samples=n_samples,
        m=m,
        n_vars=n_vars,
        housegen_flops=housegen,
        inner_product_flops=inner,
        rank1_update_flops=update,
        matvec_flops=m * row_nnz,
        printed_housegen_flops=printed_housegen,
        printed_inner_product_dense_part=printed_dense_part,
        printed_inner_product_band_part=printed_band_part,
        printed_rank1_update_flops=printed_update,
        printed_matvec_flops=m * (nt + p * phi),
        dense_housegen_flops=int(3 * dense_heights.sum()),
        dense_inner_product_flops=int(np.sum(dense_heights * (m - steps))),
        dense_rank1_update_flops=int(np.sum(dense_heights * (m - steps))),
        dense_matvec_flops=m * n_vars,
        dense_square_matvec_flops=m * m,
        fill_rows=fill_rows,
        housegen_fill_flops=3 * fill_rows,
        inner_product_fill_flops=inner - printed_dense_part - printed_band_part,
        # the printed update already adds the pivot row once per column past n_theta
        rank1_update_fill_flops=int(np.sum((m - steps) * fill)) - tail,
    )
