from .flop_ledger import FlopLedger
from .flop_model import (
    FlopPrediction,
    fill_column_counts,
    predict_flops,
    predicted_column_counts,
    printed_column_counts,
)
from .householder import housegen
from .matvec import dense_matvec_flops, sparse_matvec, sparse_matvec_t
from .qless_qr import (
    TriangularFactor,
    dense_solve_step_system,
    dense_triangular_factor,
    qless_qr,
    solve_step_system,
)

__all__ = [
    "FlopLedger",
    "FlopPrediction",
    "predict_flops",
    "predicted_column_counts",
    "printed_column_counts",
    "fill_column_counts",
    "housegen",
    "dense_matvec_flops",
    "sparse_matvec",
    "sparse_matvec_t",
    "TriangularFactor",
    "dense_solve_step_system",
    "dense_triangular_factor",
    "qless_qr",
    "solve_step_system",
]
