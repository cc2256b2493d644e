"""
Tests for the Householder generator, the Q-less QR and the step-system solves.
"""

import math

import numpy as np
import pytest
import scipy.linalg

from identification.engine.conftest import lti_dataset, random_oe_jacobian
from identification.engine.errors import DimensionError, FillPatternError, RankBreakdownError
from identification.engine.models.lti_first_order import LtiFirstOrder
from identification.engine.sem_problem import assemble, constraint_jacobian
from identification.engine.sparse_qr import (
    FlopLedger,
    TriangularFactor,
    dense_solve_step_system,
    dense_triangular_factor,
    fill_column_counts,
    housegen,
    predicted_column_counts,
    qless_qr,
    solve_step_system,
    sparse_matvec,
    sparse_matvec_t,
)

STRUCTURED_CASES = [
    (n_params, p, phi, n_samples)
    for n_params, p, phi, n_samples in [
        (1, 1, 1, 10), (2, 1, 1, 12), (3, 1, 2, 15), (4, 1, 3, 20), (1, 2, 1, 10),
        (2, 2, 2, 14), (3, 2, 3, 18), (4, 2, 1, 25), (1, 3, 2, 12), (2, 3, 3, 16),
        (3, 3, 1, 30), (4, 3, 2, 40), (2, 1, 2, 40), (1, 1, 3, 22), (3, 1, 1, 35),
        (4, 2, 2, 11), (2, 2, 3, 28), (1, 3, 1, 17), (3, 3, 3, 13), (4, 1, 1, 38),
    ]
]


def _reflect(u, x):
    return x - u * (u @ x)


def _structure(jacobian):
    """Boolean pattern of J^T, explicit zeros of the block pattern included."""
    csr = jacobian.csr
    rows = np.repeat(np.arange(csr.shape[0]), np.diff(csr.indptr))
    structure = np.zeros(csr.shape[::-1], dtype=bool)
    structure[csr.indices, rows] = True
    return structure


def _reflector_rows(structure):
    """Rows each reflector touches, by symbolic elimination on the pattern of J^T."""
    structure = structure.copy()
    supports = []
    for k in range(structure.shape[1]):
        rows = np.flatnonzero(structure[k:, k]) + k
        supports.append(rows)
        pattern = np.union1d(rows, [k])
        touched = np.flatnonzero(structure[np.ix_(pattern, np.arange(k + 1, structure.shape[1]))].any(axis=0)) + k + 1
        structure[np.ix_(pattern, touched)] = True
        structure[k, k:] = False
    return supports


class TestHousegen:

    def setup_method(self):
        self.ledger = FlopLedger()

    def test_three_four(self):
        u, nu = housegen(np.array([3.0, 4.0]), ledger=self.ledger)
        assert nu == pytest.approx(-5.0)
        np.testing.assert_allclose(u, [1.6 / math.sqrt(1.6), 0.8 / math.sqrt(1.6)], rtol=1e-12)
        np.testing.assert_allclose(_reflect(u, np.array([3.0, 4.0])), [-5.0, 0.0], atol=1e-12)
        assert self.ledger.housegen_flops == 6
        print("✓ Householder reflector maps (3, 4) onto -5 e_1")

    def test_zero_vector(self):
        u, nu = housegen(np.zeros(3), ledger=self.ledger)
        assert nu == 0.0
        np.testing.assert_array_equal(u, [math.sqrt(2.0), 0.0, 0.0])
        assert self.ledger.housegen_flops == 0

    def test_negative_leading_entry(self):
        x = np.array([-2.0, 0.0, 0.0])
        u, nu = housegen(x, ledger=self.ledger)
        assert nu == pytest.approx(2.0)
        np.testing.assert_allclose(u, [-math.sqrt(2.0), 0.0, 0.0])
        np.testing.assert_allclose(_reflect(u, x), [2.0, 0.0, 0.0], atol=1e-12)
        assert self.ledger.housegen_flops == 3

    def test_pivot_and_sparsity(self):
        x = np.array([0.0, 1.0, 0.0, -2.0])
        u, nu = housegen(x, pivot=1)
        assert np.linalg.norm(u) == pytest.approx(math.sqrt(2.0))
        assert u[0] == 0.0 and u[2] == 0.0
        expected = np.zeros(4)
        expected[1] = nu
        np.testing.assert_allclose(_reflect(u, x), expected, atol=1e-12)

    def test_empty_vector_rejected(self):
        with pytest.raises(DimensionError):
            housegen(np.empty(0))


class TestQlessQr:

    def test_scalar(self):
        factor = qless_qr(np.array([[2.5]]))
        np.testing.assert_allclose(factor.to_dense(), [[2.5]])
        assert qless_qr(np.array([[-2.5]])).to_dense()[0, 0] == pytest.approx(2.5)

    @pytest.mark.parametrize("case", STRUCTURED_CASES)
    def test_normal_equations_identity(self, rng, case):
        jacobian = random_oe_jacobian(rng, *case)
        dense = jacobian.to_dense()
        upper = qless_qr(jacobian).to_dense()
        gram = dense @ dense.T
        assert np.linalg.norm(upper.T @ upper - gram) / np.linalg.norm(gram) < 1e-10
        assert np.all(np.diag(upper) > 0)
        assert np.allclose(upper, np.triu(upper))

    def test_untracked_run_gives_same_factor(self, oe_jacobian):
        jacobian = oe_jacobian(n_params=3, n_outputs=2, order=2, n_samples=15)
        tracked = qless_qr(jacobian)
        untracked = qless_qr(jacobian, track_flops=False)
        np.testing.assert_array_equal(tracked.values, untracked.values)
        assert untracked.flop_ledger.factorization_flops == 0
        assert untracked.column_counts is None

    def test_matches_lapack_up_to_row_signs(self, oe_jacobian):
        jacobian = oe_jacobian(n_params=2, n_outputs=1, order=1, n_samples=12)
        ours = qless_qr(jacobian).to_dense()
        lapack = dense_triangular_factor(jacobian)
        np.testing.assert_allclose(ours, np.sign(np.diag(lapack))[:, None] * lapack, rtol=1e-9, atol=1e-12)
        print("✓ Q-less factor matches LAPACK up to row signs")

    def test_duplicate_rows_break_down(self):
        dense = np.array([[1.0, 2.0, 3.0], [1.0, 2.0, 3.0]])
        with pytest.raises(RankBreakdownError) as info:
            qless_qr(dense)
        assert info.value.column == 1

    def test_more_rows_than_columns_rejected(self):
        with pytest.raises(DimensionError):
            qless_qr(np.ones((3, 2)))

    @pytest.mark.parametrize("case", STRUCTURED_CASES)
    def test_reflector_rows_are_contiguous_band_plus_fill(self, rng, case):
        n_params, p, phi, _ = case
        jacobian = random_oe_jacobian(rng, *case)
        structure = _structure(jacobian)
        factor = qless_qr(jacobian)

        supports = _reflector_rows(structure)
        for k, rows in enumerate(supports):
            bottom = n_params + p * (k // p + 1 + phi) - 1
            np.testing.assert_array_equal(rows, np.arange(k, bottom + 1))
            original = np.flatnonzero(structure[k:, k]) + k
            assert np.isin(original, rows).all()

        np.testing.assert_array_equal(factor.column_counts, [rows.size for rows in supports])
        np.testing.assert_array_equal(factor.pattern_counts,
                                      [np.count_nonzero(structure[k:, k]) for k in range(len(supports))])

    @pytest.mark.parametrize("case", [case for case in STRUCTURED_CASES if case[0] >= case[1] - 1])
    def test_fill_counts_match_closed_form(self, rng, case):
        factor = qless_qr(random_oe_jacobian(rng, *case))
        np.testing.assert_array_equal(factor.fill_counts, fill_column_counts(*case))

    def test_unexpected_fill_raises(self, oe_jacobian):
        expected = predicted_column_counts(2, 1, 1, 12)
        expected[5] -= 1
        with pytest.raises(FillPatternError) as info:
            qless_qr(oe_jacobian(2, 1, 1, 12), track_flops=False, expected_counts=expected)
        assert (info.value.column, info.value.expected, info.value.found) == (5, 3, 4)
        print("✓ Fill outside the predicted pattern is rejected")

    def test_predicted_pattern_accepted(self, oe_jacobian):
        jacobian = oe_jacobian(3, 2, 2, 15)
        factor = qless_qr(jacobian, track_flops=False, expected_counts=predicted_column_counts(3, 2, 2, 15))
        assert factor.column_counts is not None
        assert factor.flop_ledger.factorization_flops > 0
        with pytest.raises(DimensionError):
            qless_qr(jacobian, expected_counts=np.ones(3))

    def test_packed_rows_roundtrip(self, rng):
        upper = np.triu(rng.standard_normal((5, 5))) + 5 * np.eye(5)
        factor = TriangularFactor.from_dense(upper)
        np.testing.assert_array_equal(factor.to_dense(), upper)
        np.testing.assert_array_equal(factor.diagonal(), np.diag(upper))


class TestSolveStepSystem:

    def test_identity_factor(self, rng):
        rhs = rng.standard_normal(6)
        np.testing.assert_allclose(solve_step_system(TriangularFactor.from_dense(np.eye(6)), rhs), rhs)

    @pytest.mark.parametrize("case", STRUCTURED_CASES[:8])
    def test_against_dense_solves(self, rng, case):
        jacobian = random_oe_jacobian(rng, *case)
        dense = jacobian.to_dense()
        gram = dense @ dense.T
        rhs = rng.standard_normal(gram.shape[0])

        sigma = solve_step_system(qless_qr(jacobian), rhs)
        direct = np.linalg.solve(gram, rhs)
        cholesky = scipy.linalg.cho_solve(scipy.linalg.cho_factor(gram), rhs)
        fallback = dense_solve_step_system(dense_triangular_factor(jacobian), rhs)

        for oracle in (direct, cholesky, fallback):
            assert np.linalg.norm(sigma - oracle) / np.linalg.norm(oracle) < 1e-8

    def test_rhs_shape_checked(self):
        with pytest.raises(DimensionError):
            solve_step_system(TriangularFactor.from_dense(np.eye(3)), np.ones(4))
        print("✓ Step system rejects a wrong-size right-hand side")


def test_sparse_matvec_counts_stored_entries(rng):
    """Mat-vec cost equals the stored nonzeros of the OE Jacobian."""
    print("🔵 Testing sparse mat-vec ledger...")
    problem = assemble(LtiFirstOrder(), lti_dataset(n_samples=30))
    x = problem.initial_point(rng)
    jacobian = constraint_jacobian(problem, x)
    m = problem.n_constraints
    ledger = FlopLedger()

    v = rng.standard_normal(problem.n_vars)
    w = rng.standard_normal(m)
    np.testing.assert_allclose(sparse_matvec(jacobian, v, ledger), jacobian.to_dense() @ v, rtol=1e-13)
    np.testing.assert_allclose(sparse_matvec_t(jacobian, w, ledger), jacobian.to_dense().T @ w, rtol=1e-13)
    assert ledger.matvec_flops == 2 * m * (2 + 1 * (1 + 1))

    np.testing.assert_array_equal(sparse_matvec(jacobian, np.zeros(problem.n_vars)), np.zeros(m))
    with pytest.raises(DimensionError):
        sparse_matvec(jacobian, np.ones(problem.n_vars + 1))
    print("✓ Sparse mat-vec matches dense product and charges nnz")
