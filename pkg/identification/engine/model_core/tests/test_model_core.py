"""
Tests for datasets, CSV exchange, weighting, metrics and free-run simulation.
"""

import numpy as np
import pytest

from identification.engine.errors import (
    DataError,
    DegenerateReferenceError,
    DimensionError,
    DivergedSimulationError,
    InsufficientDataError,
)
from identification.engine.model_core import (
    Dataset,
    Weighting,
    bfr,
    input_windows,
    output_windows,
    read_dataset,
    rmse,
    simulate_free_run,
    simulate_state_space,
    write_dataset,
)
from identification.engine.models import LinearStateSpaceModel, LtiFirstOrder


class TestDataset:

    def test_vectors_become_single_channel(self):
        data = Dataset(np.arange(5.0), np.ones(5))
        assert data.inputs.shape == (5, 1)
        assert data.n_outputs == 1

    def test_arrays_are_read_only(self):
        data = Dataset(np.zeros((4, 2)), np.zeros((4, 1)))
        with pytest.raises(ValueError):
            data.outputs[0, 0] = 1.0

    def test_length_mismatch(self):
        with pytest.raises(DimensionError):
            Dataset(np.zeros(4), np.zeros(5))

    def test_nonpositive_sample_period(self):
        with pytest.raises(DimensionError):
            Dataset(np.zeros(4), np.zeros(4), sample_period=0.0)

    def test_split(self):
        data = Dataset(np.arange(10.0), np.arange(10.0) * 2)
        head, tail = data.split(7)
        assert head.n_samples == 7 and tail.n_samples == 3
        assert tail.outputs[0, 0] == 14.0
        with pytest.raises(DimensionError):
            data.split(10)

    def test_standardize(self, rng):
        data = Dataset(rng.normal(3.0, 2.0, (200, 2)), np.column_stack([rng.normal(-1.0, 0.5, 200), np.ones(200)]))
        scaled, scaling = data.standardize()
        np.testing.assert_allclose(scaled.inputs.mean(axis=0), 0.0, atol=1e-12)
        np.testing.assert_allclose(scaled.inputs.std(axis=0), 1.0)
        assert scaling.output_scale[1] == 1.0
        np.testing.assert_allclose(scaling.invert_outputs(scaled.outputs), data.outputs)
        assert scaled.metadata["standardized"] == "true"
        print("✓ Standardized channels have zero mean and unit spread")


class TestCsv:

    def test_round_trip_keeps_header_and_six_digits(self, tmp_path, rng):
        data = Dataset(rng.standard_normal((20, 2)), rng.standard_normal((20, 1)), 0.01,
                       {"generator": "lti", "seed": "3"})
        path = write_dataset(data, tmp_path / "data.csv")
        text = path.read_text()
        assert text.startswith("# sample_period=0.01\n# generator=lti\n# seed=3\nt,u1,u2,y1\n")

        loaded = read_dataset(path)
        assert loaded.sample_period == 0.01
        assert loaded.metadata == {"generator": "lti", "seed": "3"}
        np.testing.assert_allclose(loaded.inputs, data.inputs, rtol=1e-5, atol=1e-6)
        np.testing.assert_allclose(loaded.outputs, data.outputs, rtol=1e-5, atol=1e-6)
        print("✓ CSV round trip keeps header and six digits")

    def test_missing_file(self, tmp_path):
        with pytest.raises(DataError):
            read_dataset(tmp_path / "absent.csv")

    def test_missing_columns(self, tmp_path):
        path = tmp_path / "bad.csv"
        path.write_text("t,u1\n0,1\n1,2\n")
        with pytest.raises(DataError):
            read_dataset(path)

    def test_non_finite_values(self, tmp_path):
        path = tmp_path / "nan.csv"
        path.write_text("t,u1,y1\n0,1,\n1,2,3\n")
        with pytest.raises(DataError):
            read_dataset(path)

    def test_sample_period_from_time_column(self, tmp_path):
        path = tmp_path / "plain.csv"
        path.write_text("t,u1,y1\n0,1,2\n0.5,2,3\n1.0,3,4\n")
        assert read_dataset(path).sample_period == 0.5


class TestWeighting:

    def test_identity(self):
        weighting = Weighting.identity(2, 3, ridge_coeff=0.1, input_scale=5.0)
        np.testing.assert_array_equal(weighting.input_weight, 5.0 * np.eye(3))
        assert weighting.ridge(np.array([1.0, 2.0])) == pytest.approx(0.5)

    def test_rejects_asymmetric(self):
        with pytest.raises(ValueError):
            Weighting(np.array([[1.0, 0.5], [0.0, 1.0]]))

    def test_rejects_indefinite(self):
        with pytest.raises(ValueError):
            Weighting(np.array([[1.0, 2.0], [2.0, 1.0]]))
        print("✓ Indefinite weighting rejected")

    def test_rejects_negative_ridge(self):
        with pytest.raises(ValueError):
            Weighting(np.eye(1), ridge_coeff=-1.0)


class TestMetrics:

    def test_perfect_fit(self, rng):
        y = rng.standard_normal((50, 2))
        np.testing.assert_array_equal(rmse(y, y), [0.0, 0.0])
        np.testing.assert_array_equal(bfr(y, y), [1.0, 1.0])

    def test_mean_predictor_scores_zero(self, rng):
        y = rng.standard_normal((50, 2))
        np.testing.assert_allclose(bfr(np.broadcast_to(y.mean(axis=0), y.shape), y), [0.0, 0.0], atol=1e-15)

    def test_rmse_value(self):
        np.testing.assert_allclose(rmse([1.0, 2.0, 3.0], [1.0, 2.0, 5.0]), [np.sqrt(4.0 / 3.0)])

    def test_constant_reference(self):
        ref = np.column_stack([np.arange(5.0), np.ones(5)])
        with pytest.raises(DegenerateReferenceError) as exc_info:
            bfr(ref, ref)
        assert exc_info.value.channel == 1

    def test_constant_reference_with_rounding_noise(self):
        ref = np.array([0.1, 0.1, 0.1, 0.30000000000000004 - 0.2, 0.1])
        assert np.linalg.norm(ref - ref.mean()) > 0
        with pytest.raises(DegenerateReferenceError):
            bfr(ref + 1e-3, ref)

    def test_small_but_varying_reference(self):
        ref = 1e-9 * np.array([1.0, -1.0, 2.0, 0.5])
        assert np.isfinite(bfr(ref, ref)).all()
        print("✓ Rounding-level spread is degenerate, small signals are not")

    def test_shape_mismatch(self):
        with pytest.raises(DimensionError):
            rmse(np.zeros((5, 2)), np.zeros((5, 1)))


class TestSimulation:

    def test_window_ordering_is_newest_first(self):
        outputs = np.arange(12.0).reshape(6, 2)
        current, lagged = output_windows(outputs, 2)
        assert current.shape == (4, 2) and lagged.shape == (4, 2, 2)
        np.testing.assert_array_equal(current[0], outputs[2])
        np.testing.assert_array_equal(lagged[0, 0], outputs[1])
        np.testing.assert_array_equal(lagged[0, 1], outputs[0])

        windows = input_windows(np.arange(6.0)[:, None], 2)
        np.testing.assert_array_equal(windows[0, :, 0], [2.0, 1.0, 0.0])

    def test_lti_impulse_response(self):
        inputs = np.zeros(8)
        inputs[0] = 1.0
        y = simulate_free_run(LtiFirstOrder(), [0.5, 2.0], [[0.0]], inputs)
        np.testing.assert_allclose(y[:, 0], np.concatenate([[0.0], 2.0 * 0.5 ** np.arange(7)]))
        print("✓ Impulse response y_t = b a^(t-1)")

    def test_initial_conditions_copied(self):
        y = simulate_free_run(LtiFirstOrder(), [0.0, 0.0], [[3.5]], np.zeros(4))
        np.testing.assert_array_equal(y[:, 0], [3.5, 0.0, 0.0, 0.0])

    def test_divergence_reports_index(self):
        with pytest.raises(DivergedSimulationError) as exc_info:
            simulate_free_run(LtiFirstOrder(), [1e200, 0.0], [[1e200]], np.zeros(5))
        assert exc_info.value.index == 1

    def test_too_short(self):
        with pytest.raises(InsufficientDataError):
            simulate_free_run(LtiFirstOrder(), [0.5, 1.0], [[0.0]], np.zeros(1))

    def test_bad_initial_conditions(self):
        with pytest.raises(DimensionError):
            simulate_free_run(LtiFirstOrder(), [0.5, 1.0], [[0.0, 1.0]], np.zeros(5))

    def test_bad_theta(self):
        with pytest.raises(DimensionError):
            simulate_free_run(LtiFirstOrder(), [0.5], [[0.0]], np.zeros(5))

    def test_state_space_rollout(self, rng):
        model = LinearStateSpaceModel(n_states=2, n_outputs=1, n_inputs=1)
        a, b, c, d = np.array([[0.5, 0.1], [0.0, 0.3]]), np.array([[1.0], [0.5]]), np.array([[1.0, -1.0]]), np.array([[0.2]])
        theta = np.concatenate([a.ravel(), b.ravel(), c.ravel(), d.ravel()])
        inputs = rng.standard_normal((10, 1))
        states, outputs = simulate_state_space(model, theta, [1.0, -1.0], inputs)

        expected = np.array([1.0, -1.0])
        for t in range(10):
            np.testing.assert_allclose(states[t], expected)
            np.testing.assert_allclose(outputs[t], c @ expected + d @ inputs[t])
            expected = a @ expected + b @ inputs[t]
