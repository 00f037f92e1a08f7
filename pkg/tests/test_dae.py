"""Denoising-autoencoder imputer: architecture, training, determinism."""

import numpy as np
import pytest

from wgain.exceptions import InputError, TrainingDivergedError
from wgain.imputers import DAEImputer
from wgain.imputers.dae import autoencoder_sizes


class TestArchitecture:
    def test_sizes_ramp_to_double_width_code(self):
        assert autoencoder_sizes(6) == [6, 8, 10, 12, 10, 8, 6]

    def test_sizes_round_up(self):
        assert autoencoder_sizes(5) == [5, 7, 9, 10, 9, 7, 5]

    def test_fitted_network_uses_elu_and_linear_output(self):
        X = np.random.default_rng(0).normal(size=(40, 4))
        imp = DAEImputer(epochs=3, random_state=0).fit(X)
        acts = [l.activation for l in imp.network_.layers]
        assert acts == ["elu"] * 5 + ["linear"]
        assert imp.network_.layers[2].out_dim == 8  # code twice the input width


class TestTraining:
    def test_reconstructs_constant_data_at_missing_positions(self):
        # trained on a constant dataset, the decoder must reproduce the
        # constant from zero-filled corruptions within 1e-2
        c = np.array([0.8, -0.6, 0.4])
        X = np.tile(c, (64, 1))
        imp = DAEImputer(
            epochs=200, learning_rate=0.03, standardize=False, random_state=0
        ).fit(X)
        q = np.zeros((5, 3))
        mask = np.zeros((5, 3))
        mask[:, 0] = 1.0
        out = imp.impute(np.tile(c, (5, 1)), mask)
        np.testing.assert_allclose(out[:, 1:], np.tile(c[1:], (5, 1)), atol=1e-2)

    def test_loss_decreases_on_learnable_data(self):
        rng = np.random.default_rng(1)
        X = rng.normal(size=(200, 4))
        imp = DAEImputer(epochs=400, learning_rate=0.003, random_state=0).fit(X)
        head = imp.loss_trace_[:20].mean()
        tail = imp.loss_trace_[-20:].mean()
        assert tail < head

    def test_training_is_bitwise_deterministic(self):
        X = np.random.default_rng(2).normal(size=(60, 4))
        a = DAEImputer(epochs=50, random_state=3).fit(X)
        b = DAEImputer(epochs=50, random_state=3).fit(X)
        for la, lb in zip(a.network_.layers, b.network_.layers):
            np.testing.assert_array_equal(la.weights, lb.weights)
            np.testing.assert_array_equal(la.bias, lb.bias)

    @pytest.mark.filterwarnings("ignore:overflow:RuntimeWarning", "ignore:invalid value:RuntimeWarning")
    def test_divergence_raises(self):
        X = np.random.default_rng(3).normal(size=(40, 3))
        with pytest.raises(TrainingDivergedError):
            DAEImputer(epochs=50, learning_rate=1e160, random_state=0).fit(X)

    def test_rejects_bad_rate(self):
        with pytest.raises(InputError):
            DAEImputer(max_missing_rate=1.0).fit(np.ones((4, 2)))


class TestImpute:
    @pytest.fixture(scope="class")
    def fitted(self):
        X = np.random.default_rng(4).normal(loc=1.5, scale=0.7, size=(150, 5))
        return X, DAEImputer(epochs=100, random_state=0).fit(X)

    def test_impute_is_deterministic(self, fitted):
        X, imp = fitted
        q = X[:8]
        m = np.ones_like(q)
        m[:, 2] = 0.0
        np.testing.assert_array_equal(imp.impute(q, m), imp.impute(q, m))
        np.testing.assert_array_equal(imp.impute(q, m, seed=1), imp.impute(q, m, seed=2))

    def test_observed_preserved(self, fitted):
        X, imp = fitted
        rng = np.random.default_rng(5)
        q = rng.normal(size=(7, 5))
        m = (rng.random(q.shape) < 0.5).astype(float)
        out = imp.impute(q, m)
        np.testing.assert_array_equal(out[m == 1.0], q[m == 1.0])

    def test_all_observed_identity(self, fitted):
        X, imp = fitted
        q = X[:4]
        np.testing.assert_array_equal(imp.impute(q, np.ones_like(q)), q)

    def test_transform_fills_nan(self, fitted):
        X, imp = fitted
        q = X[:4].copy()
        q[:, 0] = np.nan
        out = imp.transform(q)
        assert np.isfinite(out).all()
        np.testing.assert_array_equal(out[:, 1:], q[:, 1:])
