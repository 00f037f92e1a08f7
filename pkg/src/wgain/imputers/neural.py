"""Shared scaffolding for the trained-network imputers.

Each neural imputer standardizes its training data internally (so fit and
transform speak original feature units), draws all randomness from one
seeded generator in a fixed order, and aborts with TrainingDivergedError
if a loss stops being finite.
"""

from __future__ import annotations

import math

import numpy as np

from ..data import Scaler
from ..exceptions import InputError, TrainingDivergedError
from ..validation import as_generator, check_matrix
from .base import BaseImputer

EPOCH_MODES = ("iteration", "pass")


class NeuralImputer(BaseImputer):
    def _prepare_fit(self, X):
        X = check_matrix(X)
        if X.shape[0] < 2:
            raise InputError("training data needs at least 2 rows")
        if self.epochs < 1:
            raise InputError("epochs must be at least 1")
        if self.batch_size < 1:
            raise InputError("batch_size must be at least 1")
        if self.epoch_mode not in EPOCH_MODES:
            raise InputError(f"epoch_mode must be one of {EPOCH_MODES}")
        rng = as_generator(self.random_state)
        self.transform_seed_ = int(rng.integers(2**63))
        if self.standardize:
            self.scaler_ = Scaler().fit(X)
            xs = self.scaler_.transform(X)
        else:
            self.scaler_ = None
            xs = X.copy()
        self.n_features_in_ = X.shape[1]
        return xs, rng

    def _to_model_space(self, x):
        return self.scaler_.transform(x) if self.scaler_ is not None else np.asarray(x, float)

    def _from_model_space(self, x):
        return self.scaler_.inverse_transform(x) if self.scaler_ is not None else np.asarray(x, float)

    def _batch_indices(self, n_rows: int, rng):
        """Yield one index array per update.

        "iteration" mode treats each epoch as a single uniformly sampled
        mini-batch; "pass" mode shuffles and walks the whole dataset once
        per epoch.
        """
        m = self.batch_size
        if self.epoch_mode == "iteration":
            for _ in range(self.epochs):
                yield rng.integers(0, n_rows, size=min(m, n_rows))
        else:
            for _ in range(self.epochs):
                perm = rng.permutation(n_rows)
                for start in range(0, n_rows, m):
                    yield perm[start : start + m]

    @staticmethod
    def _check_finite(loss: float, iteration: int) -> float:
        if not math.isfinite(loss):
            raise TrainingDivergedError("training loss became non-finite", iteration)
        return loss
