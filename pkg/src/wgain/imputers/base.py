"""Shared imputer contract.

Every imputer fits on complete data and fills missing entries of queries.
Two entry points exist: the sklearn-style ``transform`` where NaN marks a
missing cell, and ``impute`` with an explicit observed/missing mask plus an
optional seed for stochastic fills. Observed entries always pass through
bit-exactly.
"""

from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_is_fitted

from ..masking import mask_from_nan
from ..validation import check_mask, check_matrix


class BaseImputer(BaseEstimator, TransformerMixin):
    def fit(self, X, y=None):
        raise NotImplementedError

    def _proposal(self, x_filled: np.ndarray, mask: np.ndarray, seed) -> np.ndarray:
        """Full-matrix fill proposal; only its missing entries are used.

        ``x_filled`` carries the observed values with zeros at missing
        positions.
        """
        raise NotImplementedError

    def impute(self, x_obs, mask, seed=None) -> np.ndarray:
        """Fill entries where ``mask`` is 0; values there may be arbitrary or NaN."""
        check_is_fitted(self)
        x = check_matrix(x_obs, "x_obs", allow_nan=True)
        m = check_mask(mask, x.shape)
        if np.isnan(x[m == 1.0]).any():
            raise ValueError("x_obs has NaN at an observed position")
        filled = np.where(m == 1.0, x, 0.0)
        proposal = check_matrix(self._proposal(filled, m, seed), "imputer proposal")
        return np.where(m == 1.0, x, proposal)

    def transform(self, X) -> np.ndarray:
        """Impute NaN-marked entries; repeated calls give identical output."""
        X = check_matrix(X, "X", allow_nan=True)
        return self.impute(X, mask_from_nan(X), seed=self._transform_seed())

    def _transform_seed(self):
        """Seed used by transform(); fixed per fitted model."""
        return getattr(self, "transform_seed_", None)
