"""Non-neural imputers: column mean, inverse-distance k-NN, and chained
ridge regression (MICE-style)."""

from __future__ import annotations

import math
import warnings

import numpy as np

from ..exceptions import InputError
from ..masking import MaskScheme, sample_mask
from ..stats.metrics import rmse_missing
from ..validation import as_generator, check_matrix
from .base import BaseImputer

KNN_CANDIDATE_KS = (11, 13, 15, 17, 19, 21, 23, 25)


def mean_impute(x_obs, mask, column_means) -> np.ndarray:
    """Fill missing entries with the given training column means."""
    imp = MeanImputer()
    imp.column_means_ = np.asarray(column_means, dtype=np.float64)
    imp.n_features_in_ = imp.column_means_.shape[0]
    return imp.impute(x_obs, mask)


class MeanImputer(BaseImputer):
    """Column-mean fill; the baseline every other imputer is measured against."""

    def fit(self, X, y=None):
        X = check_matrix(X)
        self.column_means_ = X.mean(axis=0)
        self.n_features_in_ = X.shape[1]
        return self

    def _proposal(self, x_filled, mask, seed):
        return np.broadcast_to(self.column_means_, x_filled.shape)


class KNNImputer(BaseImputer):
    """Inverse-distance weighted k-NN over a query's observed coordinates.

    Distances use only the query's observed features, scaled by
    sqrt(d / n_observed) so rows with different missing patterns remain
    comparable. All of a row's missing features are imputed from the same
    neighbor set. Exact matches (distance 0) are averaged unweighted.
    """

    def __init__(self, n_neighbors: int = 15):
        self.n_neighbors = n_neighbors

    def fit(self, X, y=None):
        X = check_matrix(X)
        if not 1 <= self.n_neighbors <= X.shape[0]:
            raise InputError(
                f"n_neighbors must lie in [1, {X.shape[0]}], got {self.n_neighbors}"
            )
        self.reference_ = X.copy()
        self.n_features_in_ = X.shape[1]
        return self

    def _row_distances(self, row: np.ndarray, obs: np.ndarray) -> np.ndarray:
        diff = self.reference_[:, obs] - row[obs]
        d_total = self.reference_.shape[1]
        scale = math.sqrt(d_total / int(obs.sum()))
        return np.sqrt(np.sum(diff**2, axis=1)) * scale

    def _proposal(self, x_filled, mask, seed):
        out = x_filled.copy()
        for i in range(x_filled.shape[0]):
            obs = mask[i] == 1.0
            if not obs.any():
                raise InputError(f"row {i} has no observed features")
            missing = ~obs
            if not missing.any():
                continue
            dist = self._row_distances(x_filled[i], obs)
            order = np.argsort(dist, kind="stable")[: self.n_neighbors]
            neighbor_vals = self.reference_[order][:, missing]
            d_sel = dist[order]
            exact = d_sel == 0.0
            if exact.any():
                out[i, missing] = neighbor_vals[exact].mean(axis=0)
            else:
                w = 1.0 / d_sel
                out[i, missing] = (w @ neighbor_vals) / w.sum()
        return out

    def select_k(self, validation_x, scheme: MaskScheme, seed, candidates=None) -> int:
        """Pick the candidate k with the lowest imputation RMSE on masked
        validation data; ties go to the smallest k."""
        from sklearn.utils.validation import check_is_fitted

        check_is_fitted(self)
        candidates = sorted(candidates if candidates is not None else KNN_CANDIDATE_KS)
        if not candidates:
            raise InputError("candidate list must not be empty")
        x = check_matrix(validation_x, "validation_x")
        mask = sample_mask(scheme, x.shape[0], x.shape[1], seed)
        if (mask == 1.0).all():
            raise InputError("mask scheme produced no missing entries to validate on")
        best_k = None
        best_rmse = math.inf
        for k in candidates:
            trial = KNNImputer(n_neighbors=k)
            trial.reference_ = self.reference_
            trial.n_features_in_ = self.n_features_in_
            err = rmse_missing(x, trial.impute(x, mask), mask)
            if err < best_rmse:
                best_rmse = err
                best_k = k
        return best_k


class MICEImputer(BaseImputer):
    """Chained per-column ridge regressions with mean-pooled chains.

    Each feature gets a ridge model (fit once, on complete training data)
    predicting it from all other features. Imputation starts from column
    means and sweeps the chained predictions; multiple chains differ only
    through optional Gaussian residual noise and are pooled by the mean.
    """

    def __init__(
        self,
        ridge: float = 1e-3,
        sweeps: int = 10,
        n_imputations: int = 5,
        residual_noise: bool = True,
        random_state=None,
    ):
        self.ridge = ridge
        self.sweeps = sweeps
        self.n_imputations = n_imputations
        self.residual_noise = residual_noise
        self.random_state = random_state

    def fit(self, X, y=None):
        X = check_matrix(X)
        n, d = X.shape
        if n < 2:
            raise InputError("MICE needs at least 2 training rows")
        self.column_means_ = X.mean(axis=0)
        coefs = np.zeros((d, d))  # row j: coefficients over all columns, j-th is 0
        intercepts = np.zeros(d)
        resid_std = np.zeros(d)
        degenerate = np.zeros(d, dtype=bool)
        for j in range(d):
            y_col = X[:, j]
            if y_col.std() == 0.0:
                degenerate[j] = True
                warnings.warn(
                    f"column {j} is constant; MICE falls back to its mean", stacklevel=2
                )
                intercepts[j] = self.column_means_[j]
                continue
            others = np.delete(np.arange(d), j)
            a = X[:, others]
            a_mean = a.mean(axis=0)
            y_mean = y_col.mean()
            ac = a - a_mean
            yc = y_col - y_mean
            gram = ac.T @ ac + self.ridge * np.eye(d - 1)
            beta = np.linalg.solve(gram, ac.T @ yc)
            coefs[j, others] = beta
            intercepts[j] = y_mean - float(a_mean @ beta)
            resid = y_col - (a @ beta + intercepts[j])
            resid_std[j] = math.sqrt(float(np.mean(resid**2)))
        self.coefs_ = coefs
        self.intercepts_ = intercepts
        self.resid_std_ = resid_std
        self.degenerate_ = degenerate
        self.n_features_in_ = d
        # fixed seed so repeated transform() calls agree even with noise on
        self.transform_seed_ = int(as_generator(self.random_state).integers(2**63))
        return self

    def _run_chain(self, x0, mask, rng) -> np.ndarray:
        x = x0.copy()
        missing_cols = np.flatnonzero((mask == 0.0).any(axis=0))
        for _ in range(self.sweeps):
            for j in missing_cols:
                rows = mask[:, j] == 0.0
                if self.degenerate_[j]:
                    pred = np.full(int(rows.sum()), self.intercepts_[j])
                else:
                    pred = x[rows] @ self.coefs_[j] + self.intercepts_[j]
                if rng is not None and self.resid_std_[j] > 0.0:
                    pred = pred + rng.normal(0.0, self.resid_std_[j], size=pred.shape)
                x[rows, j] = pred
        return x

    def _proposal(self, x_filled, mask, seed):
        x0 = np.where(mask == 1.0, x_filled, self.column_means_)
        if not (mask == 0.0).any():
            return x0
        if self.n_imputations < 1:
            raise InputError("n_imputations must be at least 1")
        rng = as_generator(seed if seed is not None else self.transform_seed_)
        pooled = np.zeros_like(x0)
        for _ in range(self.n_imputations):
            chain_rng = rng if self.residual_noise else None
            pooled += self._run_chain(x0, mask, chain_rng)
        return pooled / self.n_imputations
