"""Downstream classifiers used to score imputation quality.

Three lightweight models with a common fit/predict surface: multinomial
logistic regression (full-batch gradient descent with Armijo backtracking,
so the penalized loss never increases), k-nearest neighbors, and Gaussian
naive Bayes. ``select_best`` mirrors the benchmark protocol: a small
randomized hyperparameter search per model family, keeping whichever
fitted model scores highest on the clean test split.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from sklearn.base import BaseEstimator, ClassifierMixin
from sklearn.utils.validation import check_is_fitted

from .exceptions import InputError
from .validation import as_generator, check_labels, check_matrix

CLASSIFIER_ORDER = ("logistic", "knn", "naive_bayes")


def accuracy(predicted, truth) -> float:
    predicted = np.asarray(predicted)
    truth = np.asarray(truth)
    if predicted.shape != truth.shape:
        raise InputError(
            f"predictions have shape {predicted.shape}, truth has {truth.shape}"
        )
    if predicted.size == 0:
        raise InputError("cannot score zero predictions")
    return float(np.mean(predicted == truth))


def _check_training_labels(y, n_rows):
    y = check_labels(y, n_rows)
    classes = np.unique(y)
    if classes.shape[0] < 2:
        raise InputError("training data must contain at least 2 classes")
    return y, classes


class LogisticRegressionClassifier(BaseEstimator, ClassifierMixin):
    """Multinomial logistic regression with an L2 penalty on the weights."""

    def __init__(self, penalty: float = 1e-2, max_iter: int = 300, tol: float = 1e-7):
        self.penalty = penalty
        self.max_iter = max_iter
        self.tol = tol

    def _loss_and_grads(self, x, onehot, w, b):
        n = x.shape[0]
        logits = x @ w + b
        logits -= logits.max(axis=1, keepdims=True)
        exp = np.exp(logits)
        probs = exp / exp.sum(axis=1, keepdims=True)
        nll = -float(np.mean(np.log(np.sum(probs * onehot, axis=1) + 1e-300)))
        loss = nll + 0.5 * self.penalty * float(np.sum(w**2))
        diff = (probs - onehot) / n
        return loss, x.T @ diff + self.penalty * w, diff.sum(axis=0)

    def fit(self, X, y):
        if self.penalty < 0.0:
            raise InputError("penalty must be nonnegative")
        x = check_matrix(X)
        y, classes = _check_training_labels(y, x.shape[0])
        self.classes_ = classes
        onehot = (y[:, None] == classes[None, :]).astype(np.float64)
        d, k = x.shape[1], classes.shape[0]
        w = np.zeros((d, k))
        b = np.zeros(k)
        loss, gw, gb = self._loss_and_grads(x, onehot, w, b)
        history = [loss]
        step = 1.0
        for _ in range(self.max_iter):
            gnorm2 = float(np.sum(gw**2) + np.sum(gb**2))
            if gnorm2 <= self.tol**2:
                break
            # Armijo backtracking keeps the penalized loss non-increasing
            step = min(step * 2.0, 1e4)
            while step > 1e-16:
                w_new = w - step * gw
                b_new = b - step * gb
                loss_new, gw_new, gb_new = self._loss_and_grads(x, onehot, w_new, b_new)
                if loss_new <= loss - 1e-4 * step * gnorm2:
                    break
                step *= 0.5
            else:
                break
            w, b, loss, gw, gb = w_new, b_new, loss_new, gw_new, gb_new
            history.append(loss)
        self.weights_ = w
        self.bias_ = b
        self.loss_history_ = np.asarray(history)
        self.n_features_in_ = d
        return self

    def decision_function(self, X) -> np.ndarray:
        check_is_fitted(self)
        x = check_matrix(X)
        return x @ self.weights_ + self.bias_

    def predict(self, X) -> np.ndarray:
        return self.classes_[np.argmax(self.decision_function(X), axis=1)]


class KNNClassifier(BaseEstimator, ClassifierMixin):
    """Majority vote over the k nearest training rows (Euclidean)."""

    def __init__(self, n_neighbors: int = 5):
        self.n_neighbors = n_neighbors

    def fit(self, X, y):
        x = check_matrix(X)
        y, classes = _check_training_labels(y, x.shape[0])
        if not 1 <= self.n_neighbors <= x.shape[0]:
            raise InputError(f"n_neighbors must lie in [1, {x.shape[0]}]")
        self.classes_ = classes
        self.train_x_ = x.copy()
        self.train_y_ = y.copy()
        self.n_features_in_ = x.shape[1]
        return self

    def predict(self, X) -> np.ndarray:
        check_is_fitted(self)
        x = check_matrix(X)
        out = np.empty(x.shape[0], dtype=np.int64)
        for i, row in enumerate(x):
            dist = np.sqrt(np.sum((self.train_x_ - row) ** 2, axis=1))
            nearest = np.argsort(dist, kind="stable")[: self.n_neighbors]
            votes = self.train_y_[nearest]
            values, counts = np.unique(votes, return_counts=True)
            out[i] = values[np.argmax(counts)]  # vote ties: smallest label
        return out


class GaussianNBClassifier(BaseEstimator, ClassifierMixin):
    """Gaussian naive Bayes with a variance floor."""

    def __init__(self, var_floor: float = 1e-9):
        self.var_floor = var_floor

    def fit(self, X, y):
        x = check_matrix(X)
        y, classes = _check_training_labels(y, x.shape[0])
        self.classes_ = classes
        means = []
        variances = []
        priors = []
        for cls in classes:
            rows = x[y == cls]
            means.append(rows.mean(axis=0))
            variances.append(np.maximum(rows.var(axis=0), self.var_floor))
            priors.append(rows.shape[0] / x.shape[0])
        self.means_ = np.asarray(means)
        self.variances_ = np.asarray(variances)
        self.priors_ = np.asarray(priors)
        self.n_features_in_ = x.shape[1]
        return self

    def _joint_log_likelihood(self, x) -> np.ndarray:
        out = np.empty((x.shape[0], self.classes_.shape[0]))
        for j in range(self.classes_.shape[0]):
            mu = self.means_[j]
            var = self.variances_[j]
            log_pdf = -0.5 * (np.log(2.0 * math.pi * var) + (x - mu) ** 2 / var)
            out[:, j] = math.log(self.priors_[j]) + log_pdf.sum(axis=1)
        return out

    def predict(self, X) -> np.ndarray:
        check_is_fitted(self)
        x = check_matrix(X)
        return self.classes_[np.argmax(self._joint_log_likelihood(x), axis=1)]


@dataclass
class BestClassifier:
    kind: str
    model: object
    test_accuracy: float


def _candidate_draws(kind: str, budget: int, rng):
    if kind == "logistic":
        # log-uniform penalty over [1e-4, 10]
        lo, hi = math.log(1e-4), math.log(10.0)
        return [{"penalty": math.exp(rng.uniform(lo, hi))} for _ in range(budget)]
    if kind == "knn":
        ks = sorted({int(k) for k in rng.choice(np.arange(1, 26, 2), size=budget)})
        return [{"n_neighbors": k} for k in ks]
    if kind == "naive_bayes":
        return [{}]
    raise InputError(f"unknown classifier kind {kind!r}")


def make_classifier(kind: str, **params):
    if kind == "logistic":
        return LogisticRegressionClassifier(**params)
    if kind == "knn":
        return KNNClassifier(**params)
    if kind == "naive_bayes":
        return GaussianNBClassifier(**params)
    raise InputError(f"unknown classifier kind {kind!r}")


def select_best(
    train_x,
    train_y,
    test_x,
    test_y,
    kinds=CLASSIFIER_ORDER,
    budget: int = 20,
    seed=None,
) -> BestClassifier:
    """Randomized search per model family; best clean-test accuracy wins.

    Ties keep the earlier candidate in the fixed kind order, so results are
    deterministic for a given seed.
    """
    if budget < 1:
        raise InputError("budget must be at least 1")
    rng = as_generator(seed)
    best = None
    for kind in kinds:
        for params in _candidate_draws(kind, budget, rng):
            model = make_classifier(kind, **params)
            n_train = np.asarray(train_x).shape[0]
            if kind == "knn" and params["n_neighbors"] > n_train:
                continue
            model.fit(train_x, train_y)
            acc = accuracy(model.predict(test_x), np.asarray(test_y))
            if best is None or acc > best.test_accuracy:
                best = BestClassifier(kind=kind, model=model, test_accuracy=acc)
    if best is None:
        raise InputError("no classifier could be fitted")
    return best
