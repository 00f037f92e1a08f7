"""Dataset ingestion, splitting, scaling, and synthetic generators."""

from __future__ import annotations

import csv
import math
import warnings
from dataclasses import dataclass, field

import numpy as np

from .exceptions import InputError
from .validation import as_generator, check_labels, check_matrix


@dataclass
class Dataset:
    """Numeric features plus integer class labels, fully observed."""

    name: str
    features: np.ndarray  # (n, d) float64
    labels: np.ndarray  # (n,) int64
    feature_names: list = field(default_factory=list)

    def __post_init__(self):
        self.features = check_matrix(self.features, f"{self.name} features")
        self.labels = check_labels(self.labels, self.features.shape[0], f"{self.name} labels")
        if not self.feature_names:
            self.feature_names = [f"f{i}" for i in range(self.features.shape[1])]
        if len(self.feature_names) != self.features.shape[1]:
            raise InputError("one feature name per column is required")

    @property
    def n_rows(self) -> int:
        return self.features.shape[0]

    @property
    def n_features(self) -> int:
        return self.features.shape[1]

    def subset(self, idx) -> "Dataset":
        return Dataset(
            name=self.name,
            features=self.features[idx],
            labels=self.labels[idx],
            feature_names=list(self.feature_names),
        )


def _parse_cell(cell: str, line_no: int, col_name: str):
    text = cell.strip()
    if text == "":
        raise InputError(f"empty cell at line {line_no}, column {col_name!r}")
    try:
        return float(text)
    except ValueError:
        raise InputError(
            f"non-numeric value {text!r} at line {line_no}, column {col_name!r}"
        ) from None


def load_csv(path, label_column, name: str | None = None) -> Dataset:
    """Load a header-ed CSV of numeric cells into a Dataset.

    ``label_column`` selects the label column by name or 0-based index.
    Any empty or non-numeric cell is rejected with its coordinates.
    """
    with open(path, newline="", encoding="utf-8") as fh:
        rows = list(csv.reader(fh))
    rows = [row for row in rows if row and any(cell.strip() for cell in row)]
    if len(rows) < 2:
        raise InputError(f"{path}: need a header row and at least one data row")
    header = [cell.strip() for cell in rows[0]]
    if isinstance(label_column, int):
        if not 0 <= label_column < len(header):
            raise InputError(f"{path}: label column index {label_column} out of range")
        label_idx = label_column
    else:
        if label_column not in header:
            raise InputError(f"{path}: label column {label_column!r} not in header {header}")
        label_idx = header.index(label_column)
    feature_names = [h for i, h in enumerate(header) if i != label_idx]

    features = []
    labels = []
    for line_no, row in enumerate(rows[1:], start=2):
        if len(row) != len(header):
            raise InputError(f"{path}: line {line_no} has {len(row)} cells, expected {len(header)}")
        feats = []
        for i, cell in enumerate(row):
            value = _parse_cell(cell, line_no, header[i])
            if i == label_idx:
                if value != round(value):
                    raise InputError(
                        f"{path}: label {value} at line {line_no} is not an integer"
                    )
                labels.append(int(round(value)))
            else:
                feats.append(value)
        features.append(feats)
    return Dataset(
        name=name or str(path),
        features=np.asarray(features, dtype=np.float64),
        labels=np.asarray(labels, dtype=np.int64),
        feature_names=feature_names,
    )


def save_csv(ds: Dataset, path, label_column: str = "label") -> None:
    """Write a Dataset back to CSV; floats use shortest round-trip form."""
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow([*ds.feature_names, label_column])
        for row, label in zip(ds.features, ds.labels):
            writer.writerow([*[repr(float(v)) for v in row], int(label)])


def read_feature_csv(path, allow_missing: bool = False):
    """Read a label-free feature CSV; empty cells become NaN when allowed.

    Returns ``(feature_names, values)``.
    """
    with open(path, newline="", encoding="utf-8") as fh:
        rows = list(csv.reader(fh))
    rows = [row for row in rows if row]
    if len(rows) < 2:
        raise InputError(f"{path}: need a header row and at least one data row")
    header = [cell.strip() for cell in rows[0]]
    values = []
    for line_no, row in enumerate(rows[1:], start=2):
        if len(row) != len(header):
            raise InputError(f"{path}: line {line_no} has {len(row)} cells, expected {len(header)}")
        parsed = []
        for i, cell in enumerate(row):
            text = cell.strip()
            if text == "" and allow_missing:
                parsed.append(np.nan)
            else:
                parsed.append(_parse_cell(cell, line_no, header[i]))
        values.append(parsed)
    return header, np.asarray(values, dtype=np.float64)


def write_feature_csv(path, feature_names, values) -> None:
    values = np.asarray(values, dtype=np.float64)
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(list(feature_names))
        for row in values:
            writer.writerow(["" if np.isnan(v) else repr(float(v)) for v in row])


def split_70_30(ds: Dataset, seed, stratify: bool = True):
    """Shuffle-split into floor(0.7 n) training rows and the rest.

    Stratified by label when every class has at least 2 members; otherwise
    falls back to a plain shuffle with a warning.
    """
    n = ds.n_rows
    n_train = int(math.floor(0.7 * n))
    if n_train < 1 or n_train >= n:
        raise InputError(f"dataset {ds.name!r} is too small to split 70/30")
    rng = as_generator(seed)

    if stratify:
        classes, counts = np.unique(ds.labels, return_counts=True)
        if counts.min() < 2:
            warnings.warn(
                f"dataset {ds.name!r} has a class with fewer than 2 members; "
                "splitting without stratification",
                stacklevel=2,
            )
            stratify = False

    if not stratify:
        perm = rng.permutation(n)
        return ds.subset(perm[:n_train]), ds.subset(perm[n_train:])

    # Per-class targets: floor of the proportional share, then hand out the
    # remaining slots by largest fractional part (ties by class order).
    shares = counts * (n_train / n)
    base = np.floor(shares).astype(int)
    remainder = n_train - int(base.sum())
    frac_order = np.argsort(-(shares - base), kind="stable")
    take = base.copy()
    take[frac_order[:remainder]] += 1

    train_idx = []
    test_idx = []
    for cls, t in zip(classes, take):
        members = np.flatnonzero(ds.labels == cls)
        members = members[rng.permutation(len(members))]
        train_idx.append(members[:t])
        test_idx.append(members[t:])
    train_idx = np.sort(np.concatenate(train_idx))
    test_idx = np.sort(np.concatenate(test_idx))
    return ds.subset(train_idx), ds.subset(test_idx)


class Scaler:
    """Per-column standardization fit on training data.

    Zero-variance columns keep std 1 (with a warning) so the transform
    stays invertible.
    """

    def __init__(self):
        self.mean_ = None
        self.std_ = None

    def fit(self, x) -> "Scaler":
        x = check_matrix(x, "scaler input")
        self.mean_ = x.mean(axis=0)
        std = x.std(axis=0)
        degenerate = std == 0.0
        if degenerate.any():
            cols = np.flatnonzero(degenerate).tolist()
            warnings.warn(f"constant column(s) {cols}: std forced to 1", stacklevel=2)
            std = np.where(degenerate, 1.0, std)
        self.std_ = std
        return self

    def _require_fit(self):
        if self.mean_ is None:
            raise InputError("scaler is not fitted")

    def transform(self, x) -> np.ndarray:
        self._require_fit()
        x = np.asarray(x, dtype=np.float64)
        return (x - self.mean_) / self.std_

    def inverse_transform(self, x) -> np.ndarray:
        self._require_fit()
        x = np.asarray(x, dtype=np.float64)
        return x * self.std_ + self.mean_


def gen_twonorm(n: int = 7400, d: int = 20, seed=None, name: str = "twonorm") -> Dataset:
    """Two unit-covariance Gaussians with means +/- a*1, a = 2/sqrt(d)."""
    if n % 2 != 0:
        raise InputError("n must be even for balanced classes")
    if d < 1:
        raise InputError("d must be at least 1")
    rng = as_generator(seed)
    a = 2.0 / math.sqrt(d)
    half = n // 2
    x0 = rng.normal(a, 1.0, size=(half, d))
    x1 = rng.normal(-a, 1.0, size=(half, d))
    features = np.vstack([x0, x1])
    labels = np.concatenate([np.zeros(half, dtype=np.int64), np.ones(half, dtype=np.int64)])
    perm = rng.permutation(n)
    return Dataset(name=name, features=features[perm], labels=labels[perm])


def gen_ringnorm(n: int = 7400, d: int = 20, seed=None, name: str = "ringnorm") -> Dataset:
    """Class 0 ~ N(0, 4I); class 1 ~ N(a*1, I), a = 2/sqrt(d)."""
    if n % 2 != 0:
        raise InputError("n must be even for balanced classes")
    if d < 1:
        raise InputError("d must be at least 1")
    rng = as_generator(seed)
    a = 2.0 / math.sqrt(d)
    half = n // 2
    x0 = rng.normal(0.0, 2.0, size=(half, d))
    x1 = rng.normal(a, 1.0, size=(half, d))
    features = np.vstack([x0, x1])
    labels = np.concatenate([np.zeros(half, dtype=np.int64), np.ones(half, dtype=np.int64)])
    perm = rng.permutation(n)
    return Dataset(name=name, features=features[perm], labels=labels[perm])


SYNTHETIC_GENERATORS = {
    "twonorm": gen_twonorm,
    "ringnorm": gen_ringnorm,
}
