"""Input validation helpers shared by all estimators and functions.

Everything numeric is coerced to 2-D float64. A 1-D input is treated as a
single row, which matches how single records are written throughout the
package.
"""

from __future__ import annotations

import numpy as np

from .exceptions import InputError


def check_matrix(x, name: str = "X", *, allow_nan: bool = False) -> np.ndarray:
    """Coerce ``x`` to a 2-D float64 array and verify its entries are usable.

    Inf is always rejected; NaN is rejected unless ``allow_nan`` is set
    (NaN marks a missing entry in query data).
    """
    try:
        arr = np.asarray(x, dtype=np.float64)
    except (TypeError, ValueError) as exc:
        raise InputError(f"{name} is not numeric: {exc}") from None
    if arr.ndim == 1:
        arr = arr[np.newaxis, :]
    if arr.ndim != 2:
        raise InputError(f"{name} must be 2-D, got {arr.ndim} dimensions")
    if arr.size == 0:
        raise InputError(f"{name} is empty")
    bad = ~np.isfinite(arr)
    if allow_nan:
        bad &= ~np.isnan(arr)
    if bad.any():
        i, j = map(int, np.argwhere(bad)[0])
        raise InputError(f"{name} has a non-finite entry at row {i}, column {j}")
    return arr


def check_mask(mask, shape=None, name: str = "mask") -> np.ndarray:
    """Coerce ``mask`` to a 2-D float64 array of 0/1 entries.

    1 marks an observed value, 0 a missing one.
    """
    arr = np.asarray(mask, dtype=np.float64)
    if arr.ndim == 1:
        arr = arr[np.newaxis, :]
    if arr.ndim != 2:
        raise InputError(f"{name} must be 2-D, got {arr.ndim} dimensions")
    if not np.isin(arr, (0.0, 1.0)).all():
        raise InputError(f"{name} entries must be 0 or 1")
    if shape is not None and arr.shape != tuple(shape):
        raise InputError(f"{name} shape {arr.shape} does not match data shape {tuple(shape)}")
    return arr


def check_same_shape(a: np.ndarray, b: np.ndarray, names=("first", "second")) -> None:
    if a.shape != b.shape:
        raise InputError(f"{names[0]} shape {a.shape} does not match {names[1]} shape {b.shape}")


def check_labels(y, n_rows: int, name: str = "y") -> np.ndarray:
    """Coerce labels to a 1-D int64 vector of length ``n_rows``."""
    arr = np.asarray(y)
    if arr.ndim != 1:
        raise InputError(f"{name} must be 1-D")
    if arr.shape[0] != n_rows:
        raise InputError(f"{name} has {arr.shape[0]} entries for {n_rows} rows")
    if not np.issubdtype(arr.dtype, np.integer):
        as_float = np.asarray(arr, dtype=np.float64)
        if not np.isfinite(as_float).all() or not (as_float == np.round(as_float)).all():
            raise InputError(f"{name} must contain integer class labels")
        arr = as_float.astype(np.int64)
    return arr.astype(np.int64)


def as_generator(seed) -> np.random.Generator:
    """Accept an int seed, a Generator, or None and return a Generator."""
    if isinstance(seed, np.random.Generator):
        return seed
    return np.random.default_rng(seed)
