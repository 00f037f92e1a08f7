"""Imputation error metrics."""

from __future__ import annotations

import math

import numpy as np

from ..exceptions import InputError
from ..validation import check_mask, check_matrix, check_same_shape


def rmse_missing(original, imputed, mask) -> float:
    """Root mean squared error over the missing entries only.

    Computed in whatever units the inputs carry; the benchmark harness
    passes un-standardized data so errors are in original feature units.
    """
    original = check_matrix(original, "original")
    imputed = check_matrix(imputed, "imputed")
    check_same_shape(original, imputed, ("original", "imputed"))
    mask = check_mask(mask, original.shape)
    missing = mask == 0.0
    n_missing = int(missing.sum())
    if n_missing == 0:
        raise InputError("rmse_missing needs at least one missing entry")
    diff = original[missing] - imputed[missing]
    return math.sqrt(float(np.sum(diff**2)) / n_missing)
