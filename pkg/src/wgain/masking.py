"""Missingness masks and the corruption/completion algebra.

A mask has the same shape as the data it applies to; entry 1 marks an
observed value, 0 a missing one.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .exceptions import InputError
from .validation import as_generator, check_mask, check_same_shape

SCHEME_KINDS = ("per_row_uniform", "fixed_rate", "feature_subset")


@dataclass(frozen=True)
class MaskScheme:
    """How missingness is drawn.

    per_row_uniform(max_rate): each row gets its own rate ~ U(0, max_rate),
    then entries drop out independently at that rate.
    fixed_rate(p): every entry drops out independently with probability p.
    feature_subset(fraction): ceil(fraction * d) whole columns are missing.
    """

    kind: str
    rate: float

    def __post_init__(self):
        if self.kind not in SCHEME_KINDS:
            raise InputError(f"unknown mask scheme {self.kind!r}")
        if not 0.0 <= self.rate <= 1.0:
            raise InputError(f"mask rate must lie in [0, 1], got {self.rate}")

    @classmethod
    def per_row_uniform(cls, max_rate: float) -> "MaskScheme":
        return cls("per_row_uniform", max_rate)

    @classmethod
    def fixed_rate(cls, p: float) -> "MaskScheme":
        return cls("fixed_rate", p)

    @classmethod
    def feature_subset(cls, fraction: float) -> "MaskScheme":
        return cls("feature_subset", fraction)


def sample_mask(scheme: MaskScheme, n_rows: int, n_cols: int, seed) -> np.ndarray:
    """Draw an (n_rows, n_cols) mask; deterministic for a given seed."""
    if n_rows < 1 or n_cols < 1:
        raise InputError("mask dimensions must be at least 1")
    rng = as_generator(seed)
    if scheme.kind == "per_row_uniform":
        rates = rng.uniform(0.0, scheme.rate, size=(n_rows, 1))
        return (rng.random((n_rows, n_cols)) >= rates).astype(np.float64)
    if scheme.kind == "fixed_rate":
        return (rng.random((n_rows, n_cols)) >= scheme.rate).astype(np.float64)
    # feature_subset: whole columns go missing, rounding the count up so a
    # nonzero fraction always drops at least one feature.
    n_missing = math.ceil(scheme.rate * n_cols)
    mask = np.ones((n_rows, n_cols))
    if n_missing > 0:
        cols = rng.choice(n_cols, size=n_missing, replace=False)
        mask[:, cols] = 0.0
    return mask


def corrupt(x, mask, z) -> np.ndarray:
    """Replace missing entries of ``x`` with the matching entries of ``z``.

    Computes ``z*(1-mask) + x*mask`` for a binary mask; observed entries are
    copied verbatim.
    """
    x = np.asarray(x, dtype=np.float64)
    z = np.asarray(z, dtype=np.float64) if np.ndim(z) else np.full_like(x, float(z))
    mask = check_mask(mask, x.shape if x.ndim == 2 else None)
    if x.ndim == 1:
        x = x[np.newaxis, :]
    if z.ndim == 1:
        z = z[np.newaxis, :]
    check_same_shape(x, mask, ("data", "mask"))
    check_same_shape(x, z, ("data", "noise"))
    return np.where(mask == 1.0, x, z)


def complete(gen_out, x_tilde, mask) -> np.ndarray:
    """Copy observed entries from ``x_tilde``, fill missing ones from ``gen_out``."""
    gen_out = np.asarray(gen_out, dtype=np.float64)
    x_tilde = np.asarray(x_tilde, dtype=np.float64)
    if gen_out.ndim == 1:
        gen_out = gen_out[np.newaxis, :]
    if x_tilde.ndim == 1:
        x_tilde = x_tilde[np.newaxis, :]
    mask = check_mask(mask, x_tilde.shape)
    check_same_shape(gen_out, x_tilde, ("generator output", "data"))
    return np.where(mask == 1.0, x_tilde, gen_out)


def mask_from_nan(x) -> np.ndarray:
    """Mask with 0 wherever ``x`` is NaN."""
    x = np.asarray(x, dtype=np.float64)
    if x.ndim == 1:
        x = x[np.newaxis, :]
    return (~np.isnan(x)).astype(np.float64)
