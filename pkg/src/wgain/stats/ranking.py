"""Tie-aware ranking of method scores across datasets."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ..exceptions import InputError

DIRECTIONS = ("higher", "lower")


def rank_with_ties(scores, direction: str = "higher") -> np.ndarray:
    """Rank one score vector: the best score gets rank 1.

    Equal scores share the mean of the rank positions they span, so the
    ranks always sum to k(k+1)/2.
    """
    if direction not in DIRECTIONS:
        raise InputError(f"direction must be one of {DIRECTIONS}, got {direction!r}")
    s = np.asarray(scores, dtype=np.float64)
    if s.ndim != 1:
        raise InputError("scores must be a 1-D vector")
    if not np.isfinite(s).all():
        raise InputError("scores must be finite")
    key = -s if direction == "higher" else s
    order = np.argsort(key, kind="stable")
    sorted_key = key[order]
    ranks = np.empty(len(s))
    i = 0
    while i < len(s):
        j = i
        while j < len(s) and sorted_key[j] == sorted_key[i]:
            j += 1
        # positions i+1 .. j (1-based) share their mean
        ranks[order[i:j]] = (i + 1 + j) / 2.0
        i = j
    return ranks


@dataclass
class RankTable:
    """Per-dataset ranks of competing methods.

    ``ranks`` has one row per dataset and one column per method; the
    ``direction`` tag records whether the source scores were higher-better
    or lower-better.
    """

    ranks: np.ndarray
    methods: list
    direction: str
    datasets: list = field(default_factory=list)

    def __post_init__(self):
        self.ranks = np.asarray(self.ranks, dtype=np.float64)
        if self.ranks.ndim != 2:
            raise InputError("rank table must be 2-D")
        n, k = self.ranks.shape
        if len(self.methods) != k:
            raise InputError(f"{len(self.methods)} method names for {k} columns")
        if self.datasets and len(self.datasets) != n:
            raise InputError(f"{len(self.datasets)} dataset names for {n} rows")
        expected = k * (k + 1) / 2.0
        sums = self.ranks.sum(axis=1)
        if not np.allclose(sums, expected, atol=1e-9):
            bad = int(np.argmax(np.abs(sums - expected)))
            raise InputError(
                f"row {bad} ranks sum to {sums[bad]}, expected k(k+1)/2 = {expected}"
            )

    @property
    def n_datasets(self) -> int:
        return self.ranks.shape[0]

    @property
    def n_methods(self) -> int:
        return self.ranks.shape[1]


def rank_scores(values, methods, direction: str = "higher", datasets=None) -> RankTable:
    """Rank a (datasets x methods) score matrix row by row."""
    values = np.asarray(values, dtype=np.float64)
    if values.ndim != 2:
        raise InputError("score matrix must be 2-D")
    ranks = np.vstack([rank_with_ties(row, direction) for row in values])
    return RankTable(
        ranks=ranks,
        methods=list(methods),
        direction=direction,
        datasets=list(datasets) if datasets is not None else [],
    )


def mean_ranks(table: RankTable) -> np.ndarray:
    """Column means of the rank table."""
    return table.ranks.mean(axis=0)
