"""Friedman test, Iman-Davenport refinement, and Bonferroni-Dunn post hoc."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ..exceptions import InputError
from .ranking import RankTable, mean_ranks
from .special import chi2_sf, f_sf, normal_sf


@dataclass(frozen=True)
class FriedmanResult:
    chi2: float
    p_chi2: float
    f_stat: float
    p_f: float
    n_datasets: int
    n_methods: int


def friedman_chi2_from_mean_ranks(avg_ranks, n_datasets: int, tie_correction_factor: float = 1.0):
    """Friedman chi-square from mean ranks over ``n_datasets`` datasets.

    Returns ``(chi2, p)``. The default leaves ranks uncorrected for ties;
    a correction factor < 1 divides the statistic.
    """
    avg = np.asarray(avg_ranks, dtype=np.float64)
    k = avg.shape[0]
    n = int(n_datasets)
    if n < 2 or k < 2:
        raise InputError("Friedman test needs at least 2 datasets and 2 methods")
    if not np.isfinite(avg).all():
        raise InputError("mean ranks must be finite")
    # centered form of 12N/(k(k+1)) * (sum R^2 - k(k+1)^2/4); identical on
    # exact rank data but insensitive to rounding in externally supplied
    # mean ranks whose sum drifts off k(k+1)/2
    chi2 = 12.0 * n / (k * (k + 1)) * float(np.sum((avg - (k + 1) / 2.0) ** 2))
    chi2 = max(chi2, 0.0) / tie_correction_factor
    return chi2, chi2_sf(chi2, k - 1)


def _tie_correction_factor(table: RankTable) -> float:
    """Kendall tie correction 1 - sum(t^3 - t) / (N k (k^2 - 1))."""
    n, k = table.ranks.shape
    tie_sum = 0.0
    for row in table.ranks:
        _, counts = np.unique(row, return_counts=True)
        tie_sum += float(np.sum(counts**3 - counts))
    return 1.0 - tie_sum / (n * k * (k**2 - 1))


def friedman_chi2(table: RankTable, tie_correction: bool = False):
    """Friedman chi-square and p-value for a rank table.

    Ties are left uncorrected by default; set ``tie_correction`` to divide
    by the Kendall tie factor.
    """
    factor = _tie_correction_factor(table) if tie_correction else 1.0
    if factor <= 0.0:
        raise InputError("rank table is degenerate: all methods tie on every dataset")
    return friedman_chi2_from_mean_ranks(mean_ranks(table), table.n_datasets, factor)


def iman_davenport(chi2: float, n_datasets: int, n_methods: int):
    """Iman-Davenport F statistic and p-value from a Friedman chi-square."""
    n, k = int(n_datasets), int(n_methods)
    if n < 2 or k < 2:
        raise InputError("Iman-Davenport needs at least 2 datasets and 2 methods")
    denom = n * (k - 1) - chi2
    if denom <= 0.0:
        raise InputError(f"Iman-Davenport denominator N(k-1) - chi2 = {denom} must be positive")
    f_stat = (n - 1) * chi2 / denom
    return f_stat, f_sf(f_stat, k - 1, (k - 1) * (n - 1))


def friedman_test(table: RankTable, tie_correction: bool = False) -> FriedmanResult:
    """Friedman chi-square plus its Iman-Davenport refinement."""
    chi2, p_chi2 = friedman_chi2(table, tie_correction)
    f_stat, p_f = iman_davenport(chi2, table.n_datasets, table.n_methods)
    return FriedmanResult(
        chi2=chi2,
        p_chi2=p_chi2,
        f_stat=f_stat,
        p_f=p_f,
        n_datasets=table.n_datasets,
        n_methods=table.n_methods,
    )


@dataclass(frozen=True)
class DunnComparison:
    method: str
    mean_rank: float
    z: float
    p_raw: float
    significant: bool


def bonferroni_dunn_from_mean_ranks(avg_ranks, methods, n_datasets: int, control: str, alpha: float = 0.10):
    """Compare every method's mean rank against a control method.

    ``z = (R_j - R_control) / sqrt(k(k+1)/(6N))``; each raw two-sided p is
    tested against ``alpha / (k - 1)``.
    """
    avg = np.asarray(avg_ranks, dtype=np.float64)
    methods = list(methods)
    k = len(methods)
    n = int(n_datasets)
    if avg.shape != (k,):
        raise InputError("one mean rank per method is required")
    if control not in methods:
        raise InputError(f"unknown control method {control!r}; choose from {methods}")
    if not 0.0 < alpha < 1.0:
        raise InputError("alpha must lie in (0, 1)")
    se = math.sqrt(k * (k + 1) / (6.0 * n))
    threshold = alpha / (k - 1)
    r_control = avg[methods.index(control)]
    out = []
    for name, r in zip(methods, avg):
        z = (r - r_control) / se
        p_raw = 2.0 * normal_sf(abs(z))
        out.append(
            DunnComparison(
                method=name,
                mean_rank=float(r),
                z=float(z),
                p_raw=float(p_raw),
                significant=bool(p_raw < threshold),
            )
        )
    return out


def bonferroni_dunn(table: RankTable, control: str, alpha: float = 0.10):
    """Bonferroni-Dunn post hoc on a rank table (control vs every method)."""
    return bonferroni_dunn_from_mean_ranks(
        mean_ranks(table), table.methods, table.n_datasets, control, alpha
    )
