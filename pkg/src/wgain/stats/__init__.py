"""Rank-based evaluation statistics: RMSE, tie-aware ranks, Friedman,
Iman-Davenport, and Bonferroni-Dunn."""

from .friedman import (
    DunnComparison,
    FriedmanResult,
    bonferroni_dunn,
    bonferroni_dunn_from_mean_ranks,
    friedman_chi2,
    friedman_chi2_from_mean_ranks,
    friedman_test,
    iman_davenport,
)
from .metrics import rmse_missing
from .ranking import RankTable, mean_ranks, rank_scores, rank_with_ties
from .special import chi2_sf, f_sf, normal_sf, reg_inc_beta, reg_lower_gamma, reg_upper_gamma
from .tables import ScoreTable, load_score_table, save_score_table

__all__ = [
    "DunnComparison",
    "FriedmanResult",
    "RankTable",
    "ScoreTable",
    "bonferroni_dunn",
    "bonferroni_dunn_from_mean_ranks",
    "chi2_sf",
    "f_sf",
    "friedman_chi2",
    "friedman_chi2_from_mean_ranks",
    "friedman_test",
    "iman_davenport",
    "load_score_table",
    "mean_ranks",
    "normal_sf",
    "rank_scores",
    "rank_with_ties",
    "reg_inc_beta",
    "reg_lower_gamma",
    "reg_upper_gamma",
    "rmse_missing",
    "save_score_table",
]
