"""Imputation estimators with a shared fit/impute/transform contract."""

from .base import BaseImputer
from .classical import KNN_CANDIDATE_KS, KNNImputer, MeanImputer, MICEImputer, mean_impute
from .dae import DAEImputer
from .gain import GAINImputer, gain_hint
from .io import load_imputer, save_imputer
from .wgain import WGAINImputer, critic_objective, generator_objective

IMPUTER_KINDS = {
    "wgain": WGAINImputer,
    "gain": GAINImputer,
    "dae": DAEImputer,
    "knn": KNNImputer,
    "mice": MICEImputer,
    "mean": MeanImputer,
}

__all__ = [
    "BaseImputer",
    "DAEImputer",
    "GAINImputer",
    "IMPUTER_KINDS",
    "KNNImputer",
    "KNN_CANDIDATE_KS",
    "MICEImputer",
    "MeanImputer",
    "WGAINImputer",
    "critic_objective",
    "gain_hint",
    "generator_objective",
    "load_imputer",
    "mean_impute",
    "save_imputer",
]
