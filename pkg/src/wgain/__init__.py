"""Missing-value imputation for numeric tabular data.

Adversarially trained imputers (a Wasserstein-critic model and a
hint-based GAN), a denoising autoencoder, and classical baselines
(inverse-distance k-NN, chained ridge regression, column means), all with
a common sklearn-style fit/impute/transform surface, plus a benchmark
harness with rank-based statistical comparison (Friedman, Iman-Davenport,
Bonferroni-Dunn).
"""

from .data import Dataset, Scaler, gen_ringnorm, gen_twonorm, load_csv, split_70_30
from .exceptions import InputError, TrainingDivergedError, WgainError
from .experiment import (
    ExperimentConfig,
    Report,
    load_config,
    run,
    stats_from_table,
    stats_from_tables,
    write_report,
)
from .imputers import (
    IMPUTER_KINDS,
    DAEImputer,
    GAINImputer,
    KNNImputer,
    MeanImputer,
    MICEImputer,
    WGAINImputer,
    load_imputer,
    save_imputer,
)
from .masking import MaskScheme, complete, corrupt, mask_from_nan, sample_mask
from .stats import rmse_missing

__version__ = "0.1.0"

__all__ = [
    "DAEImputer",
    "Dataset",
    "ExperimentConfig",
    "GAINImputer",
    "IMPUTER_KINDS",
    "InputError",
    "KNNImputer",
    "MICEImputer",
    "MaskScheme",
    "MeanImputer",
    "Report",
    "Scaler",
    "TrainingDivergedError",
    "WGAINImputer",
    "WgainError",
    "complete",
    "corrupt",
    "gen_ringnorm",
    "gen_twonorm",
    "load_config",
    "load_csv",
    "load_imputer",
    "mask_from_nan",
    "rmse_missing",
    "run",
    "sample_mask",
    "save_imputer",
    "split_70_30",
    "stats_from_table",
    "stats_from_tables",
    "write_report",
]
