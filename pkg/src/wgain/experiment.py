"""End-to-end benchmark harness.

For each dataset: split 70/30, train the downstream classifiers on the
clean training split and keep the best, train every imputer on the same
split; then for each missingness level and repeat, draw a feature-subset
mask over the test split (shared by all imputers), impute, and measure
downstream accuracy plus RMSE over the missing entries in original units.
Scores are averaged over repeats, ranked per level, and pushed through the
Friedman / Iman-Davenport / Bonferroni-Dunn pipeline.

Every random draw takes its own seed, derived from the master seed through
a splittable seed tree, so a config reproduces its report byte for byte.
"""

from __future__ import annotations

import json
import warnings
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .classify import CLASSIFIER_ORDER, accuracy, select_best
from .data import SYNTHETIC_GENERATORS, Dataset, Scaler, load_csv, split_70_30
from .exceptions import InputError, WgainError
from .imputers import IMPUTER_KINDS, KNNImputer
from .masking import MaskScheme, sample_mask
from .stats import (
    FriedmanResult,
    RankTable,
    ScoreTable,
    bonferroni_dunn,
    friedman_test,
    load_score_table,
    mean_ranks,
    rank_scores,
    rmse_missing,
    save_score_table,
)

_PURPOSES = {"split": 0, "classifier": 1, "fit": 2, "mask": 3, "impute": 4, "select_k": 5}


def derive_seed(master: int, purpose: str, *indices: int) -> np.random.SeedSequence:
    """Child seed for one draw; injective over (purpose, indices)."""
    return np.random.SeedSequence(master, spawn_key=(_PURPOSES[purpose], *indices))


@dataclass
class DatasetSpec:
    name: str
    path: str | None = None
    label_column: str | int | None = None
    synthetic: str | None = None
    n: int = 7400
    d: int = 20

    def load(self, seed) -> Dataset:
        if self.synthetic is not None:
            if self.synthetic not in SYNTHETIC_GENERATORS:
                raise InputError(
                    f"unknown synthetic dataset {self.synthetic!r}; "
                    f"choose from {sorted(SYNTHETIC_GENERATORS)}"
                )
            return SYNTHETIC_GENERATORS[self.synthetic](self.n, self.d, seed, name=self.name)
        if self.path is None or self.label_column is None:
            raise InputError(f"dataset {self.name!r} needs either 'synthetic' or 'path' + 'label_column'")
        return load_csv(self.path, self.label_column, name=self.name)


@dataclass
class ImputerSpec:
    kind: str
    name: str
    params: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.kind not in IMPUTER_KINDS:
            raise InputError(
                f"imputer kind {self.kind!r} must be one of {sorted(IMPUTER_KINDS)}"
            )
        valid = IMPUTER_KINDS[self.kind]().get_params()
        unknown = set(self.params) - set(valid)
        if unknown:
            raise InputError(f"imputer {self.name!r}: unknown parameter(s) {sorted(unknown)}")

    def build(self, seed):
        cls = IMPUTER_KINDS[self.kind]
        imputer = cls(**self.params)
        if "random_state" in imputer.get_params() and "random_state" not in self.params:
            imputer.set_params(random_state=seed)
        return imputer


@dataclass
class ExperimentConfig:
    datasets: list
    imputers: list
    output_dir: str = "results"
    levels: tuple = (0.1, 0.2, 0.3, 0.4, 0.5)
    repeats: int = 10
    seed: int = 0
    classifiers: tuple = CLASSIFIER_ORDER
    classifier_budget: int = 20
    control: str | None = None
    alpha: float = 0.10

    def __post_init__(self):
        if not self.datasets:
            raise InputError("config needs at least one dataset")
        if not self.imputers:
            raise InputError("config needs at least one imputer")
        names = [spec.name for spec in self.imputers]
        if len(set(names)) != len(names):
            raise InputError(f"imputer names must be unique, got {names}")
        ds_names = [spec.name for spec in self.datasets]
        if len(set(ds_names)) != len(ds_names):
            raise InputError(f"dataset names must be unique, got {ds_names}")
        for level in self.levels:
            if not 0.0 < level < 1.0:
                raise InputError(f"missingness level {level} must lie in (0, 1)")
        if self.repeats < 1:
            raise InputError("repeats must be at least 1")
        if self.control is not None and self.control not in names:
            raise InputError(f"control {self.control!r} is not a configured imputer")


def load_config(path) -> ExperimentConfig:
    """Parse and validate a JSON experiment config."""
    try:
        with open(path, encoding="utf-8") as fh:
            raw = json.load(fh)
    except json.JSONDecodeError as exc:
        raise InputError(f"{path}: invalid JSON ({exc})") from None
    if not isinstance(raw, dict):
        raise InputError(f"{path}: top level must be an object")

    known = {
        "datasets", "imputers", "output_dir", "levels", "repeats", "seed",
        "classifiers", "classifier_budget", "control", "alpha",
    }
    unknown = set(raw) - known
    if unknown:
        raise InputError(f"{path}: unknown config key(s) {sorted(unknown)}")

    datasets = []
    for entry in raw.get("datasets", []):
        entry = dict(entry)
        if "name" not in entry:
            entry["name"] = entry.get("synthetic") or Path(entry.get("path", "dataset")).stem
        allowed = {"name", "path", "label_column", "synthetic", "n", "d"}
        unknown = set(entry) - allowed
        if unknown:
            raise InputError(f"{path}: dataset entry has unknown key(s) {sorted(unknown)}")
        datasets.append(DatasetSpec(**entry))

    imputers = []
    for entry in raw.get("imputers", []):
        entry = dict(entry)
        kind = entry.pop("kind", None)
        if kind not in IMPUTER_KINDS:
            raise InputError(f"{path}: imputer kind {kind!r} must be one of {sorted(IMPUTER_KINDS)}")
        name = entry.pop("name", kind)
        imputers.append(ImputerSpec(kind=kind, name=name, params=entry))

    kwargs = {}
    for key in ("output_dir", "repeats", "seed", "classifier_budget", "control", "alpha"):
        if key in raw:
            kwargs[key] = raw[key]
    if "levels" in raw:
        kwargs["levels"] = tuple(raw["levels"])
    if "classifiers" in raw:
        for kind in raw["classifiers"]:
            if kind not in CLASSIFIER_ORDER:
                raise InputError(f"{path}: classifier {kind!r} must be one of {CLASSIFIER_ORDER}")
        kwargs["classifiers"] = tuple(raw["classifiers"])
    return ExperimentConfig(datasets=datasets, imputers=imputers, **kwargs)


@dataclass
class CellFailure:
    dataset: str
    imputer: str
    level: float
    repeat: int
    error: str


@dataclass
class LevelStats:
    level: float
    ranks: RankTable
    avg_ranks: np.ndarray
    friedman: FriedmanResult | None
    dunn: list | None


@dataclass
class Report:
    datasets: list
    imputers: list
    levels: list
    clean_accuracy: dict
    classifier_kind: dict
    accuracy: np.ndarray  # (datasets, imputers, levels), NaN where failed
    rmse: np.ndarray
    failures: list
    stats_accuracy: list  # LevelStats per level (may be empty)
    stats_rmse: list


def _aggregate_stats(values, datasets, methods, levels, direction, control, alpha):
    """Rank complete rows per level and run the Friedman pipeline."""
    out = []
    for li, level in enumerate(levels):
        cells = values[:, :, li]
        complete_rows = ~np.isnan(cells).any(axis=1)
        if complete_rows.sum() < 1 or len(methods) < 2:
            continue
        table = rank_scores(
            cells[complete_rows],
            methods,
            direction,
            datasets=[d for d, keep in zip(datasets, complete_rows) if keep],
        )
        avg = mean_ranks(table)
        friedman = None
        dunn = None
        if table.n_datasets >= 2:
            try:
                friedman = friedman_test(table)
            except InputError:
                friedman = None
            ctrl = control if control is not None else methods[int(np.argmin(avg))]
            dunn = bonferroni_dunn(table, ctrl, alpha)
        out.append(LevelStats(level=level, ranks=table, avg_ranks=avg, friedman=friedman, dunn=dunn))
    return out


def run(config: ExperimentConfig) -> Report:
    n_ds = len(config.datasets)
    n_imp = len(config.imputers)
    n_lvl = len(config.levels)
    method_names = [spec.name for spec in config.imputers]
    dataset_names = [spec.name for spec in config.datasets]

    acc_cells = np.full((n_ds, n_imp, n_lvl, config.repeats), np.nan)
    rmse_cells = np.full((n_ds, n_imp, n_lvl, config.repeats), np.nan)
    failures = []
    clean_accuracy = {}
    classifier_kind = {}

    for di, dspec in enumerate(config.datasets):
        ds = dspec.load(derive_seed(config.seed, "split", di, 0))
        train, test = split_70_30(ds, derive_seed(config.seed, "split", di, 1))
        scaler = Scaler().fit(train.features)
        train_s = scaler.transform(train.features)
        test_s = scaler.transform(test.features)
        best = select_best(
            train_s,
            train.labels,
            test_s,
            test.labels,
            kinds=config.classifiers,
            budget=config.classifier_budget,
            seed=derive_seed(config.seed, "classifier", di),
        )
        clean_accuracy[dspec.name] = best.test_accuracy
        classifier_kind[dspec.name] = best.kind

        fitted = []
        for ii, ispec in enumerate(config.imputers):
            try:
                imputer = ispec.build(derive_seed(config.seed, "fit", di, ii))
                if isinstance(imputer, KNNImputer) and "n_neighbors" not in ispec.params:
                    imputer = _auto_knn(imputer, train, config, di, ii)
                imputer.fit(train.features)
            except WgainError as exc:
                failures.append(CellFailure(dspec.name, ispec.name, -1.0, -1, f"fit failed: {exc}"))
                imputer = None
            fitted.append(imputer)

        d = ds.n_features
        for li, level in enumerate(config.levels):
            scheme = MaskScheme.feature_subset(level)
            for rep in range(config.repeats):
                mask = sample_mask(
                    scheme, test.n_rows, d, derive_seed(config.seed, "mask", di, li, rep)
                )
                for ii, ispec in enumerate(config.imputers):
                    if fitted[ii] is None:
                        continue
                    seed = derive_seed(config.seed, "impute", di, ii, li, rep)
                    try:
                        imputed = fitted[ii].impute(test.features, mask, seed)
                        rmse_cells[di, ii, li, rep] = rmse_missing(test.features, imputed, mask)
                        acc_cells[di, ii, li, rep] = accuracy(
                            best.model.predict(scaler.transform(imputed)), test.labels
                        )
                    except WgainError as exc:
                        failures.append(
                            CellFailure(dspec.name, ispec.name, level, rep, str(exc))
                        )

    # a cell is failed (NaN) unless every repeat succeeded
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", RuntimeWarning)
        acc_mean = np.where(
            np.isnan(acc_cells).any(axis=3), np.nan, np.nanmean(acc_cells, axis=3)
        )
        rmse_mean = np.where(
            np.isnan(rmse_cells).any(axis=3), np.nan, np.nanmean(rmse_cells, axis=3)
        )

    stats_acc = _aggregate_stats(
        acc_mean, dataset_names, method_names, config.levels, "higher", config.control, config.alpha
    )
    stats_rmse = _aggregate_stats(
        rmse_mean, dataset_names, method_names, config.levels, "lower", config.control, config.alpha
    )
    return Report(
        datasets=dataset_names,
        imputers=method_names,
        levels=list(config.levels),
        clean_accuracy=clean_accuracy,
        classifier_kind=classifier_kind,
        accuracy=acc_mean,
        rmse=rmse_mean,
        failures=failures,
        stats_accuracy=stats_acc,
        stats_rmse=stats_rmse,
    )


def _auto_knn(imputer: KNNImputer, train: Dataset, config: ExperimentConfig, di: int, ii: int):
    """Pick k on a held-out fifth of the training rows, then keep it."""
    n = train.n_rows
    n_ref = max(1, int(0.8 * n))
    if n - n_ref < 1:
        return imputer
    rng = np.random.default_rng(derive_seed(config.seed, "select_k", di, ii, 0))
    perm = rng.permutation(n)
    reference, validation = train.subset(perm[:n_ref]), train.subset(perm[n_ref:])
    candidates = [k for k in (11, 13, 15, 17, 19, 21, 23, 25) if k <= n_ref]
    if not candidates:
        return imputer
    level = config.levels[len(config.levels) // 2]
    probe = KNNImputer(n_neighbors=candidates[0]).fit(reference.features)
    k = probe.select_k(
        validation.features,
        MaskScheme.feature_subset(level),
        derive_seed(config.seed, "select_k", di, ii, 1),
        candidates=candidates,
    )
    imputer.set_params(n_neighbors=k)
    return imputer


@dataclass
class StatsReport:
    scores: ScoreTable
    ranks: RankTable
    avg_ranks: np.ndarray
    friedman: FriedmanResult
    dunn: list
    control: str


def stats_from_table(table: ScoreTable, direction: str = "higher", control: str | None = None, alpha: float = 0.10) -> StatsReport:
    """Rank a score table and run the full statistics pipeline on it."""
    if len(table.methods) < 2:
        raise InputError("need at least 2 methods to compare")
    if len(table.datasets) < 2:
        raise InputError("need at least 2 datasets to compare")
    ranks = rank_scores(table.values, table.methods, direction, datasets=table.datasets)
    avg = mean_ranks(ranks)
    friedman = friedman_test(ranks)
    ctrl = control if control is not None else table.methods[int(np.argmin(avg))]
    dunn = bonferroni_dunn(ranks, ctrl, alpha)
    return StatsReport(
        scores=table, ranks=ranks, avg_ranks=avg, friedman=friedman, dunn=dunn, control=ctrl
    )


def stats_from_tables(path, direction: str = "higher", control: str | None = None, alpha: float = 0.10) -> StatsReport:
    """Load a scores CSV (datasets x methods) and run the statistics pipeline."""
    return stats_from_table(load_score_table(path), direction, control, alpha)


def _level_tag(level: float) -> str:
    return f"{int(round(level * 100)):02d}"


def _write_matrix_csv(path, datasets, methods, values):
    save_score_table(path, ScoreTable(datasets=datasets, methods=methods, values=values))


def write_report(report: Report, out_dir) -> list:
    """Write all report files; returns the written paths."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    written = []

    def _emit(name, writer):
        path = out / name
        writer(path)
        written.append(path)

    for li, level in enumerate(report.levels):
        tag = _level_tag(level)
        for metric, values in (("accuracy", report.accuracy), ("rmse", report.rmse)):
            cells = values[:, :, li]
            _emit(
                f"{metric}_{tag}.csv",
                lambda p, c=cells: _write_matrix_csv(p, report.datasets, report.imputers, c),
            )
    for metric, stats in (("accuracy", report.stats_accuracy), ("rmse", report.stats_rmse)):
        for ls in stats:
            tag = _level_tag(ls.level)
            _emit(
                f"ranks_{metric}_{tag}.csv",
                lambda p, ls=ls: _write_matrix_csv(p, ls.ranks.datasets, ls.ranks.methods, ls.ranks.ranks),
            )
        _emit(f"friedman_{metric}.csv", lambda p, s=stats: _write_friedman_csv(p, s))
        _emit(f"dunn_{metric}.csv", lambda p, s=stats: _write_dunn_csv(p, s))
    _emit("clean_accuracy.csv", lambda p: _write_clean_csv(p, report))
    if report.failures:
        _emit("failures.csv", lambda p: _write_failures_csv(p, report.failures))
    _emit("summary.txt", lambda p: _write_summary(p, report))
    return written


def _write_friedman_csv(path, stats):
    import csv

    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["level", "mean_ranks", "chi2", "p_chi2", "f_stat", "p_f", "n_datasets", "n_methods"])
        for ls in stats:
            fr = ls.friedman
            avg = ";".join(repr(float(v)) for v in ls.avg_ranks)
            if fr is None:
                writer.writerow([repr(ls.level), avg, "", "", "", "", ls.ranks.n_datasets, ls.ranks.n_methods])
            else:
                writer.writerow(
                    [
                        repr(ls.level), avg, repr(fr.chi2), repr(fr.p_chi2),
                        repr(fr.f_stat), repr(fr.p_f), fr.n_datasets, fr.n_methods,
                    ]
                )


def _write_dunn_csv(path, stats):
    import csv

    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["level", "method", "mean_rank", "z", "p_raw", "significant"])
        for ls in stats:
            if ls.dunn is None:
                continue
            for cmp in ls.dunn:
                writer.writerow(
                    [repr(ls.level), cmp.method, repr(cmp.mean_rank), repr(cmp.z), repr(cmp.p_raw), int(cmp.significant)]
                )


def _write_clean_csv(path, report: Report):
    import csv

    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["dataset", "classifier", "clean_accuracy"])
        for name in report.datasets:
            writer.writerow([name, report.classifier_kind[name], repr(report.clean_accuracy[name])])


def _write_failures_csv(path, failures):
    import csv

    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["dataset", "imputer", "level", "repeat", "error"])
        for f in failures:
            writer.writerow([f.dataset, f.imputer, repr(f.level), f.repeat, f.error])


def _write_summary(path, report: Report):
    lines = []
    lines.append("Benchmark summary")
    lines.append("=" * 60)
    lines.append(f"datasets: {', '.join(report.datasets)}")
    lines.append(f"imputers: {', '.join(report.imputers)}")
    lines.append(f"levels:   {', '.join(f'{lv:.0%}' for lv in report.levels)}")
    lines.append("")
    lines.append("Clean test accuracy (best classifier):")
    for name in report.datasets:
        lines.append(
            f"  {name}: {report.clean_accuracy[name]:.4f} ({report.classifier_kind[name]})"
        )
    for metric, stats in (("accuracy", report.stats_accuracy), ("rmse", report.stats_rmse)):
        if not stats:
            continue
        lines.append("")
        lines.append(f"Mean ranks by {metric}:")
        header = "  level  " + "  ".join(f"{m:>8}" for m in report.imputers)
        lines.append(header)
        for ls in stats:
            row = f"  {ls.level:>5.0%}  " + "  ".join(f"{r:8.2f}" for r in ls.avg_ranks)
            lines.append(row)
        lines.append(f"Friedman p-values ({metric}):")
        for ls in stats:
            if ls.friedman is None:
                lines.append(f"  {ls.level:>5.0%}  (not enough complete datasets)")
            else:
                lines.append(
                    f"  {ls.level:>5.0%}  chi2 p = {ls.friedman.p_chi2:.3f}, F p = {ls.friedman.p_f:.3f}"
                )
    if report.failures:
        lines.append("")
        lines.append(f"{len(report.failures)} cell failure(s); see failures.csv")
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("\n".join(lines) + "\n")
