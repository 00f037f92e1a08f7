"""Acceptance suite: every release gate in one module.

Each test prints a PASS/FAIL line (run with ``pytest tests/test_acceptance.py
-v -s``). Expected values come from the published benchmark tables
(paper_tables.py) and from independent oracles computed in this module.
"""

import itertools
import math
import time
from pathlib import Path

import numpy as np
import pytest

import paper_tables as pt
from test_classical_imputers import brute_force_knn
from test_wgain import finite_difference, frozen_batch, max_relative_error
from wgain.data import gen_twonorm, split_70_30
from wgain.experiment import (
    DatasetSpec,
    ExperimentConfig,
    ImputerSpec,
    run,
    stats_from_table,
    write_report,
)
from wgain.imputers import (
    DAEImputer,
    GAINImputer,
    KNNImputer,
    MeanImputer,
    MICEImputer,
    WGAINImputer,
)
from wgain.imputers.wgain import (
    critic_loss_and_grads,
    critic_objective,
    generator_forward,
    generator_loss_and_grads,
    generator_objective,
)
from wgain.stats import (
    ScoreTable,
    bonferroni_dunn_from_mean_ranks,
    friedman_chi2_from_mean_ranks,
    iman_davenport,
)


def announce(number, name, ok):
    print(f"\n[criterion {number:02d}] {name}: {'PASS' if ok else 'FAIL'}")


class Gate:
    """Prints the criterion verdict even when an assertion fails."""

    def __init__(self, number, name):
        self.number = number
        self.name = name

    def __enter__(self):
        return self

    def __exit__(self, exc_type, exc, tb):
        announce(self.number, self.name, exc_type is None)
        return False


def test_01_rank_derivation_from_accuracy_table():
    with Gate(1, "accuracy table -> rank table, zero tolerance"):
        start = time.perf_counter()
        table = ScoreTable(
            datasets=pt.DATASETS, methods=pt.METHODS, values=np.array(pt.ACCURACY_10)
        )
        result = stats_from_table(table, direction="higher", control="wgain")
        elapsed = time.perf_counter() - start

        # independent oracle: rank = 1 + #better + #equal/2
        oracle = np.array(
            [
                [1 + np.sum(row > v) + (np.sum(row == v) - 1) / 2 for v in row]
                for row in np.asarray(pt.ACCURACY_10)
            ]
        )
        np.testing.assert_array_equal(result.ranks.ranks, oracle)
        np.testing.assert_array_equal(result.ranks.ranks, pt.DERIVED_ACCURACY_RANKS_10)

        # the published rank table matches except on three rows where the
        # printed accuracies tie but the published ranks were computed from
        # unrounded values (e.g. Shuttle: equal printed 0.9995 scores got
        # ranks 2 and 3.5); those rows cannot be reproduced from the
        # printed matrix by any averaged-tie ranking
        published = np.array(pt.PUBLISHED_ACCURACY_RANKS_10)
        consistent = [i for i in range(12) if i not in pt.ROUNDING_ARTIFACT_ROWS]
        np.testing.assert_array_equal(result.ranks.ranks[consistent], published[consistent])
        assert {tuple(published[i]) for i in pt.ROUNDING_ARTIFACT_ROWS} != {
            tuple(result.ranks.ranks[i]) for i in pt.ROUNDING_ARTIFACT_ROWS
        }

        # the tie values the gate calls out: Cancer's split 3.5s
        np.testing.assert_array_equal(
            result.ranks.ranks[pt.DATASETS.index("Cancer")], [6.0, 3.5, 3.5, 2.0, 5.0, 1.0]
        )
        assert elapsed < 1.0


def test_02_friedman_reproduction_from_mean_ranks():
    with Gate(2, "Friedman p-values from mean ranks within +/-0.01"):
        start = time.perf_counter()
        for level, avg in pt.MEAN_RANKS_ACCURACY.items():
            chi2, p_chi2 = friedman_chi2_from_mean_ranks(avg, pt.N_DATASETS)
            _, p_f = iman_davenport(chi2, pt.N_DATASETS, pt.N_METHODS)
            expected_chi2, expected_f = pt.PUBLISHED_PVALUES[level]
            assert abs(p_chi2 - expected_chi2) < 0.01, f"p_chi2 at {level:.0%}"
            assert abs(p_f - expected_f) < 0.01, f"p_F at {level:.0%}"
        assert time.perf_counter() - start < 1.0


def test_03_bonferroni_dunn_flags_dae_at_20_and_30_only():
    with Gate(3, "Bonferroni-Dunn: DAE only, at 20% and 30% only"):
        start = time.perf_counter()
        flagged = {}
        for level, avg in pt.MEAN_RANKS_ACCURACY.items():
            out = bonferroni_dunn_from_mean_ranks(
                avg, pt.METHODS, pt.N_DATASETS, control="wgain", alpha=0.10
            )
            flagged[level] = sorted(c.method for c in out if c.significant)
        assert flagged == {0.1: [], 0.2: ["dae"], 0.3: ["dae"], 0.4: [], 0.5: []}
        assert time.perf_counter() - start < 1.0


def test_04_rmse_rank_derivation_exact():
    with Gate(4, "RMSE table -> published rank table, zero tolerance"):
        table = ScoreTable(datasets=pt.DATASETS, methods=pt.METHODS, values=np.array(pt.RMSE_10))
        result = stats_from_table(table, direction="lower")
        np.testing.assert_array_equal(result.ranks.ranks, pt.PUBLISHED_RMSE_RANKS_10)


def test_05_objective_gradients_match_finite_differences():
    with Gate(5, "critic/generator gradients vs finite differences, 20 seeds"):
        start = time.perf_counter()
        for seed in range(20):
            gen, critic, x, m, z = frozen_batch(seed, d=3, batch=2)
            _, _, x_hat = generator_forward(gen, x, m, z)

            _, c_grads = critic_loss_and_grads(critic, x_hat, x, m, 10.0)
            c_fd = finite_difference(critic, lambda: critic_objective(critic, x_hat, x, m, 10.0))
            assert max_relative_error(c_grads, c_fd) < 1e-5, f"critic, seed {seed}"

            _, g_grads = generator_loss_and_grads(gen, critic, x, m, z, 2.0, 1.0)

            def gen_loss():
                _, _, xh = generator_forward(gen, x, m, z)
                return generator_objective(critic, xh, x, m, 2.0, 1.0)

            g_fd = finite_difference(gen, gen_loss)
            assert max_relative_error(g_grads, g_fd) < 1e-5, f"generator, seed {seed}"
        assert time.perf_counter() - start < 10.0


def test_06_critic_norms_clipped_through_1000_iterations():
    with Gate(6, "critic layer norms <= w_max + 1e-9 after every update"):
        X = np.random.default_rng(0).normal(size=(400, 6)) * 2.5
        norms = []
        WGAINImputer(
            epochs=1000,
            random_state=7,
            on_iteration=lambda it, critic, gen: norms.append(
                max(layer.param_norm() for layer in critic.layers)
            ),
        ).fit(X)
        assert len(norms) == 1000
        assert max(norms) <= 1.0 + 1e-9


def test_07_observed_preservation_bit_exact_for_all_imputers():
    with Gate(7, "observed entries preserved bit-exactly, 6 imputers x 100 fixtures"):
        rng = np.random.default_rng(42)
        X = rng.normal(loc=1.0, scale=2.0, size=(150, 5))
        imputers = [
            WGAINImputer(epochs=30, random_state=0).fit(X),
            GAINImputer(epochs=30, random_state=0).fit(X),
            DAEImputer(epochs=30, random_state=0).fit(X),
            KNNImputer(n_neighbors=5).fit(X),
            MICEImputer(random_state=0).fit(X),
            MeanImputer().fit(X),
        ]
        for case in range(100):
            q = rng.normal(1.0, 2.0, size=(4, 5))
            mask = (rng.random(q.shape) < 0.55).astype(float)
            mask[:, rng.integers(0, 5)] = 1.0  # keep every row imputable
            observed = mask == 1.0
            for imputer in imputers:
                out = imputer.impute(q, mask, seed=case)
                same = out[observed] == q[observed]
                assert same.all(), f"{type(imputer).__name__}, fixture {case}"


def test_08_oracle_equivalence_knn_and_mice():
    with Gate(8, "k-NN matches brute force to 1e-12; MICE recovers linear law to 1e-6"):
        rng = np.random.default_rng(3)
        for case in range(50):
            n = int(rng.integers(5, 31))
            d = int(rng.integers(2, 6))
            reference = np.round(rng.normal(size=(n, d)), 3)
            k = int(rng.integers(1, n + 1))
            imputer = KNNImputer(n_neighbors=k).fit(reference)
            q = np.round(rng.normal(size=(3, d)), 3)
            mask = np.ones_like(q)
            for row in mask:
                row[rng.choice(d, size=int(rng.integers(1, d)), replace=False)] = 0.0
            out = imputer.impute(q, mask)
            for i in range(q.shape[0]):
                expected = brute_force_knn(reference, q[i], mask[i] == 1.0, k)
                for j, val in expected.items():
                    assert abs(out[i, j] - val) <= 1e-12, f"fixture {case}, row {i}"

        x1 = rng.normal(size=300)
        x3 = rng.normal(size=300)
        X = np.column_stack([x1, 2.0 * x1, x3])
        mice = MICEImputer(ridge=1e-8, residual_noise=False, random_state=0).fit(X)
        q = np.column_stack([rng.normal(size=40), np.zeros(40), rng.normal(size=40)])
        mask = np.ones_like(q)
        mask[:, 1] = 0.0
        out = mice.impute(q, mask)
        assert np.abs(out[:, 1] - 2.0 * q[:, 0]).max() < 1e-6


DESK_SEED = 2024


@pytest.fixture(scope="module")
def desk_scale_report():
    config = ExperimentConfig(
        datasets=[DatasetSpec(name="twonorm", synthetic="twonorm", n=2000, d=20)],
        imputers=[
            ImputerSpec(kind="mean", name="mean"),
            ImputerSpec(kind="wgain", name="wgain"),
            ImputerSpec(kind="gain", name="gain"),
        ],
        output_dir="unused",
        levels=(0.2,),
        repeats=5,
        seed=DESK_SEED,
        classifiers=("logistic", "knn", "naive_bayes"),
        classifier_budget=20,
    )
    start = time.perf_counter()
    report = run(config)
    return report, time.perf_counter() - start


@pytest.mark.parametrize("model", ["wgain", "gain"])
def test_09_desk_scale_end_to_end(desk_scale_report, model):
    with Gate(9, f"desk-scale twonorm: {model} beats mean imputation, accuracy near clean"):
        report, elapsed = desk_scale_report
        assert elapsed < 300.0, f"runtime {elapsed:.0f}s exceeds 5 minutes"
        clean = report.clean_accuracy["twonorm"]
        mean_rmse = report.rmse[0, report.imputers.index("mean"), 0]
        idx = report.imputers.index(model)
        model_rmse = report.rmse[0, idx, 0]
        model_acc = report.accuracy[0, idx, 0]
        print(
            f"  {model}: rmse {model_rmse:.4f} vs mean-imputer {mean_rmse:.4f}; "
            f"accuracy {model_acc:.4f} vs clean {clean:.4f}"
        )
        assert model_rmse < mean_rmse, (
            f"{model} RMSE {model_rmse:.4f} is not strictly below "
            f"mean imputation {mean_rmse:.4f}"
        )
        assert clean - model_acc < 0.03, (
            f"{model} accuracy {model_acc:.4f} is more than 3pp below clean {clean:.4f}"
        )


def test_10_reports_are_byte_identical_for_same_seed(tmp_path):
    with Gate(10, "same master seed -> byte-identical report files"):
        def build(out_dir):
            return ExperimentConfig(
                datasets=[
                    DatasetSpec(name="twonorm", synthetic="twonorm", n=240, d=6),
                    DatasetSpec(name="ringnorm", synthetic="ringnorm", n=240, d=6),
                ],
                imputers=[
                    ImputerSpec(kind="mean", name="mean"),
                    ImputerSpec(kind="knn", name="knn", params={"n_neighbors": 7}),
                    ImputerSpec(kind="mice", name="mice"),
                ],
                output_dir=str(out_dir),
                levels=(0.2, 0.4),
                repeats=2,
                seed=777,
                classifiers=("logistic", "naive_bayes"),
                classifier_budget=5,
            )

        out_a, out_b = tmp_path / "a", tmp_path / "b"
        write_report(run(build(out_a)), out_a)
        write_report(run(build(out_b)), out_b)
        files_a = {p.name: p.read_bytes() for p in sorted(Path(out_a).iterdir())}
        files_b = {p.name: p.read_bytes() for p in sorted(Path(out_b).iterdir())}
        assert files_a.keys() == files_b.keys()
        for name in files_a:
            assert files_a[name] == files_b[name], f"{name} differs between runs"
