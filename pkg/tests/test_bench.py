import json

import numpy as np
import pytest

from condica.bench import (AugmentBenchConfig, BenchReport, FakeVsRealConfig,
                           SweepKConfig, amari_index, exp_augmentation_benchmark,
                           exp_fake_vs_real, exp_sensitivity_k)
from condica.errors import ConfigError, ContractViolation
from condica.rng import normal_draws

TINY_FVR = FakeVsRealConfig(p=12, k=6, k_true=6, n_rest=1500, folds=3,
                            methods=("condica", "ica"), classifiers=("lda",),
                            n_quantiles=100, seed=21)

TINY_AUG = AugmentBenchConfig(p=12, k=6, k_true=6, n_rest=2000, n_classes=3,
                              train_per_class=12, test_per_class=25,
                              class_separation=2.5, n_fakes_per_class=24,
                              methods=("none", "condica", "ica"),
                              classifiers=("lda",), n_splits=3, n_quantiles=30,
                              seed=22)


class TestAmariIndex:
    def test_identity_is_zero(self):
        assert amari_index(np.eye(4)) == pytest.approx(0.0, abs=1e-12)

    def test_signed_scaled_permutation_is_zero(self):
        p = np.array([[0.0, -3.0, 0.0], [0.5, 0.0, 0.0], [0.0, 0.0, 2.0]])
        assert amari_index(p) == pytest.approx(0.0, abs=1e-12)

    def test_all_ones_closed_form(self):
        # rows: sum/max - 1 = 1 each; columns likewise; total 4/(2*2*1) = 1
        assert amari_index(np.ones((2, 2))) == pytest.approx(1.0)

    def test_rejects_rectangular_and_tiny(self):
        with pytest.raises(ContractViolation):
            amari_index(np.ones((2, 3)))
        with pytest.raises(ContractViolation):
            amari_index(np.ones((1, 1)))

    def test_partial_mixing_between_bounds(self):
        p = np.eye(3) + 0.3 * normal_draws(1, (3, 3))
        value = amari_index(p)
        assert 0.0 < value < 1.0


@pytest.fixture(scope="module")
def fvr_report():
    return exp_fake_vs_real(TINY_FVR)


@pytest.fixture(scope="module")
def aug_report():
    return exp_augmentation_benchmark(TINY_AUG)


class TestFakeVsReal:
    @pytest.fixture
    def report(self, fvr_report):
        return fvr_report

    def test_all_cells_present(self, report):
        for method in TINY_FVR.methods:
            for clf in TINY_FVR.classifiers:
                cell = report.cell(method, clf)
                assert len(cell.per_split_accuracy) == TINY_FVR.folds
                assert 0.0 <= cell.mean_accuracy <= 1.0

    def test_p_values_in_unit_interval(self, report):
        for comp in report.comparisons:
            if comp.p is not None:
                assert 0.0 < comp.p <= 1.0

    def test_zero_fakes_is_config_error(self):
        from dataclasses import replace
        with pytest.raises(ConfigError):
            exp_fake_vs_real(replace(TINY_FVR, n_fakes=0))

    def test_unknown_method_fails_before_compute(self):
        from dataclasses import replace
        with pytest.raises(ConfigError):
            exp_fake_vs_real(replace(TINY_FVR, methods=("condica", "nope")))
        with pytest.raises(ConfigError):
            exp_fake_vs_real(replace(TINY_FVR, classifiers=("svm",)))
        with pytest.raises(ConfigError):
            exp_fake_vs_real(replace(TINY_FVR, methods=("none",)))

    def test_rerun_bit_identical(self, report):
        again = exp_fake_vs_real(TINY_FVR)
        assert again.to_dict(include_runtime=False) == report.to_dict(include_runtime=False)

    def test_adding_method_never_changes_other_cells(self, report):
        from dataclasses import replace
        solo = exp_fake_vs_real(replace(TINY_FVR, methods=("ica",)))
        assert (solo.cell("ica", "lda").per_split_accuracy
                == report.cell("ica", "lda").per_split_accuracy)

    def test_round_trip_lossless(self, report):
        blob = json.dumps(report.to_dict())
        again = BenchReport.from_dict(json.loads(blob))
        assert again.to_dict() == report.to_dict()


class TestAugmentationBenchmark:
    @pytest.fixture
    def report(self, aug_report):
        return aug_report

    def test_cells_and_comparisons_present(self, report):
        for method in TINY_AUG.methods:
            cell = report.cell(method, "lda")
            assert len(cell.per_split_accuracy) == TINY_AUG.n_splits
        baselines = {(c.method, c.baseline) for c in report.comparisons}
        assert ("ica", "original") in baselines
        assert ("ica", "condica") in baselines

    def test_self_comparison_is_na(self, report):
        assert report.comparison("none", "lda", "original").p is None
        assert report.comparison("condica", "lda", "condica").p is None

    def test_original_runs_with_zero_fakes(self):
        from dataclasses import replace
        cfg = replace(TINY_AUG, methods=("none",), n_fakes_per_class=0)
        report = exp_augmentation_benchmark(cfg)
        assert len(report.cells) == 1

    def test_rerun_bit_identical(self, report):
        again = exp_augmentation_benchmark(TINY_AUG)
        assert again.to_dict(include_runtime=False) == report.to_dict(include_runtime=False)

    def test_adding_method_never_changes_other_cells(self, report):
        from dataclasses import replace
        solo = exp_augmentation_benchmark(replace(TINY_AUG, methods=("none", "ica")))
        assert (solo.cell("ica", "lda").per_split_accuracy
                == report.cell("ica", "lda").per_split_accuracy)

    def test_round_trip_lossless(self, report):
        blob = json.dumps(report.to_dict())
        assert BenchReport.from_dict(json.loads(blob)).to_dict() == report.to_dict()


class TestFullScalePreset:
    def test_preset_applies_to_both_configs(self):
        from condica.bench import FULL_SCALE_OVERRIDES, full_scale
        fvr = full_scale(FakeVsRealConfig())
        aug = full_scale(AugmentBenchConfig())
        for cfg in (fvr, aug):
            assert cfg.p == 1024 and cfg.k == 900 and cfg.k_true == 900
            assert cfg.mlp_hidden == (1024, 1024)
            assert cfg.mlp_batch == 32 and cfg.mlp_lr == pytest.approx(1e-4)
        assert set(FULL_SCALE_OVERRIDES) <= set(vars(aug))


class TestSweepK:
    def test_single_point_equals_benchmark_cell(self):
        report = exp_augmentation_benchmark(TINY_AUG)
        points = exp_sensitivity_k(SweepKConfig(bench=TINY_AUG, k_grid=(TINY_AUG.k,),
                                                classifier="lda"))
        assert points[0].error is None
        assert points[0].per_split_accuracy == report.cell("condica", "lda").per_split_accuracy

    def test_oversized_k_recorded_and_run_continues(self):
        points = exp_sensitivity_k(SweepKConfig(bench=TINY_AUG, k_grid=(4, 10_000, 6),
                                                classifier="lda"))
        assert points[0].error is None
        assert points[1].error is not None and "exceeds" in points[1].error
        assert points[2].error is None

    def test_unknown_classifier(self):
        with pytest.raises(ConfigError):
            exp_sensitivity_k(SweepKConfig(bench=TINY_AUG, k_grid=(4,), classifier="rf"))
