"""Conditional ICA data augmentation toolkit.

Learns a generative model (ICA unmixing, invertible quantile transform,
shrunk latent Gaussian) from abundant unlabeled data, fine-tunes per-class
latent means on scarce labeled data, and synthesizes surrogate samples to
augment classifier training.  Ships statistical baseline generators,
evaluation classifiers and a reproducible benchmark harness with a CLI.
"""

from .augment import (ConditionalICAModel, UnconditionalModel, augment_covariance,
                      augment_ica, augment_ica_covariance, fit_conditional,
                      fit_unconditional, generate_conditional, generate_conditional_all,
                      generate_unconditional, load_model, save_model)
from .bench import (AugmentBenchConfig, BenchReport, FakeVsRealConfig, SweepKConfig,
                    amari_index, exp_augmentation_benchmark, exp_fake_vs_real,
                    exp_sensitivity_k)
from .classify import (ClassifierSpec, FitReport, LabeledDataset, evaluate, kfold_cv,
                       lda_fit, lda_predict, logreg_fit, make_dataset, mlp_fit,
                       paired_t_test)
from .gaussian import (LatentGaussian, ShrinkageResult, fit_class_means, latent_gaussian,
                       ledoit_wolf, sample_gaussian)
from .ica import UnmixingModel, fastica_fit, transform, whiten
from .quantiles import QuantileTransform, normal_cdf, normal_ppf, qt_fit, qt_forward, qt_inverse
from .synthetic import SyntheticSpec, gen_synthetic_rest, gen_synthetic_task

__version__ = "0.1.0"

__all__ = [
    "AugmentBenchConfig", "BenchReport", "ClassifierSpec", "ConditionalICAModel",
    "FakeVsRealConfig", "FitReport", "LabeledDataset", "LatentGaussian",
    "QuantileTransform", "ShrinkageResult", "SweepKConfig", "SyntheticSpec",
    "UnconditionalModel", "UnmixingModel", "amari_index", "augment_covariance",
    "augment_ica", "augment_ica_covariance", "evaluate", "exp_augmentation_benchmark",
    "exp_fake_vs_real", "exp_sensitivity_k", "fastica_fit", "fit_class_means",
    "fit_conditional", "fit_unconditional", "gen_synthetic_rest", "gen_synthetic_task",
    "generate_conditional", "generate_conditional_all", "generate_unconditional",
    "kfold_cv", "latent_gaussian", "lda_fit", "lda_predict", "ledoit_wolf",
    "load_model", "logreg_fit", "make_dataset", "mlp_fit", "normal_cdf", "normal_ppf",
    "paired_t_test", "qt_fit", "qt_forward", "qt_inverse", "sample_gaussian",
    "save_model", "transform", "whiten",
]
