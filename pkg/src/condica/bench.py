"""Benchmark experiments at desk scale, with deterministic reports.

Every experiment is a pure function of its config (which carries the root
seed): per-split data partitions derive from (seed, split index) only, so
they align across methods for paired comparisons, while method-internal
randomness additionally folds in the method name, so adding a method never
changes another method's numbers.  Wall-clock runtimes are collected on the
report object but kept out of the CSV/JSON outputs, which must be
bit-identical across reruns.
"""

import time
from dataclasses import asdict, dataclass, field, replace

import numpy as np

from .augment import (augment_covariance, augment_ica, augment_ica_covariance,
                      fit_conditional, fit_unconditional, generate_conditional_all,
                      generate_unconditional)
from .classify import (ClassifierSpec, LabeledDataset, concat_datasets, evaluate,
                       kfold_cv, paired_t_test)
from .errors import CondicaError, ConfigError, ContractViolation, DegenerateTestError
from .ica import fastica_fit
from .linalg import as_matrix
from .rng import derive_seed, generator
from .synthetic import SyntheticSpec, gen_synthetic_rest, gen_synthetic_task, rest_spec_for_task

GENERATIVE_METHODS = ("condica", "ica", "cov", "icacov")
AUGMENT_METHODS = ("none",) + GENERATIVE_METHODS
CLASSIFIER_KINDS = ("lda", "logreg", "mlp")


def amari_index(p) -> float:
    """Permutation- and scale-invariant mixing error of a square matrix.

    Zero iff the matrix is a scaled permutation; roughly 1 for complete
    mixing.  Apply to ``W_estimated @ A_true``.
    """
    p = as_matrix(p, "amari_index input")
    k = p.shape[0]
    if p.shape[1] != k or k < 2:
        raise ContractViolation("amari_index needs a square matrix of size >= 2")
    a = np.abs(p)
    row_max = a.max(axis=1)
    col_max = a.max(axis=0)
    if not (row_max.all() and col_max.all()):
        raise ContractViolation("amari_index is undefined with an all-zero row or column")
    rows = (a.sum(axis=1) / row_max - 1.0).sum()
    cols = (a.sum(axis=0) / col_max - 1.0).sum()
    return float((rows + cols) / (2.0 * k * (k - 1)))


# ---------------------------------------------------------------------------
# Configs

@dataclass(frozen=True)
class FakeVsRealConfig:
    """Fake-vs-real discrimination experiment on synthetic rest data."""

    p: int = 64
    k: int = 32
    k_true: int = 32
    n_rest: int = 50000
    latent_correlation: float = 0.3
    source_family: str = "laplace"
    noise_scale: float = 0.01
    n_fakes: int | None = None    # None selects equal fake volume
    methods: tuple[str, ...] = GENERATIVE_METHODS
    classifiers: tuple[str, ...] = CLASSIFIER_KINDS
    folds: int = 5
    seed: int = 0
    ica_tol: float = 1e-4
    ica_max_iter: int = 200
    n_quantiles: int = 1000
    logreg_grid: tuple[float, ...] = (1.0,)
    logreg_max_iter: int = 20000
    mlp_hidden: tuple[int, ...] = (64, 64)
    mlp_lr: float = 1e-3
    mlp_batch: int = 256
    mlp_epochs: int = 8
    mlp_l2: float = 1e-5


@dataclass(frozen=True)
class AugmentBenchConfig:
    """Few-shot augmentation benchmark on synthetic task data."""

    p: int = 64
    k: int = 32
    k_true: int = 32
    n_rest: int = 50000
    latent_correlation: float = 0.3
    source_family: str = "laplace"
    noise_scale: float = 0.01
    n_classes: int = 10
    train_per_class: int = 20
    test_per_class: int = 200
    class_separation: float = 3.0
    n_fakes_per_class: int = 40   # 2:1 fake:real ratio
    methods: tuple[str, ...] = AUGMENT_METHODS
    classifiers: tuple[str, ...] = CLASSIFIER_KINDS
    n_splits: int = 5
    seed: int = 0
    ica_tol: float = 1e-4
    ica_max_iter: int = 200
    n_quantiles: int = 200
    logreg_grid: tuple[float, ...] = (1e-4, 1e-3, 1e-2, 1e-1, 1.0)
    logreg_max_iter: int = 20000
    mlp_hidden: tuple[int, ...] = (64, 64)
    mlp_lr: float = 1e-3
    mlp_batch: int = 32
    mlp_epochs: int = 60
    mlp_l2: float = 1e-5


@dataclass(frozen=True)
class SweepKConfig:
    """Component-count sensitivity sweep of the conditional model."""

    bench: AugmentBenchConfig = field(default_factory=AugmentBenchConfig)
    k_grid: tuple[int, ...] = (2, 4, 8, 16, 32)
    classifier: str = "lda"


# full-size preset: 1024 features, 900 components, and the classifier
# settings used at that scale; far too slow for CI
FULL_SCALE_OVERRIDES = {
    "p": 1024,
    "k": 900,
    "k_true": 900,
    "mlp_hidden": (1024, 1024),
    "mlp_batch": 32,
    "mlp_lr": 1e-4,
}


def full_scale(config):
    """Return a copy of a bench config at the full-size preset."""
    return replace(config, **FULL_SCALE_OVERRIDES)


def _classifier_spec(kind: str, cfg) -> ClassifierSpec:
    if kind == "lda":
        return ClassifierSpec("lda")
    if kind == "logreg":
        return ClassifierSpec("logreg", {"l2_inverse_strengths": tuple(cfg.logreg_grid),
                                         "max_iter": cfg.logreg_max_iter})
    if kind == "mlp":
        return ClassifierSpec("mlp", {"hidden_sizes": tuple(cfg.mlp_hidden), "lr": cfg.mlp_lr,
                                      "batch": cfg.mlp_batch, "l2": cfg.mlp_l2,
                                      "epochs": cfg.mlp_epochs})
    raise ConfigError(f"unknown classifier {kind!r}")


def _validate_names(methods, classifiers, allowed_methods) -> None:
    for m in methods:
        if m not in allowed_methods:
            raise ConfigError(f"unknown method {m!r}, expected one of {allowed_methods}")
    if not methods:
        raise ConfigError("at least one method is required")
    for c in classifiers:
        if c not in CLASSIFIER_KINDS:
            raise ConfigError(f"unknown classifier {c!r}, expected one of {CLASSIFIER_KINDS}")
    if not classifiers:
        raise ConfigError("at least one classifier is required")


# ---------------------------------------------------------------------------
# Report structures

@dataclass
class BenchCell:
    method: str
    classifier: str
    mean_accuracy: float
    std_accuracy: float
    mean_precision: float
    std_precision: float
    mean_recall: float
    std_recall: float
    per_split_accuracy: list[float]


@dataclass
class Comparison:
    method: str
    classifier: str
    baseline: str
    t: float | None
    p: float | None


@dataclass
class BenchReport:
    kind: str
    cells: list[BenchCell]
    comparisons: list[Comparison]
    runtime_seconds: dict[str, float]
    config: dict
    seed: int

    def cell(self, method: str, classifier: str) -> BenchCell:
        for c in self.cells:
            if c.method == method and c.classifier == classifier:
                return c
        raise KeyError(f"no cell for ({method}, {classifier})")

    def comparison(self, method: str, classifier: str, baseline: str) -> Comparison:
        for c in self.comparisons:
            if (c.method, c.classifier, c.baseline) == (method, classifier, baseline):
                return c
        raise KeyError(f"no comparison for ({method}, {classifier}, {baseline})")

    def to_dict(self, include_runtime: bool = True) -> dict:
        d = {
            "kind": self.kind,
            "seed": self.seed,
            "config": self.config,
            "cells": [asdict(c) for c in self.cells],
            "comparisons": [asdict(c) for c in self.comparisons],
        }
        if include_runtime:
            d["runtime_seconds"] = dict(self.runtime_seconds)
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "BenchReport":
        return cls(
            kind=d["kind"],
            cells=[BenchCell(**c) for c in d["cells"]],
            comparisons=[Comparison(**c) for c in d["comparisons"]],
            runtime_seconds=dict(d.get("runtime_seconds", {})),
            config=d["config"],
            seed=d["seed"],
        )


def _jsonable(value):
    """Recursively convert tuples to lists so reports round-trip through JSON."""
    if isinstance(value, dict):
        return {k: _jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_jsonable(v) for v in value]
    return value


def _cell_from_lists(method, classifier, accs, precs, recs) -> BenchCell:
    return BenchCell(
        method=method, classifier=classifier,
        mean_accuracy=float(np.mean(accs)), std_accuracy=float(np.std(accs)),
        mean_precision=float(np.mean(precs)), std_precision=float(np.std(precs)),
        mean_recall=float(np.mean(recs)), std_recall=float(np.std(recs)),
        per_split_accuracy=[float(a) for a in accs],
    )


def _compare(cells: dict, methods, classifiers, baseline_method: str, label: str):
    comparisons = []
    for m in methods:
        for c in classifiers:
            if m == baseline_method:
                comparisons.append(Comparison(m, c, label, None, None))
                continue
            try:
                t, p = paired_t_test(cells[(m, c)].per_split_accuracy,
                                     cells[(baseline_method, c)].per_split_accuracy)
                comparisons.append(Comparison(m, c, label, t, p))
            except DegenerateTestError:
                comparisons.append(Comparison(m, c, label, None, None))
    return comparisons


# ---------------------------------------------------------------------------
# Experiment: distinguish fake from real rest data

def _rest_fakes(method: str, x_real: np.ndarray, cfg: FakeVsRealConfig,
                n_fakes: int, seed: int) -> np.ndarray:
    single_class = np.zeros(x_real.shape[1], dtype=np.int64)
    if method == "condica":
        model = fit_unconditional(x_real, cfg.k, seed=derive_seed(seed, "fit"),
                                  tol=cfg.ica_tol, max_iter=cfg.ica_max_iter,
                                  n_quantiles=cfg.n_quantiles)
        return generate_unconditional(model, n_fakes, derive_seed(seed, "gen"))
    if method == "ica":
        return augment_ica(x_real, single_class, cfg.k, n_fakes, seed).X
    if method == "cov":
        return augment_covariance(x_real, single_class, n_fakes, seed).X
    if method == "icacov":
        return augment_ica_covariance(x_real, single_class, cfg.k, n_fakes, seed).X
    raise ConfigError(f"unknown method {method!r}")


def exp_fake_vs_real(cfg: FakeVsRealConfig) -> BenchReport:
    """Train classifiers to separate generated from observed rest data.

    A faithful generator keeps every classifier at chance (0.5).
    """
    _validate_names(cfg.methods, cfg.classifiers, GENERATIVE_METHODS)
    n_fakes = cfg.n_rest if cfg.n_fakes is None else cfg.n_fakes
    if n_fakes < 1:
        raise ConfigError("n_fakes must be >= 1")
    if cfg.folds < 2:
        raise ConfigError("folds must be >= 2")

    spec = SyntheticSpec(p=cfg.p, k_true=cfg.k_true, n=cfg.n_rest,
                         source_family=cfg.source_family,
                         latent_correlation=cfg.latent_correlation,
                         noise_scale=cfg.noise_scale,
                         seed=derive_seed(cfg.seed, "rest-data"))
    x_real = gen_synthetic_rest(spec)

    cells = {}
    runtimes = {}
    for method in cfg.methods:
        start = time.perf_counter()
        fakes = _rest_fakes(method, x_real, cfg, n_fakes, derive_seed(cfg.seed, "method", method))
        runtimes[method] = time.perf_counter() - start
        labels = np.concatenate([np.zeros(x_real.shape[1], dtype=np.int64),
                                 np.ones(fakes.shape[1], dtype=np.int64)])
        data = LabeledDataset(X=np.hstack([x_real, fakes]), labels=labels, class_ids=(0, 1))
        for clf in cfg.classifiers:
            report = kfold_cv(data, cfg.folds, _classifier_spec(clf, cfg),
                              seed=derive_seed(cfg.seed, "cv", clf))
            cells[(method, clf)] = _cell_from_lists(method, clf, report.per_fold,
                                                    report.per_fold_precision,
                                                    report.per_fold_recall)

    comparisons = []
    if "condica" in cfg.methods:
        comparisons = _compare(cells, cfg.methods, cfg.classifiers, "condica", "condica")
    return BenchReport(kind="fake_vs_real", cells=list(cells.values()),
                       comparisons=comparisons, runtime_seconds=runtimes,
                       config=_jsonable(asdict(cfg)), seed=cfg.seed)


# ---------------------------------------------------------------------------
# Experiment: augmentation benchmark on task data

def _stratified_split(task: LabeledDataset, train_per_class: int, test_per_class: int,
                      seed: int) -> tuple[LabeledDataset, LabeledDataset]:
    gen = generator(seed)
    train_idx, test_idx = [], []
    for c in task.class_ids:
        idx = np.flatnonzero(task.labels == c)
        if idx.size < train_per_class + test_per_class:
            raise ConfigError(f"class {c} has {idx.size} samples, need "
                              f"{train_per_class + test_per_class}")
        idx = idx[gen.permutation(idx.size)]
        train_idx.extend(idx[:train_per_class])
        test_idx.extend(idx[train_per_class:train_per_class + test_per_class])
    train_idx = np.sort(np.asarray(train_idx))
    test_idx = np.sort(np.asarray(test_idx))
    train = LabeledDataset(task.X[:, train_idx], task.labels[train_idx], task.class_ids)
    test = LabeledDataset(task.X[:, test_idx], task.labels[test_idx], task.class_ids)
    return train, test


def _task_fakes(method: str, train: LabeledDataset, unmixing, cfg: AugmentBenchConfig,
                seed: int) -> LabeledDataset | None:
    if method == "none":
        return None
    if method == "condica":
        model = fit_conditional(unmixing, train.X, train.labels, cfg.n_quantiles)
        return generate_conditional_all(model, cfg.n_fakes_per_class, seed)
    if method == "ica":
        return augment_ica(train.X, train.labels, cfg.k, cfg.n_fakes_per_class, seed)
    if method == "cov":
        return augment_covariance(train.X, train.labels, cfg.n_fakes_per_class, seed)
    if method == "icacov":
        return augment_ica_covariance(train.X, train.labels, cfg.k, cfg.n_fakes_per_class, seed)
    raise ConfigError(f"unknown method {method!r}")


def exp_augmentation_benchmark(cfg: AugmentBenchConfig) -> BenchReport:
    """Measure classifier accuracy with and without generated training data."""
    _validate_names(cfg.methods, cfg.classifiers, AUGMENT_METHODS)
    if cfg.n_splits < 2:
        raise ConfigError("n_splits must be >= 2")
    if cfg.n_fakes_per_class < 0:
        raise ConfigError("n_fakes_per_class must be >= 0")

    task_spec = SyntheticSpec(p=cfg.p, k_true=cfg.k_true,
                              n=(cfg.train_per_class + cfg.test_per_class) * cfg.n_classes,
                              source_family=cfg.source_family,
                              latent_correlation=cfg.latent_correlation,
                              n_classes=cfg.n_classes,
                              class_separation=cfg.class_separation,
                              noise_scale=cfg.noise_scale,
                              seed=derive_seed(cfg.seed, "data"))
    task = gen_synthetic_task(task_spec)
    unmixing = None
    if "condica" in cfg.methods:
        rest = gen_synthetic_rest(rest_spec_for_task(task_spec, cfg.n_rest))
        unmixing = fastica_fit(rest, cfg.k, tol=cfg.ica_tol, max_iter=cfg.ica_max_iter,
                               seed=derive_seed(cfg.seed, "rest-ica", cfg.k))

    acc = {(m, c): [] for m in cfg.methods for c in cfg.classifiers}
    prec = {key: [] for key in acc}
    rec = {key: [] for key in acc}
    runtimes = {m: 0.0 for m in cfg.methods}
    for s in range(cfg.n_splits):
        train, test = _stratified_split(task, cfg.train_per_class, cfg.test_per_class,
                                        derive_seed(cfg.seed, "split", s))
        for method in cfg.methods:
            start = time.perf_counter()
            fakes = _task_fakes(method, train, unmixing, cfg,
                                derive_seed(cfg.seed, "gen", method, s, cfg.k))
            runtimes[method] += time.perf_counter() - start
            augmented = train if fakes is None or fakes.n_samples == 0 else concat_datasets(train, fakes)
            for clf in cfg.classifiers:
                model = _classifier_spec(clf, cfg).fit(
                    augmented, derive_seed(cfg.seed, "fit", method, clf, s, cfg.k))
                report = evaluate(model, test)
                acc[(method, clf)].append(report.accuracy)
                prec[(method, clf)].append(report.macro_precision)
                rec[(method, clf)].append(report.macro_recall)

    cells = {key: _cell_from_lists(key[0], key[1], acc[key], prec[key], rec[key])
             for key in acc}
    comparisons = []
    if "none" in cfg.methods:
        comparisons += _compare(cells, cfg.methods, cfg.classifiers, "none", "original")
    if "condica" in cfg.methods:
        comparisons += _compare(cells, cfg.methods, cfg.classifiers, "condica", "condica")
    return BenchReport(kind="augmentation", cells=list(cells.values()),
                       comparisons=comparisons, runtime_seconds=runtimes,
                       config=_jsonable(asdict(cfg)), seed=cfg.seed)


# ---------------------------------------------------------------------------
# Experiment: sensitivity to the component count

@dataclass
class SweepPoint:
    k: int
    mean_accuracy: float | None
    std_accuracy: float | None
    per_split_accuracy: list[float]
    error: str | None = None


def exp_sensitivity_k(cfg: SweepKConfig) -> list[SweepPoint]:
    """Rerun the conditional-model augmentation benchmark over a grid of k.

    Splits are fixed across the grid.  A failing k is recorded as an error
    row and the sweep continues.
    """
    bench = cfg.bench
    if cfg.classifier not in CLASSIFIER_KINDS:
        raise ConfigError(f"unknown classifier {cfg.classifier!r}")
    if not cfg.k_grid:
        raise ConfigError("k_grid must not be empty")
    if bench.n_splits < 2:
        raise ConfigError("n_splits must be >= 2")

    task_spec = SyntheticSpec(p=bench.p, k_true=bench.k_true,
                              n=(bench.train_per_class + bench.test_per_class) * bench.n_classes,
                              source_family=bench.source_family,
                              latent_correlation=bench.latent_correlation,
                              n_classes=bench.n_classes,
                              class_separation=bench.class_separation,
                              noise_scale=bench.noise_scale,
                              seed=derive_seed(bench.seed, "data"))
    task = gen_synthetic_task(task_spec)
    rest = gen_synthetic_rest(rest_spec_for_task(task_spec, bench.n_rest))
    splits = [_stratified_split(task, bench.train_per_class, bench.test_per_class,
                                derive_seed(bench.seed, "split", s))
              for s in range(bench.n_splits)]
    n_train = bench.train_per_class * bench.n_classes

    points = []
    for k in cfg.k_grid:
        try:
            if k > n_train:
                raise ContractViolation(f"k={k} exceeds the {n_train} training samples")
            unmixing = fastica_fit(rest, k, tol=bench.ica_tol, max_iter=bench.ica_max_iter,
                                   seed=derive_seed(bench.seed, "rest-ica", k))
            accs = []
            for s, (train, test) in enumerate(splits):
                model = fit_conditional(unmixing, train.X, train.labels, bench.n_quantiles)
                fakes = generate_conditional_all(model, bench.n_fakes_per_class,
                                                 derive_seed(bench.seed, "gen", "condica", s, k))
                augmented = train if fakes.n_samples == 0 else concat_datasets(train, fakes)
                clf = _classifier_spec(cfg.classifier, bench).fit(
                    augmented, derive_seed(bench.seed, "fit", "condica", cfg.classifier, s, k))
                accs.append(evaluate(clf, test).accuracy)
            points.append(SweepPoint(k=int(k), mean_accuracy=float(np.mean(accs)),
                                     std_accuracy=float(np.std(accs)),
                                     per_split_accuracy=[float(a) for a in accs]))
        except CondicaError as exc:
            points.append(SweepPoint(k=int(k), mean_accuracy=None, std_accuracy=None,
                                     per_split_accuracy=[], error=f"{type(exc).__name__}: {exc}"))
    return points
