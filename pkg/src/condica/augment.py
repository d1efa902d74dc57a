"""Generative models for surrogate data and the statistical baselines.

The unconditional model learns unmixing + quantile transform + shrunk latent
covariance on abundant unlabeled data; the conditional model reuses a fitted
unmixing, refits the quantile transform on the task sources (pooled over
classes), and estimates per-class latent means with a shared covariance from
class-centered latents.  Sampling runs the encoding pipeline backwards:
latent Gaussian draw, inverse quantile transform, remix through the
pseudo-inverse, then add back the unmixing mean.

Baselines: per-class independent source resampling (ica), a per-class
feature-space Gaussian with shrunk covariance (cov), and source resampling
plus reconstruction-residual Gaussian noise (icacov).
"""

import struct
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .classify import LabeledDataset
from .errors import ContractViolation, InsufficientSamplesError, MissingClassError, ParseError
from .gaussian import (LatentGaussian, fit_class_means, latent_gaussian, ledoit_wolf,
                       psd_cholesky, sample_gaussian)
from .ica import UnmixingModel, fastica_fit, transform
from .linalg import as_matrix
from .quantiles import QuantileTransform, qt_fit, qt_forward, qt_inverse
from .rng import derive_seed, uniform_open

MODEL_MAGIC = b"CICA1"


@dataclass(frozen=True)
class UnconditionalModel:
    """Generative model of unlabeled data; single latent mean fixed at zero."""

    unmixing: UnmixingModel
    qt: QuantileTransform
    latent: LatentGaussian


@dataclass(frozen=True)
class ConditionalICAModel:
    """Class-conditional generator: shared latent covariance, per-class means."""

    unmixing: UnmixingModel
    qt: QuantileTransform
    latent: LatentGaussian
    class_ids: tuple[int, ...]


def fit_unconditional(x_rest, k: int, seed: int = 0, tol: float = 1e-4,
                      max_iter: int = 200, n_quantiles: int | None = None) -> UnconditionalModel:
    """Fit the full pipeline on rest data (p x n): ICA, quantile map, shrinkage."""
    x_rest = as_matrix(x_rest, "rest data")
    n = x_rest.shape[1]
    if n < 2 * k:
        raise ContractViolation(f"need n >= 2k samples to fit the model, got n={n}, k={k}")
    unmixing = fastica_fit(x_rest, k, tol=tol, max_iter=max_iter, seed=seed)
    sources = transform(unmixing, x_rest)
    qt = qt_fit(sources, n_quantiles)
    latents = qt_forward(qt, sources)
    shrunk = ledoit_wolf(latents).sigma_shrunk
    latent = latent_gaussian({0: np.zeros(k)}, shrunk)
    return UnconditionalModel(unmixing=unmixing, qt=qt, latent=latent)


def generate_unconditional(model: UnconditionalModel, n_fakes: int, seed: int = 0) -> np.ndarray:
    """Sample ``n_fakes`` surrogate columns (p x n_fakes)."""
    if n_fakes < 1:
        raise ContractViolation("n_fakes must be >= 1")
    eps = sample_gaussian(model.latent.class_means[0], model.latent.chol, n_fakes, seed)
    sources = qt_inverse(model.qt, eps)
    return model.unmixing.W_pinv @ sources + model.unmixing.mean[:, None]


def fit_conditional(unmixing: UnmixingModel, x_task, labels,
                    n_quantiles: int | None = None) -> ConditionalICAModel:
    """Fine-tune per-class latent means on labeled task data (p x m).

    The quantile transform is refit on the task sources pooled over classes;
    the shared covariance comes from class-centered latents so between-class
    variance is not absorbed into it.
    """
    x_task = as_matrix(x_task, "task data")
    labels = np.asarray(labels, dtype=np.int64)
    if labels.ndim != 1 or labels.size != x_task.shape[1]:
        raise ContractViolation("labels must match the task sample count")
    if x_task.shape[1] < 2:
        raise ContractViolation("need at least 2 task samples")
    ids = tuple(sorted(int(c) for c in np.unique(labels)))
    for c in ids:
        count = int(np.sum(labels == c))
        if count < 2:
            raise InsufficientSamplesError(f"class {c} has {count} samples; need >= 2")
    sources = transform(unmixing, x_task)
    qt = qt_fit(sources, n_quantiles)
    latents = qt_forward(qt, sources)
    means = fit_class_means(latents, labels, ids)
    centered = latents - np.column_stack([means[c] for c in labels])
    shrunk = ledoit_wolf(centered).sigma_shrunk
    latent = latent_gaussian(means, shrunk)
    return ConditionalICAModel(unmixing=unmixing, qt=qt, latent=latent, class_ids=ids)


def generate_conditional(model: ConditionalICAModel, class_id: int, n_fakes: int,
                         seed: int = 0) -> np.ndarray:
    """Sample ``n_fakes`` surrogate columns for one class (p x n_fakes)."""
    class_id = int(class_id)
    if class_id not in model.class_ids:
        raise MissingClassError(f"unknown class {class_id}; model knows {model.class_ids}")
    if n_fakes < 1:
        raise ContractViolation("n_fakes must be >= 1")
    eps = sample_gaussian(model.latent.class_means[class_id], model.latent.chol, n_fakes, seed)
    sources = qt_inverse(model.qt, eps)
    return model.unmixing.W_pinv @ sources + model.unmixing.mean[:, None]


def generate_conditional_all(model: ConditionalICAModel, n_fakes_per_class: int,
                             seed: int = 0) -> LabeledDataset:
    """Sample every class in id order and return a labeled dataset."""
    blocks, labels = [], []
    for c in model.class_ids:
        if n_fakes_per_class > 0:
            blocks.append(generate_conditional(model, c, n_fakes_per_class,
                                               derive_seed(seed, "class", c)))
            labels.extend([c] * n_fakes_per_class)
    x = np.hstack(blocks) if blocks else np.empty((model.unmixing.p, 0))
    return LabeledDataset(X=x, labels=np.asarray(labels, dtype=np.int64),
                          class_ids=model.class_ids)


# ---------------------------------------------------------------------------
# Baselines

def _check_baseline_inputs(x_task, labels, n_fakes_per_class):
    x_task = as_matrix(x_task, "task data")
    labels = np.asarray(labels, dtype=np.int64)
    if labels.ndim != 1 or labels.size != x_task.shape[1]:
        raise ContractViolation("labels must match the task sample count")
    if n_fakes_per_class < 0:
        raise ContractViolation("n_fakes_per_class must be >= 0")
    ids = tuple(sorted(int(c) for c in np.unique(labels)))
    return x_task, labels, ids


def _resample_sources(model: UnmixingModel, x_task, labels, ids, n_fakes_per_class, seed):
    """Per class, resample each source coordinate independently with replacement."""
    sources = transform(model, x_task)
    blocks, fake_labels = [], []
    for c in ids:
        vals = sources[:, labels == c]
        m_c = vals.shape[1]
        if n_fakes_per_class == 0:
            continue
        u = uniform_open(derive_seed(seed, "class", c), (model.k, n_fakes_per_class))
        idx = np.minimum((u * m_c).astype(np.int64), m_c - 1)
        blocks.append(np.take_along_axis(vals, idx, axis=1))
        fake_labels.extend([c] * n_fakes_per_class)
    fake_sources = np.hstack(blocks) if blocks else np.empty((model.k, 0))
    return fake_sources, np.asarray(fake_labels, dtype=np.int64)


def augment_ica(x_task, labels, k: int, n_fakes_per_class: int, seed: int = 0) -> LabeledDataset:
    """ICA baseline: fit ICA on the task data, resample sources per class, remix."""
    x_task, labels, ids = _check_baseline_inputs(x_task, labels, n_fakes_per_class)
    for c in ids:
        if int(np.sum(labels == c)) < 2:
            raise InsufficientSamplesError(f"class {c} has fewer than 2 samples")
    if k > x_task.shape[1]:
        raise ContractViolation("k cannot exceed the task sample count")
    model = fastica_fit(x_task, k, seed=derive_seed(seed, "ica-fit"))
    fake_sources, fake_labels = _resample_sources(model, x_task, labels, ids,
                                                  n_fakes_per_class, derive_seed(seed, "resample"))
    x_fake = model.W_pinv @ fake_sources + model.mean[:, None]
    return LabeledDataset(X=x_fake, labels=fake_labels, class_ids=ids)


def augment_covariance(x_task, labels, n_fakes_per_class: int, seed: int = 0) -> LabeledDataset:
    """Covariance baseline: per-class Gaussian with shared shrunk covariance."""
    x_task, labels, ids = _check_baseline_inputs(x_task, labels, n_fakes_per_class)
    if x_task.shape[1] < 2:
        raise ContractViolation("need at least 2 task samples")
    means = fit_class_means(x_task, labels, ids)
    centered = x_task - np.column_stack([means[c] for c in labels])
    shrunk = ledoit_wolf(centered).sigma_shrunk
    chol = psd_cholesky(shrunk)
    blocks, fake_labels = [], []
    for c in ids:
        if n_fakes_per_class == 0:
            continue
        blocks.append(sample_gaussian(means[c], chol, n_fakes_per_class,
                                      derive_seed(seed, "class", c)))
        fake_labels.extend([c] * n_fakes_per_class)
    x_fake = np.hstack(blocks) if blocks else np.empty((x_task.shape[0], 0))
    return LabeledDataset(X=x_fake, labels=np.asarray(fake_labels, dtype=np.int64), class_ids=ids)


def augment_ica_covariance(x_task, labels, k: int, n_fakes_per_class: int,
                           seed: int = 0) -> LabeledDataset:
    """ICA baseline plus Gaussian noise with the reconstruction-residual covariance."""
    x_task, labels, ids = _check_baseline_inputs(x_task, labels, n_fakes_per_class)
    for c in ids:
        if int(np.sum(labels == c)) < 2:
            raise InsufficientSamplesError(f"class {c} has fewer than 2 samples")
    if k > x_task.shape[1]:
        raise ContractViolation("k cannot exceed the task sample count")
    # same seed path as augment_ica so the k = p case reduces to it exactly
    model = fastica_fit(x_task, k, seed=derive_seed(seed, "ica-fit"))
    fake_sources, fake_labels = _resample_sources(model, x_task, labels, ids,
                                                  n_fakes_per_class, derive_seed(seed, "resample"))
    x_fake = model.W_pinv @ fake_sources + model.mean[:, None]
    residual = (x_task - model.mean[:, None]) - model.W_pinv @ transform(model, x_task)
    shrunk = ledoit_wolf(residual).sigma_shrunk
    chol = psd_cholesky(shrunk)
    if x_fake.shape[1]:
        x_fake = x_fake + sample_gaussian(np.zeros(x_task.shape[0]), chol, x_fake.shape[1],
                                          derive_seed(seed, "residual-noise"))
    return LabeledDataset(X=x_fake, labels=fake_labels, class_ids=ids)


# ---------------------------------------------------------------------------
# Serialization: one binary container for both model kinds.
#
# Layout (little-endian): magic "CICA1", u8 kind (0 unconditional,
# 1 conditional), u64 k/p/n_quantiles/n_classes, f64 clip_epsilon,
# u8 converged, u64 iterations_used, i64 class ids, then row-major f64
# payloads: mean, W, W_pinv, whitening, rotation, levels, landmarks,
# covariance, class means in id order.

def _write_array(fh, arr: np.ndarray) -> None:
    fh.write(np.ascontiguousarray(arr, dtype="<f8").tobytes())


def _read_array(fh, shape) -> np.ndarray:
    count = int(np.prod(shape)) if shape else 1
    raw = fh.read(8 * count)
    if len(raw) != 8 * count:
        raise ParseError("model file truncated")
    return np.frombuffer(raw, dtype="<f8").reshape(shape).astype(np.float64)


def save_model(model: UnconditionalModel | ConditionalICAModel, path) -> None:
    """Write a fitted model to the versioned binary container."""
    if isinstance(model, UnconditionalModel):
        kind, class_ids = 0, (0,)
    elif isinstance(model, ConditionalICAModel):
        kind, class_ids = 1, model.class_ids
    else:
        raise ContractViolation(f"cannot serialize {type(model).__name__}")
    um, qt, latent = model.unmixing, model.qt, model.latent
    with open(path, "wb") as fh:
        fh.write(MODEL_MAGIC)
        fh.write(struct.pack("<B", kind))
        fh.write(struct.pack("<4Q", um.k, um.p, qt.n_quantiles, len(class_ids)))
        fh.write(struct.pack("<d", qt.clip_epsilon))
        fh.write(struct.pack("<B", 1 if um.converged else 0))
        fh.write(struct.pack("<Q", um.iterations_used))
        fh.write(struct.pack(f"<{len(class_ids)}q", *class_ids))
        _write_array(fh, um.mean)
        _write_array(fh, um.W)
        _write_array(fh, um.W_pinv)
        _write_array(fh, um.whitening)
        _write_array(fh, um.rotation)
        _write_array(fh, qt.levels)
        _write_array(fh, qt.landmarks)
        _write_array(fh, latent.covariance)
        for c in class_ids:
            _write_array(fh, latent.class_means[c])


def load_model(path) -> UnconditionalModel | ConditionalICAModel:
    """Reload a model saved by :func:`save_model`; enough to generate without refitting."""
    path = Path(path)
    try:
        fh = open(path, "rb")
    except OSError as exc:
        raise ParseError(f"cannot open {path}: {exc}") from exc
    with fh:
        magic = fh.read(len(MODEL_MAGIC))
        if magic != MODEL_MAGIC:
            raise ParseError(f"{path}: bad magic {magic!r}, expected {MODEL_MAGIC!r}")
        (kind,) = struct.unpack("<B", fh.read(1))
        if kind not in (0, 1):
            raise ParseError(f"{path}: unknown model kind {kind}")
        k, p, n_quantiles, n_classes = struct.unpack("<4Q", fh.read(32))
        (clip_epsilon,) = struct.unpack("<d", fh.read(8))
        (converged,) = struct.unpack("<B", fh.read(1))
        (iterations,) = struct.unpack("<Q", fh.read(8))
        class_ids = struct.unpack(f"<{n_classes}q", fh.read(8 * n_classes))
        mean = _read_array(fh, (p,))
        w = _read_array(fh, (k, p))
        w_pinv = _read_array(fh, (p, k))
        whitening = _read_array(fh, (k, p))
        rotation = _read_array(fh, (k, k))
        levels = _read_array(fh, (n_quantiles,))
        landmarks = _read_array(fh, (k, n_quantiles))
        covariance = _read_array(fh, (k, k))
        means = {c: _read_array(fh, (k,)) for c in class_ids}
    unmixing = UnmixingModel(k=int(k), p=int(p), W=w, W_pinv=w_pinv, mean=mean,
                             converged=bool(converged), iterations_used=int(iterations),
                             whitening=whitening, rotation=rotation)
    qt = QuantileTransform(k=int(k), n_quantiles=int(n_quantiles), levels=levels,
                           landmarks=landmarks, clip_epsilon=clip_epsilon)
    latent = latent_gaussian(means, covariance)
    if kind == 0:
        return UnconditionalModel(unmixing=unmixing, qt=qt, latent=latent)
    return ConditionalICAModel(unmixing=unmixing, qt=qt, latent=latent,
                               class_ids=tuple(int(c) for c in class_ids))
