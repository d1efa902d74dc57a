"""Evaluation classifiers, metrics, cross-validation and the paired t-test.

Three classifiers are provided: LDA with a Ledoit-Wolf shrunk shared
covariance, multinomial logistic regression trained by a deterministic
full-batch quasi-Newton solver with an internal CV grid over the inverse L2
strength, and a two-hidden-layer ReLU MLP trained by a seeded
adaptive-moment optimizer.  All are deterministic under a fixed seed.
"""

from dataclasses import dataclass, field

import numpy as np
import scipy.optimize
from scipy.linalg import solve_triangular
from scipy.special import betainc

from .errors import (ContractViolation, DegenerateTestError, InsufficientSamplesError,
                     NumericalFailure)
from .gaussian import fit_class_means, ledoit_wolf, psd_cholesky
from .linalg import as_matrix
from .rng import derive_seed, generator, normal_draws

LOGREG_GRID = (1e-4, 1e-3, 1e-2, 1e-1, 1.0)


@dataclass(frozen=True)
class LabeledDataset:
    """Feature matrix (p x n) with integer class labels per column."""

    X: np.ndarray
    labels: np.ndarray
    class_ids: tuple[int, ...]

    def __post_init__(self):
        x = np.asarray(self.X, dtype=np.float64)
        labels = np.asarray(self.labels, dtype=np.int64)
        if x.ndim != 2 or x.shape[0] < 1:
            raise ContractViolation("dataset matrix must be 2-d with at least one feature row")
        if not np.all(np.isfinite(x)):
            raise ContractViolation("dataset matrix contains non-finite entries")
        if labels.ndim != 1 or labels.size != x.shape[1]:
            raise ContractViolation("label count must match the sample count")
        ids = tuple(sorted(int(c) for c in self.class_ids))
        if labels.size and not np.isin(labels, ids).all():
            raise ContractViolation("labels contain ids outside the declared class set")
        object.__setattr__(self, "X", x)
        object.__setattr__(self, "labels", labels)
        object.__setattr__(self, "class_ids", ids)

    @property
    def n_samples(self) -> int:
        return self.X.shape[1]

    @property
    def n_features(self) -> int:
        return self.X.shape[0]


def make_dataset(x, labels, class_ids=None) -> LabeledDataset:
    """Build a dataset; the class set defaults to the labels present."""
    labels = np.asarray(labels, dtype=np.int64)
    if class_ids is None:
        class_ids = tuple(sorted(int(c) for c in np.unique(labels)))
    return LabeledDataset(X=np.asarray(x, dtype=np.float64), labels=labels,
                          class_ids=tuple(class_ids))


def concat_datasets(a: LabeledDataset, b: LabeledDataset) -> LabeledDataset:
    """Column-wise concatenation; the class sets are merged."""
    if a.n_features != b.n_features:
        raise ContractViolation("datasets have different feature counts")
    ids = tuple(sorted(set(a.class_ids) | set(b.class_ids)))
    return LabeledDataset(X=np.hstack([a.X, b.X]),
                          labels=np.concatenate([a.labels, b.labels]),
                          class_ids=ids)


@dataclass
class FitReport:
    accuracy: float
    macro_precision: float
    macro_recall: float
    per_fold: list[float] = field(default_factory=list)
    stratified: bool = True
    per_fold_precision: list[float] = field(default_factory=list)
    per_fold_recall: list[float] = field(default_factory=list)


def confusion_metrics(y_true, y_pred, class_ids) -> tuple[float, float, float]:
    """Accuracy and macro precision/recall over the declared classes.

    Classes absent from the predictions contribute precision 0; classes
    absent from the truth contribute recall 0.
    """
    y_true = np.asarray(y_true, dtype=np.int64)
    y_pred = np.asarray(y_pred, dtype=np.int64)
    if y_true.size == 0:
        raise ContractViolation("cannot score an empty label set")
    accuracy = float(np.mean(y_true == y_pred))
    precisions, recalls = [], []
    for c in class_ids:
        tp = np.sum((y_pred == c) & (y_true == c))
        pred_c = np.sum(y_pred == c)
        true_c = np.sum(y_true == c)
        precisions.append(tp / pred_c if pred_c else 0.0)
        recalls.append(tp / true_c if true_c else 0.0)
    return accuracy, float(np.mean(precisions)), float(np.mean(recalls))


def evaluate(model, test: LabeledDataset) -> FitReport:
    """Score ``model.predict`` on a held-out dataset."""
    preds = model.predict(test.X)
    acc, prec, rec = confusion_metrics(test.labels, preds, test.class_ids)
    return FitReport(accuracy=acc, macro_precision=prec, macro_recall=rec)


# ---------------------------------------------------------------------------
# LDA

@dataclass(frozen=True)
class LDAModel:
    class_ids: tuple[int, ...]
    coef: np.ndarray       # (p, C)
    intercept: np.ndarray  # (C,)

    def predict(self, x) -> np.ndarray:
        return lda_predict(self, x)


def lda_fit(data: LabeledDataset) -> LDAModel:
    """LDA with shared Ledoit-Wolf covariance and empirical priors."""
    ids = data.class_ids
    if len(ids) < 2:
        raise ContractViolation("LDA needs at least 2 classes")
    counts = {c: int(np.sum(data.labels == c)) for c in ids}
    for c, cnt in counts.items():
        if cnt < 2:
            raise InsufficientSamplesError(f"class {c} has {cnt} samples; LDA needs >= 2")
    means = fit_class_means(data.X, data.labels, ids)
    centered = data.X - np.column_stack([means[c] for c in data.labels])
    cov = ledoit_wolf(centered).sigma_shrunk
    try:
        chol = psd_cholesky(cov)
        if not chol.diagonal().all():
            raise NumericalFailure("zero pivot")
        mean_mat = np.column_stack([means[c] for c in ids])
        # solve cov @ coef = means via the triangular factors
        tmp = solve_triangular(chol, mean_mat, lower=True)
        coef = solve_triangular(chol.T, tmp, lower=False)
    except NumericalFailure as exc:
        raise NumericalFailure("LDA covariance is singular even after jitter") from exc
    n = data.n_samples
    intercept = np.array([
        -0.5 * means[c] @ coef[:, i] + np.log(counts[c] / n)
        for i, c in enumerate(ids)
    ])
    return LDAModel(class_ids=ids, coef=coef, intercept=intercept)


def lda_predict(model: LDAModel, x) -> np.ndarray:
    x = as_matrix(x, "lda_predict input")
    scores = model.coef.T @ x + model.intercept[:, None]
    # argmax returns the first maximum, so ties resolve to the lowest class id
    return np.asarray(model.class_ids, dtype=np.int64)[np.argmax(scores, axis=0)]


# ---------------------------------------------------------------------------
# Multinomial logistic regression

@dataclass(frozen=True)
class LogRegModel:
    class_ids: tuple[int, ...]
    weights: np.ndarray    # (p, C)
    bias: np.ndarray       # (C,)
    inverse_strength: float
    loss_history: tuple[float, ...] = ()

    def predict(self, x) -> np.ndarray:
        x = as_matrix(x, "logreg predict input")
        scores = self.weights.T @ x + self.bias[:, None]
        return np.asarray(self.class_ids, dtype=np.int64)[np.argmax(scores, axis=0)]


def _softmax_rows(scores: np.ndarray) -> np.ndarray:
    shifted = scores - scores.max(axis=1, keepdims=True)
    np.exp(shifted, out=shifted)
    shifted /= shifted.sum(axis=1, keepdims=True)
    return shifted


def logreg_objective(theta: np.ndarray, x_rows: np.ndarray, y_onehot: np.ndarray,
                     lam: float) -> tuple[float, np.ndarray]:
    """Mean cross-entropy plus (lam/2)*||W||^2; the bias is unpenalized.

    ``theta`` packs the (p, C) weight block followed by the C biases.
    Returns the loss and its gradient in the same packing.
    """
    n, p = x_rows.shape
    c = y_onehot.shape[1]
    w = theta[: p * c].reshape(p, c)
    b = theta[p * c:]
    scores = x_rows @ w + b
    shifted = scores - scores.max(axis=1, keepdims=True)
    log_z = np.log(np.exp(shifted).sum(axis=1))
    log_probs = shifted - log_z[:, None]
    loss = -(y_onehot * log_probs).sum() / n + 0.5 * lam * (w * w).sum()
    resid = _softmax_rows(scores) - y_onehot
    grad_w = x_rows.T @ resid / n + lam * w
    grad_b = resid.mean(axis=0)
    return float(loss), np.concatenate([grad_w.ravel(), grad_b])


def _check_divergence(history: list[float]) -> None:
    if len(history) > 10 and all(
        history[-i] > history[-i - 1] for i in range(1, 11)
    ):
        raise NumericalFailure("logreg optimizer diverged: loss rose over 10 consecutive steps")


def _logreg_minimize(x_rows, y_onehot, lam, max_iter) -> tuple[np.ndarray, list[float]]:
    n, p = x_rows.shape
    c = y_onehot.shape[1]
    theta0 = np.zeros(p * c + c)
    f0, _ = logreg_objective(theta0, x_rows, y_onehot, lam)
    history: list[float] = [f0]

    def watch_divergence(theta):
        f, _ = logreg_objective(theta, x_rows, y_onehot, lam)
        history.append(f)
        _check_divergence(history)

    result = scipy.optimize.minimize(
        logreg_objective, theta0, args=(x_rows, y_onehot, lam), jac=True,
        method="L-BFGS-B", callback=watch_divergence,
        options={"maxiter": max_iter, "maxfun": 2 * max_iter, "gtol": 1e-6, "ftol": 1e-15},
    )
    if not np.all(np.isfinite(result.x)):
        raise NumericalFailure("logreg optimizer produced non-finite weights")
    return result.x, history


def _onehot(labels: np.ndarray, class_ids) -> np.ndarray:
    index = {c: i for i, c in enumerate(class_ids)}
    y = np.zeros((labels.size, len(class_ids)))
    y[np.arange(labels.size), [index[int(c)] for c in labels]] = 1.0
    return y


def _fit_logreg_single(data: LabeledDataset, inverse_strength: float, max_iter: int) -> LogRegModel:
    x_rows = data.X.T
    y = _onehot(data.labels, data.class_ids)
    # total penalty ||W||^2 / (2 C_inv), i.e. lam = 1/(C_inv * n) on the mean loss
    lam = 1.0 / (inverse_strength * data.n_samples)
    theta, history = _logreg_minimize(x_rows, y, lam, max_iter)
    p, c = data.n_features, len(data.class_ids)
    return LogRegModel(class_ids=data.class_ids, weights=theta[: p * c].reshape(p, c),
                       bias=theta[p * c:], inverse_strength=inverse_strength,
                       loss_history=tuple(history))


def logreg_fit(data: LabeledDataset, l2_inverse_strengths=LOGREG_GRID, folds: int = 5,
               max_iter: int = 20000, seed: int = 0) -> LogRegModel:
    """Fit multinomial logistic regression, choosing the L2 strength by CV.

    The grid is scanned in ascending order and ties keep the first (hence
    most regularized) candidate.  A single-element grid skips the CV.
    """
    if len(data.class_ids) < 2:
        raise ContractViolation("logistic regression needs at least 2 classes")
    grid = sorted(float(c) for c in l2_inverse_strengths)
    if not grid or min(grid) <= 0:
        raise ContractViolation("inverse strengths must be positive")
    best = grid[0]
    if len(grid) > 1 and data.n_samples >= 4:
        eff_folds = max(2, min(folds, data.n_samples))
        partitions, _ = _partition_folds(data, eff_folds, derive_seed(seed, "logreg-cv"))
        best_acc = -1.0
        for cand in grid:
            accs = []
            for i in range(eff_folds):
                train, val = _split_by_fold(data, partitions, i)
                model = _fit_logreg_single(train, cand, max_iter)
                accs.append(float(np.mean(model.predict(val.X) == val.labels)))
            acc = float(np.mean(accs))
            if acc > best_acc:
                best_acc, best = acc, cand
    return _fit_logreg_single(data, best, max_iter)


# ---------------------------------------------------------------------------
# MLP

@dataclass(frozen=True)
class MLPModel:
    class_ids: tuple[int, ...]
    weights: tuple[np.ndarray, ...]
    biases: tuple[np.ndarray, ...]
    epoch_losses: tuple[float, ...]

    def predict(self, x) -> np.ndarray:
        x = as_matrix(x, "mlp predict input")
        h = x.T
        for w, b in zip(self.weights[:-1], self.biases[:-1]):
            h = np.maximum(h @ w + b, 0.0)
        scores = h @ self.weights[-1] + self.biases[-1]
        return np.asarray(self.class_ids, dtype=np.int64)[np.argmax(scores, axis=1)]


def mlp_forward_backward(weights, biases, x_rows, y_onehot, l2):
    """Loss and gradients of the ReLU network on one batch.

    The loss is mean softmax cross-entropy plus (l2/2) times the squared
    weight norms (biases unpenalized).
    """
    n = x_rows.shape[0]
    activations = [x_rows]
    h = x_rows
    for w, b in zip(weights[:-1], biases[:-1]):
        h = np.maximum(h @ w + b, 0.0)
        activations.append(h)
    scores = h @ weights[-1] + biases[-1]
    shifted = scores - scores.max(axis=1, keepdims=True)
    log_z = np.log(np.exp(shifted).sum(axis=1))
    loss = float(-(y_onehot * (shifted - log_z[:, None])).sum() / n)
    loss += 0.5 * l2 * sum(float((w * w).sum()) for w in weights)

    delta = (_softmax_rows(scores) - y_onehot) / n
    grads_w, grads_b = [], []
    for layer in range(len(weights) - 1, -1, -1):
        grads_w.append(activations[layer].T @ delta + l2 * weights[layer])
        grads_b.append(delta.sum(axis=0))
        if layer > 0:
            delta = (delta @ weights[layer].T) * (activations[layer] > 0.0)
    return loss, grads_w[::-1], grads_b[::-1]


def mlp_init(sizes, seed: int):
    """He-style scaled normal weight init, zero biases, seeded."""
    weights, biases = [], []
    for layer, (fan_in, fan_out) in enumerate(zip(sizes[:-1], sizes[1:])):
        scale = np.sqrt(2.0 / fan_in)
        weights.append(scale * normal_draws(derive_seed(seed, "init", layer), (fan_in, fan_out)))
        biases.append(np.zeros(fan_out))
    return weights, biases


def mlp_fit(data: LabeledDataset, hidden_sizes=(1024, 1024), lr: float = 1e-4,
            batch: int = 32, l2: float = 1e-5, epochs: int = 200, seed: int = 0) -> MLPModel:
    """Train the ReLU MLP with Adam (beta1=0.9, beta2=0.999, eps=1e-8)."""
    if len(data.class_ids) < 2:
        raise ContractViolation("MLP needs at least 2 classes")
    if any(int(h) < 1 for h in hidden_sizes):
        raise ContractViolation("hidden layer sizes must be >= 1")
    if batch < 1 or epochs < 1 or lr <= 0:
        raise ContractViolation("batch and epochs must be >= 1 and lr > 0")
    sizes = [data.n_features, *(int(h) for h in hidden_sizes), len(data.class_ids)]
    weights, biases = mlp_init(sizes, seed)
    m_w = [np.zeros_like(w) for w in weights]
    v_w = [np.zeros_like(w) for w in weights]
    m_b = [np.zeros_like(b) for b in biases]
    v_b = [np.zeros_like(b) for b in biases]
    beta1, beta2, eps = 0.9, 0.999, 1e-8

    x_rows = data.X.T
    y = _onehot(data.labels, data.class_ids)
    n = data.n_samples
    step = 0
    epoch_losses = []
    for epoch in range(epochs):
        order = generator(derive_seed(seed, "shuffle", epoch)).permutation(n)
        batch_losses = []
        for start in range(0, n, batch):
            idx = order[start:start + batch]
            loss, gw, gb = mlp_forward_backward(weights, biases, x_rows[idx], y[idx], l2)
            if not np.isfinite(loss):
                raise NumericalFailure(f"MLP loss became non-finite at epoch {epoch}")
            batch_losses.append(loss)
            step += 1
            corr1 = 1.0 - beta1**step
            corr2 = 1.0 - beta2**step
            for layer in range(len(weights)):
                m_w[layer] = beta1 * m_w[layer] + (1 - beta1) * gw[layer]
                v_w[layer] = beta2 * v_w[layer] + (1 - beta2) * gw[layer] ** 2
                weights[layer] -= lr * (m_w[layer] / corr1) / (np.sqrt(v_w[layer] / corr2) + eps)
                m_b[layer] = beta1 * m_b[layer] + (1 - beta1) * gb[layer]
                v_b[layer] = beta2 * v_b[layer] + (1 - beta2) * gb[layer] ** 2
                biases[layer] -= lr * (m_b[layer] / corr1) / (np.sqrt(v_b[layer] / corr2) + eps)
        epoch_losses.append(float(np.mean(batch_losses)))
    return MLPModel(class_ids=data.class_ids, weights=tuple(weights), biases=tuple(biases),
                    epoch_losses=tuple(epoch_losses))


# ---------------------------------------------------------------------------
# Cross-validation

@dataclass(frozen=True)
class ClassifierSpec:
    """Named classifier plus fit parameters, used by CV and the bench runs."""

    kind: str
    params: dict = field(default_factory=dict)

    def fit(self, data: LabeledDataset, seed: int):
        if self.kind == "lda":
            return lda_fit(data)
        if self.kind == "logreg":
            return logreg_fit(data, seed=seed, **self.params)
        if self.kind == "mlp":
            return mlp_fit(data, seed=seed, **self.params)
        raise ContractViolation(f"unknown classifier kind {self.kind!r}")


def _partition_folds(data: LabeledDataset, folds: int, seed: int) -> tuple[list[np.ndarray], bool]:
    """Seeded fold assignment, stratified per class when counts allow."""
    labels = data.labels
    counts = [int(np.sum(labels == c)) for c in data.class_ids]
    assignments = [[] for _ in range(folds)]
    if min(counts) >= folds:
        gen = generator(derive_seed(seed, "stratified"))
        for c in data.class_ids:
            idx = np.flatnonzero(labels == c)
            idx = idx[gen.permutation(idx.size)]
            for i, sample in enumerate(idx):
                assignments[i % folds].append(sample)
        stratified = True
    else:
        gen = generator(derive_seed(seed, "unstratified"))
        order = gen.permutation(labels.size)
        for i, sample in enumerate(order):
            assignments[i % folds].append(sample)
        stratified = False
    return [np.sort(np.asarray(a, dtype=np.int64)) for a in assignments], stratified


def _split_by_fold(data: LabeledDataset, folds: list[np.ndarray], i: int):
    test_idx = folds[i]
    train_idx = np.concatenate([folds[j] for j in range(len(folds)) if j != i])
    train = LabeledDataset(data.X[:, train_idx], data.labels[train_idx], data.class_ids)
    test = LabeledDataset(data.X[:, test_idx], data.labels[test_idx], data.class_ids)
    return train, test


def kfold_cv(data: LabeledDataset, folds: int, classifier: ClassifierSpec, seed: int = 0) -> FitReport:
    """Seeded (stratified where possible) k-fold cross-validation.

    Metrics are means over folds; ``per_fold`` holds the fold accuracies.
    Falls back to unstratified folds, flagged on the report, when some class
    has fewer samples than folds.
    """
    if folds < 2:
        raise ContractViolation("folds must be >= 2")
    if data.n_samples < folds:
        raise ContractViolation("fewer samples than folds")
    partitions, stratified = _partition_folds(data, folds, derive_seed(seed, "folds"))
    reports = []
    for i in range(folds):
        train, test = _split_by_fold(data, partitions, i)
        model = classifier.fit(train, derive_seed(seed, "fold", i))
        reports.append(evaluate(model, test))
    return FitReport(
        accuracy=float(np.mean([r.accuracy for r in reports])),
        macro_precision=float(np.mean([r.macro_precision for r in reports])),
        macro_recall=float(np.mean([r.macro_recall for r in reports])),
        per_fold=[r.accuracy for r in reports],
        stratified=stratified,
        per_fold_precision=[r.macro_precision for r in reports],
        per_fold_recall=[r.macro_recall for r in reports],
    )


# ---------------------------------------------------------------------------
# Paired t-test

def paired_t_test(a, b) -> tuple[float, float]:
    """Two-sided paired t-test; p-value from the regularized incomplete beta."""
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    if a.shape != b.shape or a.ndim != 1 or a.size < 2:
        raise ContractViolation("paired_t_test needs two equal-length 1-d samples of size >= 2")
    d = a - b
    sd = d.std(ddof=1)
    if sd == 0.0:
        raise DegenerateTestError("paired differences have zero variance")
    n = d.size
    t = d.mean() / (sd / np.sqrt(n))
    dof = n - 1
    p = float(betainc(0.5 * dof, 0.5, dof / (dof + t * t)))
    return float(t), p
