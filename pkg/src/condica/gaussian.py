"""Shrunk covariance estimation and seeded latent Gaussian sampling.

The covariance estimator is the Ledoit-Wolf convex combination of the
empirical covariance with its mean-eigenvalue scaled-identity target,
``(1 - alpha) * Sigma + alpha * (tr(Sigma) / k) * I``, with the analytically
optimal ``alpha`` clamped to [0, 1].
"""

from dataclasses import dataclass

import numpy as np

from . import linalg
from .errors import ContractViolation, DefinitenessError, MissingClassError
from .linalg import as_matrix
from .rng import normal_draws

# relative diagonal jitter retried once when a shrunk covariance is PSD but
# numerically singular
CHOLESKY_JITTER_SCALE = 1e-10


@dataclass(frozen=True)
class ShrinkageResult:
    sigma_empirical: np.ndarray
    sigma_shrunk: np.ndarray
    alpha: float


def ledoit_wolf(z) -> ShrinkageResult:
    """Ledoit-Wolf shrunk covariance of ``z`` (k x n, samples in columns).

    Rows are centered before estimation; the empirical covariance uses the
    1/n normalization.  A dispersion of exactly zero (empirical covariance
    already equal to the target, including the all-zero case) is defined as
    full shrinkage, alpha = 1.
    """
    z = as_matrix(z, "ledoit_wolf input")
    k, n = z.shape
    if n < 2:
        raise ContractViolation("ledoit_wolf needs at least 2 samples")
    zc = z - z.mean(axis=1, keepdims=True)
    sigma = zc @ zc.T / n
    mu = np.trace(sigma) / k
    target = mu * np.eye(k)
    delta = ((sigma - target) ** 2).sum() / k
    if delta <= 0.0:
        alpha = 1.0
    else:
        sq = zc * zc
        beta_bar = (sq @ sq.T / n - sigma**2).sum() / (k * n)
        alpha = min(beta_bar, delta) / delta
        alpha = min(max(alpha, 0.0), 1.0)
    shrunk = (1.0 - alpha) * sigma + alpha * target
    return ShrinkageResult(sigma_empirical=sigma, sigma_shrunk=shrunk, alpha=float(alpha))


def fit_class_means(z, labels, class_ids=None) -> dict[int, np.ndarray]:
    """Per-class sample means of the columns of ``z``, keyed by class id.

    When ``class_ids`` declares the label set, a declared class with no
    samples raises :class:`MissingClassError`.
    """
    z = as_matrix(z, "fit_class_means input")
    labels = np.asarray(labels, dtype=np.int64)
    if labels.ndim != 1 or labels.size != z.shape[1]:
        raise ContractViolation("labels must be a 1-d sequence matching the sample count")
    ids = sorted(int(c) for c in np.unique(labels)) if class_ids is None else sorted(int(c) for c in class_ids)
    means: dict[int, np.ndarray] = {}
    for c in ids:
        mask = labels == c
        if not mask.any():
            raise MissingClassError(f"class {c} has no samples")
        means[c] = z[:, mask].mean(axis=1)
    return means


@dataclass(frozen=True)
class LatentGaussian:
    """Shared-covariance Gaussian over the latent space, one mean per class.

    Immutable after construction; safe to share across sampling threads
    (parallel callers must use distinct seeds).
    """

    k: int
    class_means: dict[int, np.ndarray]
    covariance: np.ndarray
    chol: np.ndarray

    def __post_init__(self):
        def lock(arr):
            locked = np.array(arr, dtype=np.float64)
            locked.flags.writeable = False
            return locked

        object.__setattr__(self, "covariance", lock(self.covariance))
        object.__setattr__(self, "chol", lock(self.chol))
        object.__setattr__(self, "class_means",
                           {c: lock(m) for c, m in self.class_means.items()})


def latent_gaussian(class_means: dict[int, np.ndarray], covariance) -> LatentGaussian:
    """Build a :class:`LatentGaussian`, caching the Cholesky factor."""
    covariance = as_matrix(covariance, "latent covariance")
    k = covariance.shape[0]
    if covariance.shape[1] != k:
        raise ContractViolation("latent covariance must be square")
    means = {}
    for c, m in class_means.items():
        m = np.asarray(m, dtype=np.float64)
        if m.shape != (k,):
            raise ContractViolation(f"mean for class {c} must have shape ({k},)")
        if not np.all(np.isfinite(m)):
            raise ContractViolation(f"mean for class {c} contains non-finite entries")
        means[int(c)] = m
    if not means:
        raise ContractViolation("at least one class mean is required")
    return LatentGaussian(k=k, class_means=means, covariance=covariance,
                          chol=psd_cholesky(covariance))


def psd_cholesky(cov: np.ndarray) -> np.ndarray:
    """Cholesky factor of a PSD matrix, with the shared jitter fallback.

    An exactly zero matrix factors to zero (sampling collapses onto the
    mean).  Otherwise a failed factorization is retried once with
    ``1e-10 * tr / k`` added to the diagonal.
    """
    cov = as_matrix(cov, "psd_cholesky input")
    if not cov.any():
        return np.zeros_like(cov)
    try:
        return linalg.cholesky(cov, 0.0)
    except DefinitenessError:
        jitter = CHOLESKY_JITTER_SCALE * np.trace(cov) / cov.shape[0]
        if jitter <= 0:
            raise
        return linalg.cholesky(cov, jitter)


def sample_gaussian(mean, chol, n: int, seed: int) -> np.ndarray:
    """Draw ``n`` columns of ``mean + chol @ g`` with seeded standard normals."""
    mean = np.asarray(mean, dtype=np.float64)
    chol = as_matrix(chol, "chol")
    k = chol.shape[0]
    if chol.shape[1] != k:
        raise ContractViolation("chol must be square")
    if np.any(np.triu(chol, 1) != 0.0):
        raise ContractViolation("chol must be lower-triangular")
    if mean.shape != (k,):
        raise ContractViolation(f"mean must have shape ({k},)")
    if n < 0:
        raise ContractViolation("sample count must be >= 0")
    g = normal_draws(seed, (k, n))
    return mean[:, None] + chol @ g
