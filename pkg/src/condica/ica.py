"""FastICA: PCA whitening followed by parallel fixed-point unmixing.

The implementation is the symmetric (parallel) fixed-point iteration with the
logcosh contrast (g(u) = tanh(u), a = 1).  The initial rotation is drawn from
the seed and symmetrically orthonormalized, so a fixed seed reproduces the
unmixing matrix bit for bit.  Non-convergence within the iteration budget is
a reported state on the model, not an error.
"""

from dataclasses import dataclass

import numpy as np

from .errors import ContractViolation, NumericalFailure, RankDeficiencyError
from .linalg import as_matrix, pinv, sym_eig
from .rng import normal_draws

DEFAULT_TOL = 1e-4
DEFAULT_MAX_ITER = 200


def _frozen_copy(arr: np.ndarray) -> np.ndarray:
    locked = np.array(arr, dtype=np.float64)
    locked.flags.writeable = False
    return locked


@dataclass(frozen=True)
class UnmixingModel:
    """Fitted unmixing: sources are ``W @ (X - mean)``.

    Immutable after construction (array payloads are locked), so a fitted
    model is safe to share across threads.
    """

    k: int
    p: int
    W: np.ndarray          # (k, p)
    W_pinv: np.ndarray     # (p, k)
    mean: np.ndarray       # (p,)
    converged: bool
    iterations_used: int
    whitening: np.ndarray  # (k, p)
    rotation: np.ndarray   # (k, k), orthonormal rows

    def __post_init__(self):
        for name in ("W", "W_pinv", "mean", "whitening", "rotation"):
            object.__setattr__(self, name, _frozen_copy(getattr(self, name)))


def whiten(x, k: int) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Whitening from the top-k eigenpairs of the sample covariance.

    Returns ``(whitening, mean, xw)`` where ``xw = whitening @ (x - mean)``
    has zero row means and identity sample covariance (1/n convention).
    """
    x = as_matrix(x, "whiten input")
    p, n = x.shape
    if k < 1 or k > p:
        raise ContractViolation(f"k must be in [1, {p}], got {k}")
    if n <= k:
        raise ContractViolation(f"whitening needs n > k samples, got n={n}, k={k}")
    mean = x.mean(axis=1)
    xc = x - mean[:, None]
    cov = xc @ xc.T / n
    evals, evecs = sym_eig(cov)
    threshold = max(evals[0], 0.0) * 1e-12
    achievable = int(np.sum(evals > threshold))
    if achievable < k:
        raise RankDeficiencyError(
            f"only {achievable} strictly positive eigenvalues; cannot whiten to k={k}",
            achievable=achievable,
        )
    whitening = evecs[:, :k].T / np.sqrt(evals[:k])[:, None]
    return whitening, mean, whitening @ xc


def _sym_decorrelation(w: np.ndarray) -> np.ndarray:
    """Replace ``w`` by ``(w w^T)^{-1/2} w``, making its rows orthonormal."""
    s, u = sym_eig(w @ w.T)
    if s[-1] <= s[0] * 1e-12 or s[0] <= 0.0:
        raise NumericalFailure("fastica_fit: decorrelation became degenerate")
    return (u * (1.0 / np.sqrt(s))) @ u.T @ w


def fastica_fit(x, k: int, tol: float = DEFAULT_TOL, max_iter: int = DEFAULT_MAX_ITER,
                seed: int = 0) -> UnmixingModel:
    """Fit FastICA with ``k`` components on ``x`` (p features x n samples)."""
    x = as_matrix(x, "fastica_fit input")
    if k < 2:
        raise ContractViolation("fastica_fit needs k >= 2")
    if tol <= 0:
        raise ContractViolation("tol must be > 0")
    if max_iter < 1:
        raise ContractViolation("max_iter must be >= 1")
    whitening, mean, xw = whiten(x, k)
    n = xw.shape[1]

    rotation = _sym_decorrelation(normal_draws(seed, (k, k)))
    converged = False
    iterations = 0
    for iterations in range(1, max_iter + 1):
        g = np.tanh(rotation @ xw)
        g_prime_mean = (1.0 - g * g).mean(axis=1)
        update = g @ xw.T / n - g_prime_mean[:, None] * rotation
        if not np.all(np.isfinite(update)):
            raise NumericalFailure(f"fastica_fit: non-finite update at iteration {iterations}")
        new_rotation = _sym_decorrelation(update)
        lim = np.abs(1.0 - np.abs(np.einsum("ij,ij->i", new_rotation, rotation))).max()
        rotation = new_rotation
        if lim < tol:
            converged = True
            break

    w = rotation @ whitening
    return UnmixingModel(k=k, p=x.shape[0], W=w, W_pinv=pinv(w), mean=mean,
                         converged=converged, iterations_used=iterations,
                         whitening=whitening, rotation=rotation)


def transform(model: UnmixingModel, x) -> np.ndarray:
    """Source representation ``W @ (x - mean)`` of new data ``x`` (p x m)."""
    x = as_matrix(x, "transform input")
    if x.shape[0] != model.p:
        raise ContractViolation(f"expected {model.p} feature rows, got {x.shape[0]}")
    return model.W @ (x - model.mean[:, None])
