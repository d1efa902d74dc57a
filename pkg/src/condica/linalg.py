"""Dense linear-algebra kernel used by every other module.

Matrices are plain float64 2-d numpy arrays; ``as_matrix`` is the shared
validator (finite entries, at least one row and column).  Factorizations are
delegated to LAPACK through numpy/scipy, which is deterministic for a given
input on a given build, so seeded runs reproduce bit-identically.
"""

import numpy as np
from scipy.linalg.lapack import dpotrf

from .errors import ContractViolation, DefinitenessError, NumericalFailure

_EPS = np.finfo(np.float64).eps


def as_matrix(a, name: str = "matrix") -> np.ndarray:
    """Validate and return ``a`` as a finite float64 matrix (rows, cols >= 1)."""
    arr = np.asarray(a, dtype=np.float64)
    if arr.ndim != 2:
        raise ContractViolation(f"{name} must be 2-dimensional, got ndim={arr.ndim}")
    if arr.shape[0] < 1 or arr.shape[1] < 1:
        raise ContractViolation(f"{name} must have at least one row and column, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise ContractViolation(f"{name} contains non-finite entries")
    return arr


def pinv(m, rank_tolerance: float = 0.0) -> np.ndarray:
    """Moore-Penrose pseudo-inverse via SVD.

    Singular values at or below the threshold are treated as zero.  A
    ``rank_tolerance`` of 0 selects the automatic threshold
    max(rows, cols) * eps * sigma_max.
    """
    m = as_matrix(m, "pinv input")
    if rank_tolerance < 0:
        raise ContractViolation("rank_tolerance must be >= 0")
    try:
        u, s, vt = np.linalg.svd(m, full_matrices=False)
    except np.linalg.LinAlgError as exc:
        raise NumericalFailure(f"pinv: SVD did not converge on {m.shape} input") from exc
    if rank_tolerance > 0:
        cutoff = rank_tolerance
    else:
        cutoff = max(m.shape) * _EPS * (s[0] if s.size else 0.0)
    sinv = np.zeros_like(s)
    keep = s > cutoff
    sinv[keep] = 1.0 / s[keep]
    return (vt.T * sinv) @ u.T


def sym_eig(s) -> tuple[np.ndarray, np.ndarray]:
    """Eigendecomposition of a symmetric matrix, eigenvalues descending.

    Returns ``(eigenvalues, eigenvectors)`` with orthonormal eigenvector
    columns such that ``S = V diag(w) V.T``.
    """
    s = as_matrix(s, "sym_eig input")
    _require_symmetric(s, "sym_eig")
    sym = 0.5 * (s + s.T)
    try:
        w, v = np.linalg.eigh(sym)
    except np.linalg.LinAlgError as exc:
        raise NumericalFailure(f"sym_eig: eigensolver failed on {s.shape} input") from exc
    return w[::-1].copy(), v[:, ::-1].copy()


def cholesky(s, jitter: float = 0.0) -> np.ndarray:
    """Lower Cholesky factor of ``s + jitter * I``.

    Raises :class:`DefinitenessError` naming the 0-based failing pivot when
    the matrix is not positive definite.
    """
    s = as_matrix(s, "cholesky input")
    _require_symmetric(s, "cholesky")
    if jitter < 0:
        raise ContractViolation("jitter must be >= 0")
    a = s if jitter == 0 else s + jitter * np.eye(s.shape[0])
    c, info = dpotrf(a, lower=1, overwrite_a=0)
    if info > 0:
        raise DefinitenessError(
            f"cholesky: matrix not positive definite, pivot index {info - 1}",
            pivot=info - 1,
        )
    if info < 0:
        raise NumericalFailure(f"cholesky: invalid LAPACK argument {-info}")
    return np.tril(c)


def _require_symmetric(s: np.ndarray, op: str, rtol: float = 1e-10) -> None:
    if s.shape[0] != s.shape[1]:
        raise ContractViolation(f"{op}: input must be square, got shape {s.shape}")
    scale = np.abs(s).max()
    if scale > 0 and np.abs(s - s.T).max() > rtol * scale:
        raise ContractViolation(f"{op}: input is not symmetric within relative tolerance {rtol}")
