"""Invertible per-dimension quantile transform to standard normal marginals.

The fitted transform stores, per source dimension, the empirical quantiles
(landmarks) at equispaced probability levels.  The forward map interpolates a
value to its CDF level and applies the inverse normal CDF; the inverse map
runs the same construction backwards.  Levels are clamped away from 0 and 1
by ``clip_epsilon`` so both directions stay finite, which also bounds
generated samples to the observed source range.
"""

from dataclasses import dataclass

import numpy as np
from scipy.special import ndtr, ndtri

from .errors import ContractViolation, DegenerateMarginalError
from .linalg import as_matrix

DEFAULT_CLIP_EPSILON = 1e-7
MAX_QUANTILES = 1000


def normal_cdf(x):
    """Standard normal CDF, elementwise."""
    return ndtr(x)


def normal_ppf(p):
    """Standard normal inverse CDF; defined on the open interval (0, 1)."""
    arr = np.asarray(p, dtype=np.float64)
    if np.any(arr <= 0.0) or np.any(arr >= 1.0):
        raise ContractViolation("normal_ppf is only defined on the open interval (0, 1)")
    return ndtri(arr)


@dataclass(frozen=True)
class QuantileTransform:
    """Per-dimension monotone map between source marginals and N(0, 1).

    Immutable after fitting; forward/inverse are pure and thread-safe.
    """

    k: int
    n_quantiles: int
    levels: np.ndarray     # (n_quantiles,) equispaced in [0, 1]
    landmarks: np.ndarray  # (k, n_quantiles), nondecreasing per row
    clip_epsilon: float = DEFAULT_CLIP_EPSILON

    def __post_init__(self):
        for name in ("levels", "landmarks"):
            locked = np.array(getattr(self, name), dtype=np.float64)
            locked.flags.writeable = False
            object.__setattr__(self, name, locked)


def qt_fit(s, n_quantiles: int | None = None, clip_epsilon: float = DEFAULT_CLIP_EPSILON) -> QuantileTransform:
    """Fit the transform on sources ``s`` (k x n, one row per dimension).

    Landmarks are empirical quantiles at levels i/(n_quantiles - 1) using
    midpoint interpolation of the sorted sample, which resolves ties
    deterministically.
    """
    s = as_matrix(s, "qt_fit input")
    k, n = s.shape
    if n_quantiles is None:
        n_quantiles = min(n, MAX_QUANTILES)
    if n_quantiles < 2:
        raise ContractViolation("n_quantiles must be >= 2")
    if n < n_quantiles:
        raise ContractViolation(f"need at least n_quantiles={n_quantiles} samples, got {n}")
    if not 0.0 < clip_epsilon < 0.5:
        raise ContractViolation("clip_epsilon must lie in (0, 0.5)")
    spans = s.max(axis=1) - s.min(axis=1)
    flat = np.flatnonzero(spans == 0.0)
    if flat.size:
        raise DegenerateMarginalError(f"dimension {flat[0]} is constant and cannot be quantile-mapped")
    levels = np.linspace(0.0, 1.0, n_quantiles)
    landmarks = np.quantile(s, levels, axis=1, method="midpoint").T
    return QuantileTransform(k=k, n_quantiles=n_quantiles, levels=levels,
                             landmarks=np.ascontiguousarray(landmarks),
                             clip_epsilon=clip_epsilon)


def qt_forward(qt: QuantileTransform, s) -> np.ndarray:
    """Map source values to standard normal space, dimension by dimension."""
    s = as_matrix(s, "qt_forward input")
    if s.shape[0] != qt.k:
        raise ContractViolation(f"expected {qt.k} rows, got {s.shape[0]}")
    out = np.empty_like(s)
    lo, hi = qt.clip_epsilon, 1.0 - qt.clip_epsilon
    for d in range(qt.k):
        lev = np.interp(s[d], qt.landmarks[d], qt.levels)
        np.clip(lev, lo, hi, out=lev)
        out[d] = ndtri(lev)
    return out


def qt_inverse(qt: QuantileTransform, z) -> np.ndarray:
    """Map standard normal values back to source space.

    Inputs beyond the clipped tail levels land exactly on the extreme
    landmarks.
    """
    z = as_matrix(z, "qt_inverse input")
    if z.shape[0] != qt.k:
        raise ContractViolation(f"expected {qt.k} rows, got {z.shape[0]}")
    out = np.empty_like(z)
    lo, hi = qt.clip_epsilon, 1.0 - qt.clip_epsilon
    for d in range(qt.k):
        p = ndtr(z[d])
        vals = np.interp(p, qt.levels, qt.landmarks[d])
        vals[p <= lo] = qt.landmarks[d, 0]
        vals[p >= hi] = qt.landmarks[d, -1]
        out[d] = vals
    return out
