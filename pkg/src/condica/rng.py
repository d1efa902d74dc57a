"""Seed derivation and deterministic random draws.

All randomness in the package flows through a 64-bit counter-based stream
(Philox) keyed by an integer seed.  Normal variates are produced by applying
the inverse normal CDF to uniform draws, never Box-Muller, so a given seed
yields the same bytes on every platform.  Child seeds are derived from a root
seed and a label path with a splitmix-style hash, which keeps parallel tasks
(splits, methods, folds) on independent, order-free streams.
"""

import hashlib

import numpy as np
from scipy.special import ndtri

_MASK = (1 << 64) - 1
# smallest uniform kept strictly inside (0, 1) before the inverse CDF
_TINY = 2.0**-54


def _splitmix(z: int) -> int:
    z = (z + 0x9E3779B97F4A7C15) & _MASK
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK
    return (z ^ (z >> 31)) & _MASK


def derive_seed(root: int, *parts) -> int:
    """Derive a child seed from ``root`` and a path of int/str labels.

    Deterministic and stable across runs and platforms; distinct paths give
    independent streams, so adding a task never perturbs another task's draws.
    """
    h = int(root) & _MASK
    for part in parts:
        if isinstance(part, str):
            digest = hashlib.blake2b(part.encode("utf-8"), digest_size=8).digest()
            v = int.from_bytes(digest, "little")
        else:
            v = int(part) & _MASK
        h = _splitmix(h ^ v)
    return h


def generator(seed: int) -> np.random.Generator:
    """Counter-based generator keyed directly by ``seed``."""
    return np.random.Generator(np.random.Philox(key=int(seed) & ((1 << 128) - 1)))


def uniform_open(seed: int, shape) -> np.ndarray:
    """Uniform draws strictly inside (0, 1)."""
    u = generator(seed).random(shape)
    u[u == 0.0] = _TINY
    return u


def normal_draws(seed: int, shape) -> np.ndarray:
    """Standard normal draws via inverse-CDF of the uniform stream."""
    return ndtri(uniform_open(seed, shape))
