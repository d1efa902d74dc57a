"""Seeded synthetic data with known ground truth for the benchmark harness.

Rest data is generated as ``X = A g(u) + noise`` where ``u`` is a latent
Gaussian with unit diagonal and equicorrelation ``rho``, ``g`` applies a
monotone non-Gaussian marginal map per coordinate (so the sources are
dependent when rho > 0), and ``A`` is a seeded full-column-rank mixing
matrix.  Task data adds class-dependent latent mean shifts along seeded
random directions with balanced classes.  Rest and task generated from the
same spec seed share the mixing matrix and source families, so an unmixing
learned on rest transfers to task.
"""

from dataclasses import dataclass, replace

import numpy as np
from scipy.special import ndtr

from . import linalg
from .classify import LabeledDataset
from .errors import ContractViolation
from .rng import derive_seed, normal_draws

SOURCE_FAMILIES = ("laplace", "uniform", "bimodal")

# gap-separated symmetric pair of half-normals; scaled below to unit variance
_BIMODAL_GAP = 1.0
_BIMODAL_WIDTH = 0.5
_BIMODAL_STD = np.sqrt(
    _BIMODAL_WIDTH**2 + _BIMODAL_GAP**2
    + 2.0 * _BIMODAL_GAP * _BIMODAL_WIDTH * np.sqrt(2.0 / np.pi)
)


@dataclass(frozen=True)
class SyntheticSpec:
    """Ground-truth recipe for one synthetic dataset."""

    p: int
    k_true: int
    n: int
    source_family: str | tuple[str, ...] = "laplace"
    latent_correlation: float = 0.0
    n_classes: int = 1
    class_separation: float = 0.0
    noise_scale: float = 0.01
    seed: int = 0

    def __post_init__(self):
        if self.p < 1 or self.k_true < 1 or self.n < 1 or self.n_classes < 1:
            raise ContractViolation("p, k_true, n and n_classes must be >= 1")
        if self.k_true > self.p:
            raise ContractViolation("k_true cannot exceed p")
        if not 0.0 <= self.latent_correlation < 1.0:
            raise ContractViolation("latent_correlation must lie in [0, 1)")
        if self.class_separation < 0:
            raise ContractViolation("class_separation must be >= 0")
        if self.noise_scale < 0:
            raise ContractViolation("noise_scale must be >= 0")
        for fam in self.families():
            if fam not in SOURCE_FAMILIES:
                raise ContractViolation(f"unknown source family {fam!r}")

    def families(self) -> tuple[str, ...]:
        if isinstance(self.source_family, str):
            return (self.source_family,) * self.k_true
        fams = tuple(self.source_family)
        if len(fams) != self.k_true:
            raise ContractViolation("source_family list must have k_true entries")
        return fams


def family_transform(name: str, v: np.ndarray) -> np.ndarray:
    """Monotone map sending a standard normal coordinate to the source family.

    Equivalent to the family's inverse CDF applied to the normal CDF of ``v``;
    the laplace branch works on the symmetric tail for accuracy.  All
    families are scaled to unit variance.
    """
    if name == "laplace":
        b = 1.0 / np.sqrt(2.0)
        tail = ndtr(-np.abs(v))
        return -np.sign(v) * b * np.log(2.0 * tail)
    if name == "uniform":
        return np.sqrt(12.0) * (ndtr(v) - 0.5)
    if name == "bimodal":
        return (_BIMODAL_WIDTH * v + _BIMODAL_GAP * np.sign(v)) / _BIMODAL_STD
    raise ContractViolation(f"unknown source family {name!r}")


def _latent_chol(spec: SyntheticSpec) -> np.ndarray:
    rho = spec.latent_correlation
    cov = (1.0 - rho) * np.eye(spec.k_true) + rho * np.ones((spec.k_true, spec.k_true))
    return linalg.cholesky(cov, 0.0)


def mixing_matrix(spec: SyntheticSpec) -> np.ndarray:
    """Seeded p x k_true mixing with unit-norm columns (full column rank)."""
    a = normal_draws(derive_seed(spec.seed, "mixing"), (spec.p, spec.k_true))
    return a / np.linalg.norm(a, axis=0)


def _sources_from_latents(spec: SyntheticSpec, u: np.ndarray) -> np.ndarray:
    s = np.empty_like(u)
    for i, fam in enumerate(spec.families()):
        s[i] = family_transform(fam, u[i])
    return s


def synthetic_rest_with_truth(spec: SyntheticSpec) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Rest data plus its ground truth: ``(X, mixing, sources)``."""
    chol = _latent_chol(spec)
    u = chol @ normal_draws(derive_seed(spec.seed, "latent", "rest"), (spec.k_true, spec.n))
    sources = _sources_from_latents(spec, u)
    a = mixing_matrix(spec)
    x = a @ sources
    if spec.noise_scale > 0:
        x = x + spec.noise_scale * normal_draws(derive_seed(spec.seed, "noise", "rest"),
                                                (spec.p, spec.n))
    return x, a, sources


def gen_synthetic_rest(spec: SyntheticSpec) -> np.ndarray:
    """Rest data matrix (p x n)."""
    return synthetic_rest_with_truth(spec)[0]


def balanced_labels(n: int, n_classes: int) -> np.ndarray:
    """Class labels in blocks, as even as possible (exact when C divides n)."""
    base, extra = divmod(n, n_classes)
    counts = [base + (1 if c < extra else 0) for c in range(n_classes)]
    return np.repeat(np.arange(n_classes, dtype=np.int64), counts)


def gen_synthetic_task(spec: SyntheticSpec) -> LabeledDataset:
    """Task data: rest recipe plus class mean shifts in latent space."""
    labels = balanced_labels(spec.n, spec.n_classes)
    directions = normal_draws(derive_seed(spec.seed, "class-directions"),
                              (spec.k_true, spec.n_classes))
    directions /= np.linalg.norm(directions, axis=0)
    chol = _latent_chol(spec)
    g = normal_draws(derive_seed(spec.seed, "latent", "task"), (spec.k_true, spec.n))
    u = chol @ g + spec.class_separation * directions[:, labels]
    sources = _sources_from_latents(spec, u)
    x = mixing_matrix(spec) @ sources
    if spec.noise_scale > 0:
        x = x + spec.noise_scale * normal_draws(derive_seed(spec.seed, "noise", "task"),
                                                (spec.p, spec.n))
    return LabeledDataset(X=x, labels=labels,
                          class_ids=tuple(range(spec.n_classes)))


def rest_spec_for_task(spec: SyntheticSpec, n_rest: int) -> SyntheticSpec:
    """Spec for the rest set sharing this task spec's ground truth."""
    return replace(spec, n=n_rest, n_classes=1, class_separation=0.0)
