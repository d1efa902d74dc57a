import math

import numpy as np
import pytest

from condica.errors import ContractViolation, DegenerateMarginalError
from condica.quantiles import (normal_cdf, normal_ppf, qt_fit, qt_forward,
                               qt_inverse)
from condica.rng import normal_draws, uniform_open


def erf_series(x: float) -> float:
    """Maclaurin series for erf, independent of scipy."""
    total, term = x, x
    for n in range(1, 200):
        term *= -x * x / n
        total += term / (2 * n + 1)
    return 2.0 / math.sqrt(math.pi) * total


def oracle_cdf(x: float) -> float:
    return 0.5 * (1.0 + erf_series(x / math.sqrt(2.0)))


def oracle_ppf(p: float) -> float:
    lo, hi = -10.0, 10.0
    for _ in range(80):
        mid = 0.5 * (lo + hi)
        if oracle_cdf(mid) < p:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def ks_statistic(sample: np.ndarray) -> float:
    """Exact one-sample Kolmogorov-Smirnov distance to N(0, 1)."""
    s = np.sort(sample)
    n = s.size
    cdf = normal_cdf(s)
    upper = np.abs(np.arange(1, n + 1) / n - cdf).max()
    lower = np.abs(cdf - np.arange(0, n) / n).max()
    return max(upper, lower)


def ks_critical(n: int, alpha: float = 0.01) -> float:
    # asymptotic critical value c(alpha)/sqrt(n), c(0.01) = 1.6276
    return 1.6276 / np.sqrt(n)


class TestNormalCdfPpf:
    def test_ppf_half_is_zero(self):
        assert normal_ppf(0.5) == pytest.approx(0.0, abs=1e-15)

    def test_cdf_zero_is_half(self):
        assert normal_cdf(0.0) == pytest.approx(0.5, abs=1e-15)

    def test_ppf_against_bisection_oracle(self):
        assert normal_ppf(0.975) == pytest.approx(oracle_ppf(0.975), abs=1e-5)
        assert normal_ppf(0.975) == pytest.approx(1.959964, abs=1e-5)

    def test_round_trip_tight(self):
        p = np.concatenate([[1e-12, 1 - 1e-12], np.linspace(1e-6, 1 - 1e-6, 101)])
        assert np.abs(normal_cdf(normal_ppf(p)) - p).max() < 1e-12

    def test_cdf_monotone(self):
        x = np.linspace(-8, 8, 1001)
        assert np.all(np.diff(normal_cdf(x)) >= 0)

    @pytest.mark.parametrize("bad", [0.0, 1.0, -0.1, 1.1])
    def test_ppf_domain_errors(self, bad):
        with pytest.raises(ContractViolation):
            normal_ppf(bad)


class TestQtFit:
    def test_standard_normal_dim_forward_near_identity(self):
        train = normal_draws(10, (1, 50000))
        qt = qt_fit(train, 1000)
        held_out = normal_draws(11, (1, 5000))
        mapped = qt_forward(qt, held_out)
        assert np.abs(mapped - held_out).mean() < 0.05

    def test_uniform_marginal_maps_like_probit(self):
        u = uniform_open(12, (1, 50000))
        qt = qt_fit(u, 1000)
        probes = np.linspace(0.05, 0.95, 19)[None, :]
        mapped = qt_forward(qt, probes)
        assert np.abs(mapped - normal_ppf(probes)).max() < 0.05

    def test_two_quantiles_is_valid(self):
        s = np.array([[0.0, 1.0, 2.0, 3.0]])
        qt = qt_fit(s, 2)
        assert qt.landmarks.shape == (1, 2)
        out = qt_forward(qt, np.array([[1.5]]))
        assert np.isfinite(out).all()

    def test_constant_dimension_named(self):
        s = np.vstack([np.arange(10.0), np.full(10, 2.0)])
        with pytest.raises(DegenerateMarginalError) as err:
            qt_fit(s, 5)
        assert "dimension 1" in str(err.value)

    def test_landmarks_nondecreasing(self):
        s = normal_draws(13, (4, 500))
        qt = qt_fit(s, 100)
        assert np.all(np.diff(qt.landmarks, axis=1) >= 0)

    def test_requires_enough_samples(self):
        with pytest.raises(ContractViolation):
            qt_fit(np.arange(5.0)[None, :], 6)


class TestQtForward:
    def test_interior_landmarks_map_to_their_levels(self):
        s = normal_draws(14, (2, 400))
        qt = qt_fit(s, 21)
        inner = qt.landmarks[:, 1:-1]
        mapped = qt_forward(qt, inner)
        expected = normal_ppf(np.tile(qt.levels[1:-1], (2, 1)))
        assert np.abs(mapped - expected).max() < 1e-9

    def test_below_range_clamps_to_epsilon_level(self):
        s = normal_draws(15, (1, 100))
        qt = qt_fit(s, 10)
        lo = qt_forward(qt, np.array([[s.min() - 5.0]]))
        assert lo[0, 0] == pytest.approx(normal_ppf(qt.clip_epsilon))
        hi = qt_forward(qt, np.array([[s.max() + 5.0]]))
        assert hi[0, 0] == pytest.approx(normal_ppf(1 - qt.clip_epsilon))

    def test_training_data_passes_ks(self):
        # skewed and heavy-tailed marginals straightened to N(0,1)
        raw = normal_draws(16, (16, 20000))
        train = np.exp(0.5 * raw) + 0.2 * raw**3
        qt = qt_fit(train, 1000)
        mapped = qt_forward(qt, train)
        crit = ks_critical(20000)
        for d in range(16):
            assert ks_statistic(mapped[d]) < crit

    def test_monotone_per_dimension(self):
        s = normal_draws(17, (3, 300))
        qt = qt_fit(s, 50)
        probes = np.tile(np.linspace(s.min() - 1, s.max() + 1, 500), (3, 1))
        out = qt_forward(qt, probes)
        assert np.all(np.diff(out, axis=1) >= 0)

    def test_dimension_mismatch(self):
        qt = qt_fit(normal_draws(18, (2, 100)), 10)
        with pytest.raises(ContractViolation):
            qt_forward(qt, np.zeros((3, 4)))


class TestQtInverse:
    def test_round_trip_identity_on_interior(self):
        s = normal_draws(19, (4, 2000))
        qt = qt_fit(s, 101)
        lo = qt.landmarks[:, :1]
        hi = qt.landmarks[:, -1:]
        probes = lo + (hi - lo) * np.linspace(0.05, 0.95, 200)[None, :]
        assert np.abs(qt_inverse(qt, qt_forward(qt, probes)) - probes).max() < 1e-9

    def test_zero_maps_to_empirical_median(self):
        s = normal_draws(20, (3, 1001))
        qt = qt_fit(s, 101)  # odd landmark count puts level 0.5 on a node
        med = qt_inverse(qt, np.zeros((3, 1)))
        expected = np.quantile(s, 0.5, axis=1, method="midpoint")
        assert np.abs(med[:, 0] - expected).max() < 1e-12

    def test_extremes_clamp_to_landmarks(self):
        s = normal_draws(21, (2, 500))
        qt = qt_fit(s, 50)
        out = qt_inverse(qt, np.array([[10.0, -10.0], [10.0, -10.0]]))
        assert np.array_equal(out[:, 0], qt.landmarks[:, -1])
        assert np.array_equal(out[:, 1], qt.landmarks[:, 0])

    def test_no_nonfinite_outputs_either_direction(self):
        s = normal_draws(22, (2, 300))
        qt = qt_fit(s, 30)
        wild = np.array([[-1e12, 1e12, 0.0], [3e5, -4.0, 1e300]])
        assert np.isfinite(qt_forward(qt, wild)).all()
        zwild = np.array([[-40.0, 40.0, 0.0], [5.0, -700.0, 300.0]])
        assert np.isfinite(qt_inverse(qt, zwild)).all()

    def test_dimension_mismatch(self):
        qt = qt_fit(normal_draws(23, (2, 100)), 10)
        with pytest.raises(ContractViolation):
            qt_inverse(qt, np.zeros((1, 4)))


class TestImmutability:
    def test_fitted_transform_is_locked(self):
        qt = qt_fit(normal_draws(60, (2, 200)), 20)
        with pytest.raises(ValueError):
            qt.landmarks[0, 0] = 0.0
        with pytest.raises(ValueError):
            qt.levels[0] = 0.5
