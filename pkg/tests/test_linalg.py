import numpy as np
import pytest

from condica import linalg
from condica.errors import ContractViolation, DefinitenessError
from condica.rng import normal_draws


def penrose_errors(m, m_pinv):
    scale = max(np.abs(m).max(), 1.0)
    return (
        np.abs(m @ m_pinv @ m - m).max() / scale,
        np.abs(m_pinv @ m @ m_pinv - m_pinv).max() / scale,
        np.abs((m @ m_pinv).T - m @ m_pinv).max() / scale,
        np.abs((m_pinv @ m).T - m_pinv @ m).max() / scale,
    )


class TestPinv:
    def test_identity(self):
        assert np.allclose(linalg.pinv(np.eye(3)), np.eye(3), atol=1e-12)

    def test_orthonormal_rows_gives_transpose(self):
        # rows of W orthonormal forces the pseudo-inverse to be W^T
        q, _ = np.linalg.qr(normal_draws(11, (5, 5)))
        w = q[:, :2].T
        assert np.allclose(linalg.pinv(w), w.T, atol=1e-12)

    def test_penrose_conditions_random_3x2(self):
        m = normal_draws(7, (3, 2))
        errs = penrose_errors(m, linalg.pinv(m))
        assert max(errs) < 1e-10

    @pytest.mark.parametrize("seed,shape", [(1, (4, 6)), (2, (6, 4)), (3, (5, 5)), (4, (2, 9))])
    def test_penrose_conditions_property(self, seed, shape):
        m = normal_draws(seed, shape)
        assert max(penrose_errors(m, linalg.pinv(m))) < 1e-8

    def test_rank_deficient(self):
        # rank-1 matrix: small singular values are dropped, Penrose still holds
        u = normal_draws(5, (4, 1))
        v = normal_draws(6, (1, 3))
        m = u @ v
        assert max(penrose_errors(m, linalg.pinv(m))) < 1e-8

    def test_explicit_tolerance_zeroes_directions(self):
        m = np.diag([1.0, 1e-8])
        p = linalg.pinv(m, rank_tolerance=1e-4)
        assert p[1, 1] == 0.0 and p[0, 0] == pytest.approx(1.0)

    def test_rejects_nonfinite(self):
        with pytest.raises(ContractViolation):
            linalg.pinv(np.array([[1.0, np.nan]]))

    def test_rejects_negative_tolerance(self):
        with pytest.raises(ContractViolation):
            linalg.pinv(np.eye(2), rank_tolerance=-1.0)


class TestSymEig:
    def test_identity(self):
        w, v = linalg.sym_eig(np.eye(2))
        assert np.allclose(w, [1.0, 1.0])
        assert np.allclose(v @ v.T, np.eye(2), atol=1e-12)

    def test_diagonal(self):
        w, v = linalg.sym_eig(np.diag([3.0, 1.0]))
        assert np.allclose(w, [3.0, 1.0])
        # axis-aligned up to sign
        assert np.allclose(np.abs(v), np.eye(2), atol=1e-12)

    def test_reconstruction_random_symmetric(self):
        a = normal_draws(21, (5, 5))
        s = a + a.T
        w, v = linalg.sym_eig(s)
        rel = np.linalg.norm(v @ np.diag(w) @ v.T - s) / np.linalg.norm(s)
        assert rel < 1e-8
        assert np.all(np.diff(w) <= 0)
        assert np.abs(v.T @ v - np.eye(5)).max() < 1e-8

    def test_rejects_asymmetric(self):
        with pytest.raises(ContractViolation):
            linalg.sym_eig(np.array([[1.0, 2.0], [0.0, 1.0]]))

    def test_rejects_rectangular(self):
        with pytest.raises(ContractViolation):
            linalg.sym_eig(np.ones((2, 3)))


class TestCholesky:
    def test_identity(self):
        assert np.array_equal(linalg.cholesky(np.eye(4)), np.eye(4))

    def test_diagonal(self):
        assert np.allclose(linalg.cholesky(np.diag([4.0, 9.0])), np.diag([2.0, 3.0]))

    def test_reconstruction_random_spd(self):
        a = normal_draws(31, (6, 6))
        s = a.T @ a + np.eye(6)
        ell = linalg.cholesky(s)
        assert np.linalg.norm(ell @ ell.T - s) / np.linalg.norm(s) < 1e-8

    def test_strict_upper_exactly_zero(self):
        a = normal_draws(32, (5, 5))
        ell = linalg.cholesky(a.T @ a + np.eye(5))
        assert np.all(np.triu(ell, 1) == 0.0)

    def test_jitter_recovers_psd_singular(self):
        s = np.diag([1.0, 0.0])
        with pytest.raises(DefinitenessError):
            linalg.cholesky(s, 0.0)
        ell = linalg.cholesky(s, 1e-12)
        assert np.allclose(ell @ ell.T, s + 1e-12 * np.eye(2))

    def test_failure_reports_pivot(self):
        with pytest.raises(DefinitenessError) as err:
            linalg.cholesky(np.diag([1.0, 1.0, -1.0]))
        assert err.value.pivot == 2

    def test_rejects_asymmetric(self):
        with pytest.raises(ContractViolation):
            linalg.cholesky(np.array([[1.0, 1.0], [0.0, 1.0]]))
