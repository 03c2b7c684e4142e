import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.optimize import nnls as scipy_nnls
from scipy.stats import ortho_group

from nrdl.coders import NnlsParams, NnlsSolver, RidgeSolver, solve_nnls, solve_ridge
from nrdl.exceptions import DataError

from oracles import projected_gradient_nnls


def lsq(D, y, eta):
    return float(np.sum((y - D @ eta) ** 2))


def well_conditioned(rng, d, K):
    U = ortho_group.rvs(d, random_state=rng)[:, :K]
    V = ortho_group.rvs(K, random_state=rng)
    return U @ np.diag(rng.uniform(0.5, 2.0, K)) @ V


class TestNnls:
    def test_identity_feasible(self):
        y = np.array([0.2, 0.5, 0.1])
        np.testing.assert_allclose(solve_nnls(np.eye(3), y), y, atol=1e-8)

    def test_identity_clamp(self):
        eta = solve_nnls(np.eye(2), np.array([0.5, -0.3]))
        np.testing.assert_allclose(eta, [0.5, 0.0], atol=1e-8)
        assert np.all(eta >= 0)

    @pytest.mark.parametrize("seed", range(5))
    def test_projected_gradient_oracle(self, seed):
        rng = np.random.default_rng(seed)
        D = well_conditioned(rng, 5, 5)
        y = rng.standard_normal(5)
        ours = lsq(D, y, solve_nnls(D, y))
        ref = lsq(D, y, projected_gradient_nnls(D, y))
        assert abs(ours - ref) <= 1e-4

    @pytest.mark.parametrize("seed", range(5))
    def test_matches_active_set(self, seed):
        rng = np.random.default_rng(100 + seed)
        D = rng.standard_normal((12, 7))
        y = rng.standard_normal(12)
        ref, _ = scipy_nnls(D, y)
        np.testing.assert_allclose(solve_nnls(D, y), ref, atol=1e-6)

    @pytest.mark.parametrize("seed", range(5))
    def test_orthonormal_columns_clamp(self, seed):
        rng = np.random.default_rng(seed)
        D = ortho_group.rvs(8, random_state=rng)[:, :5]
        y = rng.standard_normal(8)
        np.testing.assert_allclose(solve_nnls(D, y), np.maximum(D.T @ y, 0), atol=1e-6)

    def test_batch_equals_columnwise(self, rng):
        D = rng.standard_normal((6, 4))
        Y = rng.standard_normal((6, 5))
        solver = NnlsSolver(D)
        batch = solver.solve(Y)
        for j in range(5):
            np.testing.assert_allclose(batch[:, j], solver.solve(Y[:, j]), rtol=0, atol=1e-14)

    def test_feasible_when_iterations_run_out(self, rng):
        D = rng.standard_normal((10, 6))
        y = rng.standard_normal(10)
        res = NnlsSolver(D, NnlsParams(max_iter=2)).solve_full(y)
        assert not res.converged and res.iterations == 2
        assert np.all(res.codes >= 0)

    def test_reports_convergence(self, rng):
        D = rng.standard_normal((10, 6))
        res = NnlsSolver(D).solve_full(rng.standard_normal(10))
        assert res.converged
        assert res.primal_residual <= 1e-8 and res.dual_residual <= 1e-8

    @settings(max_examples=60, deadline=None)
    @given(st.integers(0, 2**32 - 1), st.integers(1, 8), st.integers(1, 8))
    def test_nonnegative_and_no_worse_than_zero(self, seed, d, K):
        rng = np.random.default_rng(seed)
        D = rng.standard_normal((d, K))
        y = rng.standard_normal(d)
        eta = solve_nnls(D, y)
        assert np.all(eta >= 0)
        assert lsq(D, y, eta) <= float(y @ y) + 1e-9

    def test_dimension_mismatch(self):
        with pytest.raises(DataError, match="dimension mismatch"):
            solve_nnls(np.eye(3), np.ones(2))

    @pytest.mark.parametrize("bad", [np.nan, np.inf])
    def test_non_finite(self, bad):
        with pytest.raises(DataError):
            solve_nnls(np.eye(2), np.array([1.0, bad]))
        with pytest.raises(DataError):
            solve_nnls(np.array([[1.0, bad], [0.0, 1.0]]), np.ones(2))

    @pytest.mark.parametrize("kw", [dict(rho=0), dict(tol=-1), dict(max_iter=0)])
    def test_params_positive(self, kw):
        with pytest.raises(ValueError):
            NnlsParams(**kw)


class TestRidge:
    def test_identity_limit(self):
        y = np.array([0.3, -0.7, 1.1])
        np.testing.assert_allclose(solve_ridge(np.eye(3), y, reg=1e-12), y, atol=1e-6)

    def test_scalar(self):
        assert solve_ridge(np.array([[2.0]]), np.array([4.0]), reg=1e-12)[0] == pytest.approx(2.0)

    def test_normal_equations(self, rng):
        D = rng.standard_normal((6, 4))
        y = rng.standard_normal(6)
        reg = 1e-3
        eta = solve_ridge(D, y, reg)
        assert np.max(np.abs(D.T @ (D @ eta - y) + reg * eta)) <= 1e-8

    def test_allows_negative_codes(self):
        eta = solve_ridge(np.eye(2), np.array([0.5, -0.3]))
        assert eta[1] < 0

    def test_cached_solver_batches(self, rng):
        D = rng.standard_normal((6, 4))
        Y = rng.standard_normal((6, 3))
        s = RidgeSolver(D, 0.1)
        np.testing.assert_allclose(s.solve(Y)[:, 1], s.solve(Y[:, 1]), atol=1e-14)

    def test_reg_must_be_positive(self):
        with pytest.raises(ValueError):
            RidgeSolver(np.eye(2), 0.0)

    def test_dimension_mismatch(self):
        with pytest.raises(DataError):
            solve_ridge(np.eye(3), np.ones(4))
