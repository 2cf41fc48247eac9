import math
from dataclasses import replace

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from fdbeta.divergence import hellinger, kl
from fdbeta.errors import InfeasibleError, ParameterError
from fdbeta.portfolio import (OptimizerConfig, PortfolioProblem, efficient_frontier, max_return, min_risk,
                              project_feasible, project_simplex, tangency_portfolio, verify_capm)
from fdbeta.risk import rho, rho_many

from oracles import grid_portfolio

H = hellinger()

# I = 3, T = 8 instance (rounded normal draws); its tangency portfolio holds
# all three assets, so the return-constrained optimum there has nu = 0.
R3 = np.array([
    [0.0244, 0.0704, -0.0615],
    [0.0775, 0.0081, -0.0220],
    [-0.0221, -0.0333, 0.0011],
    [0.0434, 0.0334, 0.0355],
    [-0.0578, -0.0528, 0.0722],
    [0.0488, 0.0973, 0.0584],
    [-0.0310, 0.0614, 0.0351],
    [0.0186, -0.0228, 0.0101],
])


@pytest.fixture(scope="module")
def problem():
    return PortfolioProblem(R3, H, 0.1)


def _grid(problem, target):
    return grid_portfolio(R3, lambda L: rho_many(L, H, 0.1)[0], target)


class TestProjections:
    @settings(max_examples=100, deadline=None)
    @given(st.integers(1, 8), st.integers(0, 10_000))
    def test_simplex_optimality(self, n, seed):
        rng = np.random.default_rng(seed)
        v = rng.normal(size=n) * 3
        x = project_simplex(v)
        assert x.min() >= 0 and x.sum() == pytest.approx(1.0, abs=1e-12)
        # variational inequality against the vertices
        for e in np.eye(n):
            assert (v - x) @ (e - x) <= 1e-10

    @settings(max_examples=100, deadline=None)
    @given(st.integers(2, 6), st.integers(0, 10_000), st.floats(0.0, 1.0))
    def test_halfspace_projection(self, n, seed, frac):
        rng = np.random.default_rng(seed)
        v = rng.normal(size=n)
        m = rng.normal(size=n)
        rbar = m.min() + frac * (m.max() - m.min())
        x = project_feasible(v, m, rbar)
        assert x.min() >= 0 and x.sum() == pytest.approx(1.0, abs=1e-12)
        assert m @ x >= rbar - 1e-12
        # compare with random feasible points: x is the closest
        for _ in range(50):
            y = rng.dirichlet(np.ones(n))
            if m @ y >= rbar:
                assert np.linalg.norm(v - x) <= np.linalg.norm(v - y) + 1e-12

    def test_matches_qp_solver(self):
        cp = pytest.importorskip("cvxpy")
        rng = np.random.default_rng(0)
        for _ in range(5):
            v, m = rng.normal(size=4), rng.normal(size=4)
            rbar = 0.5 * (m.mean() + m.max())
            z = cp.Variable(4)
            cp.Problem(cp.Minimize(cp.sum_squares(z - v)), [z >= 0, cp.sum(z) == 1, m @ z >= rbar]).solve()
            np.testing.assert_allclose(project_feasible(v, m, rbar), z.value, atol=1e-6)

    def test_target_above_best(self):
        with pytest.raises(InfeasibleError):
            project_feasible(np.zeros(2), np.array([0.1, 0.2]), 0.3)


class TestMinRisk:
    def test_single_asset(self):
        r = np.random.default_rng(0).normal(0.01, 0.05, (10, 1))
        sol = min_risk(PortfolioProblem(r, H, 0.1))
        np.testing.assert_array_equal(sol.weights, [1.0])
        assert sol.risk == pytest.approx(rho(-r[:, 0], H, 0.1).value)

    def test_dominating_asset(self):
        rng = np.random.default_rng(1)
        base = rng.normal(0.0, 0.05, (12, 2))
        R = np.column_stack((base, base.max(axis=1) + 0.01))
        sol = min_risk(PortfolioProblem(R, H, 0.1, target_return=R.mean(axis=0).min()))
        assert sol.weights[2] == pytest.approx(1.0, abs=1e-6)

    def test_identical_assets_uniform(self):
        r = np.random.default_rng(2).normal(0.01, 0.05, 10)
        sol = min_risk(PortfolioProblem(np.column_stack((r, r, r)), H, 0.1))
        np.testing.assert_allclose(sol.weights, 1 / 3, atol=1e-12)

    def test_infeasible_target(self, problem):
        with pytest.raises(InfeasibleError):
            min_risk(replace(problem, target_return=1.0))

    @pytest.mark.parametrize("frac", [0.0, 0.5, 0.9])
    def test_grid_oracle(self, problem, frac):
        m = problem.mean_returns
        target = m.min() + frac * (m.max() - m.min())
        sol = min_risk(replace(problem, target_return=target))
        oracle, _ = _grid(problem, target)
        assert sol.risk <= oracle + 1e-9
        assert sol.risk == pytest.approx(oracle, abs=1e-3)

    def test_certificate_fields(self, problem):
        m = problem.mean_returns
        target = 0.5 * (m.min() + m.max()) + 0.002
        sol = min_risk(replace(problem, target_return=target))
        assert sol.converged
        assert sol.weights.min() >= 0 and sol.weights.sum() == pytest.approx(1.0, abs=1e-9)
        assert sol.lambda_star >= 0
        assert abs(sol.lambda_star * (sol.mean_return - target)) <= 1e-6

    def test_slack_constraint_ignored(self, problem):
        free = min_risk(problem)
        low = min_risk(replace(problem, target_return=problem.mean_returns.min() - 1.0))
        np.testing.assert_allclose(low.weights, free.weights, atol=1e-6)
        assert low.lambda_star == 0.0

    def test_multi_path(self):
        rng = np.random.default_rng(4)
        R = rng.normal(0.01, 0.04, (2, 6, 3))
        sol = min_risk(PortfolioProblem(R, kl(), 0.1, path_probs=[0.4, 0.6]))
        # a single path holding the stacked observations with matching weights
        flat = PortfolioProblem(np.vstack(R), kl(), 0.1)
        x = sol.weights
        assert sol.risk <= flat.evaluate(x)[0] + 1.0  # sanity: finite
        assert sol.weights.sum() == pytest.approx(1.0)

    def test_bad_path_probs(self):
        with pytest.raises(ParameterError):
            PortfolioProblem(np.zeros((2, 3, 2)), H, 0.1, path_probs=[0.5, 0.6])


class TestConvexity:
    @settings(max_examples=25, deadline=None)
    @given(st.integers(0, 10_000), st.floats(0.0, 1.0))
    def test_chord(self, seed, theta):
        p = PortfolioProblem(R3, H, 0.1)
        rng = np.random.default_rng(seed)
        x1, x2 = rng.dirichlet(np.ones(3)), rng.dirichlet(np.ones(3))
        f = lambda x: p.evaluate(x)[0]
        assert f(theta * x1 + (1 - theta) * x2) <= theta * f(x1) + (1 - theta) * f(x2) + 1e-8

    @settings(max_examples=25, deadline=None)
    @given(st.integers(0, 10_000))
    def test_subgradient(self, seed):
        p = PortfolioProblem(R3, H, 0.1)
        rng = np.random.default_rng(seed)
        x, y = rng.dirichlet(np.ones(3)), rng.dirichlet(np.ones(3))
        fx, g, _ = p.evaluate(x)
        assert p.evaluate(y)[0] >= fx + g @ (y - x) - 1e-7


class TestMaxReturn:
    def test_unbounded_cap(self, problem):
        sol = max_return(replace(problem, risk_cap=math.inf))
        k = int(np.argmax(problem.mean_returns))
        assert sol.weights[k] == pytest.approx(1.0)

    def test_cap_at_min_risk(self, problem):
        free = min_risk(problem)
        sol = max_return(replace(problem, risk_cap=free.risk))
        np.testing.assert_allclose(sol.weights, free.weights, atol=1e-6)

    def test_cap_below_min(self, problem):
        free = min_risk(problem)
        with pytest.raises(InfeasibleError):
            max_return(replace(problem, risk_cap=free.risk - 1e-3))

    def test_needs_cap(self, problem):
        with pytest.raises(ParameterError):
            max_return(problem)

    def test_frontier_coincidence(self, problem):
        m = problem.mean_returns
        target = m.min() + 0.7 * (m.max() - m.min())
        a = min_risk(replace(problem, target_return=target))
        b = max_return(replace(problem, risk_cap=a.risk))
        assert b.mean_return >= target - 1e-6
        assert b.risk <= a.risk + 1e-9


class TestFrontier:
    def test_nondecreasing_and_infeasible_recorded(self, problem):
        m = problem.mean_returns
        targets = list(np.linspace(m.min(), m.max(), 4)) + [m.max() + 0.01]
        pts = efficient_frontier(problem, targets)
        risks = [p.risk for p in pts[:-1]]
        assert all(b >= a - 1e-9 for a, b in zip(risks, risks[1:]))
        assert pts[-1].error is not None and pts[-1].weights is None

    def test_single_target(self, problem):
        t = float(problem.mean_returns.mean())
        (pt,) = efficient_frontier(problem, [t])
        assert pt.risk == pytest.approx(min_risk(replace(problem, target_return=t)).risk, abs=1e-12)

    def test_unsorted(self, problem):
        with pytest.raises(ParameterError):
            efficient_frontier(problem, [0.02, 0.01])


class TestCapm:
    def test_tangency_residuals(self, problem):
        sol = tangency_portfolio(problem)
        assert sol.weights.min() > 0.1
        assert abs(sol.nu_star) <= 1e-6
        assert sol.lambda_star > 0
        chk = verify_capm(sol, problem)
        assert np.abs(chk.residuals).max() <= 1e-3 * abs(chk.market_mean)

    def test_synthetic_market_column(self, problem):
        sol = min_risk(replace(problem, target_return=float(problem.mean_returns.mean())))
        R = np.column_stack((R3, R3 @ sol.weights))
        p2 = PortfolioProblem(R, H, 0.1)
        x = np.append(sol.weights, 0.0)
        from fdbeta.portfolio import verify_capm_at
        chk = verify_capm_at(p2, x)
        assert chk.betas[-1] == pytest.approx(1.0, abs=1e-12)
        assert chk.residuals[-1] == pytest.approx(0.0, abs=1e-15)

    def test_single_asset_residual_zero(self):
        r = np.random.default_rng(5).normal(0.01, 0.05, (9, 1))
        p = PortfolioProblem(r, H, 0.1)
        chk = verify_capm(min_risk(p), p)
        assert chk.residuals[0] == pytest.approx(0.0, abs=1e-15)

    def test_inactive_constraint_reports_nu(self, problem):
        sol = min_risk(problem)
        chk = verify_capm(sol, problem)
        # residuals equal nu (m_M - m_i) / rho on the support; they are
        # reported, not asserted to vanish
        s = sol.weights > 1e-7
        m = problem.mean_returns
        expect = sol.nu_star * (sol.mean_return - m[s]) / sol.risk
        np.testing.assert_allclose(chk.residuals[s], -expect, atol=1e-6)

    def test_optimizer_config(self, problem):
        sol = min_risk(problem, OptimizerConfig(restarts=1, seed=3))
        assert sol.converged
