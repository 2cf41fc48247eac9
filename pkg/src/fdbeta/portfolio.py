"""Mean-risk portfolio optimization with the divergence-ball risk.

Long-only, fully invested portfolios ``x`` over I assets.  The objective
``rho(l(x))`` with ``l(x) = -R x`` is convex in ``x``; a subgradient is

    g_i = sum_s sum_t p_s q*_st l^i_st

with ``q*`` the optimal measure of the portfolio loss.  ``min_risk`` runs
projected subgradient descent with diminishing steps from several starts and
then polishes the best iterate by projected gradient steps with backtracking.
Projection onto the feasible set (simplex intersected with the return
half-space) is exact.

The KKT system at the optimum reads ``g_i = lambda m_i + nu`` on the support,
where ``m`` are mean returns, ``lambda >= 0`` prices the return constraint and
``nu`` the budget.  The CAPM relation ``m_i = beta_i m_M`` holds exactly when
``nu = 0``, which is the tangency point of the frontier (largest return per
unit of risk); :func:`tangency_portfolio` finds it.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np
from scipy.optimize import brentq

from .divergence import DivergenceSpec
from .errors import DegenerateError, InfeasibleError, ParameterError, ShapeError, SolverError
from .risk import DEFAULT_CONFIG, EmpiricalLoss, RiskResult, SolverConfig, rho

SUPPORT_TOL = 1e-7


@dataclass(frozen=True)
class OptimizerConfig:
    restarts: int = 5
    subgradient_iters: int = 60
    step0: float = 0.5
    max_iter: int = 10_000
    rel_tol: float = 1e-9
    patience: int = 20
    seed: int = 0
    risk_cfg: SolverConfig = DEFAULT_CONFIG


@dataclass(frozen=True, eq=False)
class PortfolioProblem:
    """Scenario panel (T x I, or S x T x I with path probabilities) and the
    risk model; ``target_return`` is the minimal mean return (None for no
    return constraint) and ``risk_cap`` the risk budget used by max_return."""

    returns: np.ndarray
    spec: DivergenceSpec
    delta: float
    path_probs: np.ndarray | None = None
    target_return: float | None = None
    risk_cap: float | None = None
    tickers: tuple[str, ...] | None = None

    def __post_init__(self):
        R = np.array(self.returns, dtype=float)
        if R.ndim == 2:
            R = R[None]
        if R.ndim != 3 or min(R.shape) < 1:
            raise ShapeError("returns must be T x I or S x T x I")
        if not np.all(np.isfinite(R)):
            raise ShapeError("returns contain non-finite values")
        if self.delta < 0:
            raise ParameterError("delta must be nonnegative")
        S = R.shape[0]
        p = np.full(S, 1.0 / S) if self.path_probs is None else np.asarray(self.path_probs, dtype=float)
        if p.shape != (S,) or np.any(p < 0) or abs(p.sum() - 1) > 1e-12:
            raise ParameterError("path_probs must be a probability vector over paths")
        R.setflags(write=False)
        object.__setattr__(self, "returns", R)
        object.__setattr__(self, "path_probs", p)
        if self.tickers is None:
            object.__setattr__(self, "tickers", tuple(f"asset{i}" for i in range(R.shape[2])))

    @property
    def n_assets(self) -> int:
        return self.returns.shape[2]

    @property
    def mean_returns(self) -> np.ndarray:
        return np.einsum("s,sti->i", self.path_probs, self.returns) / self.returns.shape[1]

    def losses(self, x) -> np.ndarray:
        return -(self.returns @ np.asarray(x, dtype=float))

    def evaluate(self, x, cfg: SolverConfig = DEFAULT_CONFIG) -> tuple[float, np.ndarray, RiskResult]:
        """Risk, subgradient and the full risk result at ``x``."""
        res = rho(EmpiricalLoss(self.losses(x), self.path_probs), self.spec, self.delta, cfg)
        w = self.path_probs[:, None] * res.identifier
        g = -np.einsum("st,sti->i", w, self.returns)
        return res.value, g, res


@dataclass(frozen=True, eq=False)
class PortfolioSolution:
    weights: np.ndarray
    risk: float
    mean_return: float
    lambda_star: float
    nu_star: float
    identifier: np.ndarray
    capm_residuals: np.ndarray
    iterations: int
    converged: bool
    target_return: float | None = None
    subgradient: np.ndarray | None = None
    notes: tuple[str, ...] = ()


@dataclass(frozen=True, eq=False)
class CapmCheck:
    betas: np.ndarray
    residuals: np.ndarray
    market_mean: float
    market_risk: float
    warnings: tuple[str, ...] = ()


# ---------------------------------------------------------------------------
# projections


def project_simplex(v) -> np.ndarray:
    """Euclidean projection onto {x >= 0, sum x = 1} (sort-based)."""
    v = np.asarray(v, dtype=float)
    u = np.sort(v)[::-1]
    css = np.cumsum(u) - 1.0
    k = np.arange(1, v.size + 1)
    rho_idx = np.nonzero(u - css / k > 0)[0][-1]
    theta = css[rho_idx] / (rho_idx + 1.0)
    return np.maximum(v - theta, 0.0)


def project_feasible(v, m, rbar: float | None) -> np.ndarray:
    """Projection onto the simplex intersected with {m.x >= rbar}.

    The projection is proj_simplex(v + lam m) for the smallest lam >= 0 that
    meets the return constraint; m.x is nondecreasing in lam.
    """
    x = project_simplex(v)
    if rbar is None or m @ x >= rbar:
        return x
    mmax = m.max()
    if rbar > mmax + 1e-15:
        raise InfeasibleError(f"target return {rbar:g} exceeds the best mean return {mmax:g}")
    if rbar >= mmax - 1e-15:
        face = m >= mmax - 1e-15
        out = np.zeros_like(v)
        out[face] = project_simplex(v[face])
        return out
    hi = 1.0
    while m @ project_simplex(v + hi * m) < rbar:
        hi *= 2.0
        if hi > 1e300:
            raise SolverError("could not bracket the projection multiplier")
    lo = 0.0
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if mid <= lo or mid >= hi:
            break
        if m @ project_simplex(v + mid * m) < rbar:
            lo = mid
        else:
            hi = mid
    return project_simplex(v + hi * m)


# ---------------------------------------------------------------------------
# generic projected descent


def _subgradient(fun, x0, proj, cfg: OptimizerConfig, iters: int):
    """Projected subgradient steps of length step0/sqrt(k) along g/|g|;
    returns the best iterate seen."""
    x = proj(x0)
    f, g = fun(x)
    best_x, best_f = x, f
    n = 1
    for k in range(1, iters + 1):
        gn = np.linalg.norm(g)
        if gn == 0:
            break
        x = proj(x - cfg.step0 / math.sqrt(k) * g / gn)
        f, g = fun(x)
        n += 1
        if f < best_f:
            best_x, best_f = x, f
    return best_x, best_f, n


def _descend(fun, x0, proj, cfg: OptimizerConfig, subgradient_iters: int):
    """Subgradient phase, then projected gradient with backtracking from the
    best point."""
    x, f, n = _subgradient(fun, x0, proj, cfg, subgradient_iters)
    _, g = fun(x)
    n += 1
    step = 1.0 / max(np.linalg.norm(g), 1e-12)
    history = [f]
    converged = False
    while n < cfg.max_iter:
        step *= 2.0
        while True:
            x_new = proj(x - step * g)
            dx = x_new - x
            if np.linalg.norm(dx) <= 1e-14:
                converged = True
                break
            f_new, g_new = fun(x_new)
            n += 1
            if f_new <= f + g @ dx + (dx @ dx) / (2.0 * step) + 1e-15 * abs(f):
                break
            step *= 0.5
            if step < 1e-20:
                converged = True
                break
        if converged:
            break
        x, f, g = x_new, f_new, g_new
        history.append(f)
        if len(history) > cfg.patience:
            ref = history[-cfg.patience - 1]
            if abs(ref - f) <= cfg.rel_tol * max(abs(f), 1e-12):
                converged = True
                break
    return x, f, n, converged


def _starts(n_assets: int, cfg: OptimizerConfig):
    rng = np.random.default_rng(cfg.seed)
    starts = [np.full(n_assets, 1.0 / n_assets)]
    for _ in range(max(cfg.restarts - 1, 0)):
        starts.append(rng.dirichlet(np.ones(n_assets)))
    return starts


def _multipliers(x, g, m, rbar, active_tol=1e-9):
    """(lambda, nu) from g_i = lambda m_i + nu on the support of x."""
    support = x > SUPPORT_TOL
    active = rbar is not None and m @ x <= rbar + active_tol
    if not active:
        return 0.0, float(g[support].mean())
    idx = np.flatnonzero(support)
    if idx.size >= 2 and np.ptp(m[idx]) > 0:
        A = np.column_stack((m[idx], np.ones(idx.size)))
        (lam, nu), *_ = np.linalg.lstsq(A, g[idx], rcond=None)
        lam = max(float(lam), 0.0)
        nu = float(np.mean(g[idx] - lam * m[idx]))
        return lam, nu
    s = idx[np.argmax(m[idx])]
    below = m < m[s]
    lam = 0.0
    if below.any():
        lam = max(0.0, float(np.max((g[s] - g[below]) / (m[s] - m[below]))))
    return lam, float(g[s] - lam * m[s])


def _solution(problem: PortfolioProblem, x, n, converged, cfg: OptimizerConfig, notes=()):
    m = problem.mean_returns
    f, g, res = problem.evaluate(x, cfg.risk_cfg)
    lam, nu = _multipliers(x, g, m, problem.target_return)
    check = verify_capm_at(problem, x, g, f)
    return PortfolioSolution(
        weights=x,
        risk=f,
        mean_return=float(m @ x),
        lambda_star=lam,
        nu_star=nu,
        identifier=res.identifier,
        capm_residuals=check.residuals,
        iterations=n,
        converged=converged,
        target_return=problem.target_return,
        subgradient=g,
        notes=tuple(notes) + check.warnings,
    )


def min_risk(problem: PortfolioProblem, cfg: OptimizerConfig = OptimizerConfig(), x0=None) -> PortfolioSolution:
    """Minimize rho(-R x) over long-only weights with mean return >= target."""
    m = problem.mean_returns
    rbar = problem.target_return
    if rbar is not None and rbar > m.max() + 1e-15:
        raise InfeasibleError(f"target return {rbar:g} exceeds the best mean return {m.max():g}")
    if problem.n_assets == 1:
        return _solution(problem, np.ones(1), 1, True, cfg)

    def proj(v):
        return project_feasible(v, m, rbar)

    def fun(x):
        f, g, _ = problem.evaluate(x, cfg.risk_cfg)
        return f, g

    starts = [np.asarray(x0, dtype=float)] if x0 is not None else _starts(problem.n_assets, cfg)
    # convex objective: one polish from the best subgradient iterate suffices
    best, total = None, 0
    for s in starts:
        x, f, n = _subgradient(fun, s, proj, cfg, cfg.subgradient_iters)
        total += n
        if best is None or f < best[1] - 1e-12 * max(1.0, abs(f)):
            best = (x, f)
    x, f, n, ok = _descend(fun, best[0], proj, cfg, 0)
    total += n
    if not ok:
        raise SolverError("min_risk did not converge", last_iterate=x)
    return _solution(problem, x, total, ok, cfg)


def min_risk_value(problem: PortfolioProblem, cfg: OptimizerConfig = OptimizerConfig()) -> float:
    return min_risk(replace(problem, target_return=None), cfg).risk


def max_return(problem: PortfolioProblem, cfg: OptimizerConfig = OptimizerConfig(), tol: float = 1e-10) -> PortfolioSolution:
    """Maximize mean return subject to rho(-R x) <= risk_cap.

    Uses the equivalence with min_risk: the answer is the largest target
    whose minimal risk does not exceed the cap, a root of the nondecreasing
    frontier risk(target) - cap found by Brent's method with warm starts.
    """
    v = problem.risk_cap
    if v is None:
        raise ParameterError("max_return needs risk_cap")
    m = problem.mean_returns
    free = replace(problem, target_return=None)
    base = min_risk(free, cfg)
    slack = 1e-9 * max(1.0, abs(base.risk))
    if v < base.risk - slack:
        raise InfeasibleError(f"risk cap {v:g} below the minimal achievable risk {base.risk:g}")
    if v <= base.risk + slack:
        return replace(base, notes=base.notes + (f"risk cap {v:.10g}",))
    top = min_risk(replace(problem, target_return=float(m.max())), cfg)
    if top.risk <= v + slack:
        return replace(top, target_return=None, lambda_star=0.0)
    warm = {"x": base.weights}
    solved = {}

    def gap(r):
        sol = min_risk(replace(problem, target_return=r), replace(cfg, restarts=1), x0=warm["x"])
        warm["x"] = sol.weights
        solved[r] = sol
        return sol.risk - v

    root = brentq(gap, base.mean_return, float(m.max()), xtol=tol, rtol=4 * np.finfo(float).eps, maxiter=200)
    sol = solved.get(root) or min_risk(replace(problem, target_return=root), replace(cfg, restarts=1), x0=warm["x"])
    return replace(sol, target_return=None, notes=sol.notes + (f"risk cap {v:.10g}",))


@dataclass(frozen=True, eq=False)
class FrontierPoint:
    target: float
    risk: float
    weights: np.ndarray | None
    mean_return: float = math.nan
    error: str | None = None


def efficient_frontier(problem: PortfolioProblem, targets, cfg: OptimizerConfig = OptimizerConfig()) -> list[FrontierPoint]:
    """min_risk at each target; infeasible targets are recorded, not raised."""
    targets = [float(t) for t in targets]
    if any(b < a for a, b in zip(targets, targets[1:])):
        raise ParameterError("targets must be sorted ascending")
    out = []
    for t in targets:
        try:
            sol = min_risk(replace(problem, target_return=t), cfg)
        except (InfeasibleError, SolverError) as exc:
            out.append(FrontierPoint(t, math.nan, None, error=str(exc)))
            continue
        out.append(FrontierPoint(t, sol.risk, sol.weights, sol.mean_return))
    return out


def verify_capm_at(problem: PortfolioProblem, x, g=None, risk=None) -> CapmCheck:
    """Residuals m_i - beta_i m_M with beta_i = g_i / rho(l^M)."""
    if g is None or risk is None:
        risk, g, _ = problem.evaluate(x)
    m = problem.mean_returns
    mM = float(m @ x)
    notes = []
    if risk == 0:
        raise DegenerateError("market risk is zero; Betas undefined")
    betas = g / risk
    if mM == 0:
        notes.append("market mean return is zero; CAPM residuals reduce to asset means")
    return CapmCheck(betas, m - betas * mM, mM, float(risk), tuple(notes))


def verify_capm(solution: PortfolioSolution, problem: PortfolioProblem) -> CapmCheck:
    """CAPM residuals of a solved problem.  They vanish at an optimum whose
    budget multiplier is zero (the tangency portfolio); elsewhere they equal
    nu (m_i - m_M) / rho and are reported without judgement."""
    return verify_capm_at(problem, solution.weights)


def tangency_portfolio(problem: PortfolioProblem, cfg: OptimizerConfig = OptimizerConfig(),
                       tol: float = 1e-12, max_rounds: int = 50) -> PortfolioSolution:
    """Maximize mean return per unit of risk over the simplex (Dinkelbach).

    Requires positive risk and positive mean return near the optimum.  The
    returned solution is min_risk at target = its mean return, so its return
    constraint is active and its budget multiplier vanishes.
    """
    m = problem.mean_returns
    free = replace(problem, target_return=None)
    candidates = [np.eye(problem.n_assets)[i] for i in np.argsort(-m)]
    candidates.append(np.full(problem.n_assets, 1.0 / problem.n_assets))
    x, f = None, None
    for c in candidates:
        fc, _, _ = free.evaluate(c, cfg.risk_cfg)
        if fc > 0 and m @ c > 0:
            x, f = c, fc
            break
    if x is None:
        raise DegenerateError("tangency needs a portfolio with positive risk and positive mean return")
    theta = m @ x / f
    for _ in range(max_rounds):
        def fun(z, theta=theta):
            r, g, _ = free.evaluate(z, cfg.risk_cfg)
            return theta * r - m @ z, theta * g - m

        x, val, _, _ = _descend(fun, x, project_simplex, cfg, 0)
        r, _, _ = free.evaluate(x, cfg.risk_cfg)
        if not r > 0:
            raise DegenerateError("risk is not positive at the ratio optimum")
        theta_new = m @ x / r
        if abs(val) <= tol * max(1.0, abs(m @ x)) or abs(theta_new - theta) <= tol * abs(theta):
            theta = theta_new
            break
        theta = theta_new
    target = float(m @ x)
    sol = min_risk(replace(problem, target_return=target), replace(cfg, restarts=1), x0=x)
    if sol.risk > r:
        sol = _solution(replace(problem, target_return=target), x, sol.iterations, True, cfg)
    return sol
