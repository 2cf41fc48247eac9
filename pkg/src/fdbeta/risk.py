"""f-divergence induced risk of empirical loss distributions.

The risk of a discrete loss ``x`` with base probabilities ``pi`` is

    rho(x) = max { sum_k pi_k Z_k x_k : Z >= 0, sum pi Z = 1, sum pi phi(Z) <= delta }
           = inf_{t > 0, mu} t * (delta + mu + sum_k pi_k psi(x_k / t - mu)).

A multi-path loss (S paths of T steps, path probabilities p_s) is the single
distribution on S*T atoms with base probabilities ``p_s / T``; the identifier
is reported as ``q_st = Z_st / T`` so that ``sum_s sum_t p_s q_st = 1``.

Both solvers work through the optimality system

    E[psi'(x/t - mu)] = 1,     E[phi(psi'(x/t - mu))] = delta,

whose solution gives the optimal density ``Z = psi'(x/t - mu)``.  Internally
the losses are standardized to ``d = (max x - x) / range`` and the inner
unknown is ``y_top = max x / t - mu``, the argument at the largest loss, which
avoids cancellation when ``t`` is small.  ``rho_dual`` finds the roots with
Brent's method and reports ``E_Q[x]``; ``rho_primal`` uses nested bisection
and reports the primal objective.  Total variation has a piecewise-linear
conjugate and is solved exactly in closed form instead.
"""

from __future__ import annotations

import math
from functools import lru_cache
from dataclasses import dataclass, field
from enum import Enum

import numpy as np
from scipy.optimize import brentq
from scipy.special import logsumexp

from .divergence import (
    DivergenceSpec,
    Kind,
    dphi_values,
    dpsi_values,
    kl,
    phi_values,
    point_mass_divergence,
    psi_values,
)
from .errors import DataError, ParameterError, ShapeError, SolverError

LOG_TAU_MIN = -700.0
LOG_TAU_MAX = 40.0


class Method(str, Enum):
    DUAL = "dual"
    PRIMAL = "primal"
    AUTO = "auto"


@dataclass(frozen=True)
class SolverConfig:
    tol_value: float = 1e-9
    tol_feas: float = 1e-10
    max_iter: int = 200
    method: Method = Method.AUTO

    def __post_init__(self):
        if self.tol_value <= 0 or self.tol_feas <= 0:
            raise ParameterError("tolerances must be positive")
        if self.max_iter < 1:
            raise ParameterError("max_iter must be >= 1")
        object.__setattr__(self, "method", Method(self.method))


DEFAULT_CONFIG = SolverConfig()


@dataclass(frozen=True, eq=False)
class EmpiricalLoss:
    """S x T loss observations with path probabilities.

    A 1-D array is a single path (S = 1).
    """

    losses: np.ndarray
    path_probs: np.ndarray | None = None

    def __post_init__(self):
        arr = np.array(self.losses, dtype=float)
        if arr.ndim == 1:
            arr = arr[None, :]
        if arr.ndim != 2 or arr.shape[0] < 1 or arr.shape[1] < 1:
            raise ShapeError(f"losses must be 1-D or S x T, got shape {arr.shape}")
        if not np.all(np.isfinite(arr)):
            raise DataError("losses contain non-finite entries")
        S = arr.shape[0]
        if self.path_probs is None:
            p = np.full(S, 1.0 / S)
        else:
            p = np.array(self.path_probs, dtype=float).ravel()
            if p.shape != (S,):
                raise ShapeError(f"path_probs has length {p.size}, expected {S}")
            if np.any(p < 0) or abs(p.sum() - 1.0) > 1e-12:
                raise ParameterError("path_probs must be nonnegative and sum to 1")
        arr.setflags(write=False)
        p.setflags(write=False)
        object.__setattr__(self, "losses", arr)
        object.__setattr__(self, "path_probs", p)

    @property
    def S(self) -> int:
        return self.losses.shape[0]

    @property
    def T(self) -> int:
        return self.losses.shape[1]

    def atoms(self) -> tuple[np.ndarray, np.ndarray]:
        """Flattened (values, base probabilities)."""
        pi = np.repeat(self.path_probs / self.T, self.T)
        return self.losses.ravel(), pi

    def mean(self) -> float:
        x, pi = self.atoms()
        return float(pi @ x)

    def max(self) -> float:
        x, pi = self.atoms()
        return float(x[pi > 0].max())


def as_loss(loss) -> EmpiricalLoss:
    return loss if isinstance(loss, EmpiricalLoss) else EmpiricalLoss(loss)


@dataclass(frozen=True, eq=False)
class RiskResult:
    value: float
    identifier: np.ndarray
    t_star: float | None
    mu_star: float | None
    attained: bool
    iterations: int
    residuals: tuple[float, float]
    method: str = ""
    alpha_bar: float | None = None
    saturated: bool = False
    diagnostics: dict = field(default_factory=dict)

    @property
    def density(self) -> np.ndarray:
        """Z = dQ/dP on the S x T atoms."""
        return self.identifier * self.identifier.shape[1]

    def weighted_sum(self, other_losses, path_probs=None) -> float:
        """sum_s sum_t p_s q*_st l_st for another loss array of the same shape."""
        arr = np.asarray(other_losses, dtype=float)
        if arr.ndim == 1:
            arr = arr[None, :]
        if arr.shape != self.identifier.shape:
            raise ShapeError(f"shape {arr.shape} does not match identifier {self.identifier.shape}")
        p = np.full(arr.shape[0], 1.0 / arr.shape[0]) if path_probs is None else np.asarray(path_probs)
        return float(np.einsum("s,st,st->", p, self.identifier, arr))


# ---------------------------------------------------------------------------
# shared helpers


def _check_delta(delta: float) -> float:
    delta = float(delta)
    if not delta >= 0 or not math.isfinite(delta):
        raise ParameterError(f"delta must be a finite nonnegative number, got {delta}")
    return delta


def alpha_bar(spec: DivergenceSpec, delta: float) -> float:
    """Largest alpha in [0, 1) with phi(0) alpha + phi(1/(1-alpha)) (1-alpha) <= delta.

    The left side is nondecreasing in alpha, so bisection on the tail mass
    ``1 - alpha`` applies.  Returns a value arbitrarily close to 1 when the
    condition holds for all alpha.
    """
    return _alpha_bar(spec, _check_delta(delta))


@lru_cache(maxsize=1024)
def _alpha_bar(spec: DivergenceSpec, delta: float) -> float:
    lo, hi = 0.0, 1.0  # tail mass: g(hi) = 0 <= delta
    if point_mass_divergence(spec, 1e-300) <= delta:
        return 1.0 - 1e-300
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if mid <= lo or mid >= hi:
            break
        if point_mass_divergence(spec, mid) <= delta:
            hi = mid
        else:
            lo = mid
    return 1.0 - hi


def cvar_bound_holds(spec: DivergenceSpec, delta: float, alpha: float) -> bool:
    """Whether phi(0) alpha + phi(1/(1-alpha)) (1-alpha) <= delta.

    When it holds the scaled CVaR tail indicator lies in the divergence ball,
    hence CVaR_alpha <= rho_{phi,delta}.
    """
    if not 0 <= alpha < 1:
        raise ParameterError("alpha must lie in [0, 1)")
    delta = _check_delta(delta)
    return point_mass_divergence(spec, 1.0 - alpha) <= delta


def _to_identifier(Z: np.ndarray, loss: EmpiricalLoss) -> np.ndarray:
    q = (Z / loss.T).reshape(loss.S, loss.T)
    q.setflags(write=False)
    return q


def _trivial_result(loss, x, pi, Z, value, method, attained, saturated, spec, delta, **diag):
    if spec is not None:
        d = float(pi @ phi_values(spec, Z))
        res = (float(pi @ Z) - 1.0, d - delta if attained else 0.0)
        ab = alpha_bar(spec, delta)
    else:
        res, ab = (0.0, 0.0), None
    return RiskResult(
        value=float(value),
        identifier=_to_identifier(Z, loss),
        t_star=None,
        mu_star=None,
        attained=attained,
        iterations=0,
        residuals=res,
        method=method,
        alpha_bar=ab,
        saturated=saturated,
        diagnostics=diag,
    )


def _special_cases(loss, spec, delta, cfg, method):
    """Return a finished RiskResult for delta = 0, constant loss or a
    saturated ball; otherwise None."""
    x, pi = loss.atoms()
    live = pi > 0
    xmax = x[live].max()
    xmin = x[live].min()
    if xmax == xmin:
        Z = np.ones_like(x)
        return _trivial_result(loss, x, pi, Z, xmax, method, True, False, spec, delta, reason="constant loss")
    if delta == 0.0:
        Z = np.ones_like(x)
        return _trivial_result(loss, x, pi, Z, float(pi @ x), method, True, False, spec, delta, reason="delta = 0")
    top = live & (x == xmax)
    ptop = float(pi[top].sum())
    dsat = point_mass_divergence(spec, ptop)
    if delta >= dsat - cfg.tol_feas:
        Z = np.where(top, 1.0 / ptop, 0.0)
        return _trivial_result(
            loss, x, pi, Z, xmax, method, False, True, spec, delta,
            reason="ball contains the point mass on the maximum", saturation_radius=dsat,
        )
    return None


# ---------------------------------------------------------------------------
# total variation: exact piecewise-linear solution


def _tv_dual_density(x, pi, spec, delta):
    """Move ``delta/scale`` of probability from the smallest losses to the largest."""
    live = pi > 0
    xmax = x[live].max()
    top = live & (x == xmax)
    ptop = pi[top].sum()
    budget = min(delta / spec.scale, 1.0 - ptop)
    Z = np.where(live, 1.0, 0.0)
    Z[top] = 1.0 + budget / ptop
    remaining = budget
    for k in np.argsort(x, kind="stable"):
        if remaining <= 0:
            break
        if top[k] or pi[k] == 0:
            continue
        take = min(remaining, pi[k])
        Z[k] = 1.0 - take / pi[k]
        remaining -= take
    return Z


def _tv_primal(x, pi, spec, delta):
    """min over breakpoints c of (max x - c) delta / scale + E max(x, c)."""
    live = pi > 0
    xmax = x[live].max()
    cands = np.unique(x[live])
    vals = (xmax - cands) * (delta / spec.scale) + np.array([pi @ np.maximum(x, c) for c in cands])
    j = int(np.argmin(vals))
    c = cands[j]
    t = (xmax - c) / spec.scale
    return float(vals[j]), c, t


def _solve_tv(loss, spec, delta, cfg, method):
    x, pi = loss.atoms()
    Z = _tv_dual_density(x, pi, spec, delta)
    dual_value = float(pi @ (Z * x))
    primal_value, c, t = _tv_primal(x, pi, spec, delta)
    d = float(pi @ phi_values(spec, Z))
    value = primal_value if method == Method.PRIMAL.value else dual_value
    if t > 0:
        mu = (c + 0.5 * t * spec.scale) / t - spec.shift
        t_out, mu_out = float(t), float(mu)
    else:
        t_out = mu_out = None
    return RiskResult(
        value=value,
        identifier=_to_identifier(Z, loss),
        t_star=t_out,
        mu_star=mu_out,
        attained=True,
        iterations=len(x),
        residuals=(float(pi @ Z) - 1.0, d - delta),
        method=method,
        alpha_bar=alpha_bar(spec, delta),
        saturated=False,
        diagnostics={"primal_value": primal_value, "dual_value": dual_value},
    )


# ---------------------------------------------------------------------------
# smooth kinds: standardized optimality system


@dataclass
class _Std:
    x: np.ndarray
    pi: np.ndarray
    xmax: float
    span: float
    d: np.ndarray
    ptop: float
    y0: float
    ycap: float


def _standardize(x, pi, spec) -> _Std:
    live = pi > 0
    xmax = float(x[live].max())
    span = float(xmax - x[live].min())
    d = np.where(live, (xmax - x) / span, 1.0)  # atoms without base mass carry no weight
    ptop = float(pi[live & (x == xmax)].sum())
    y0 = float(dphi_values(spec, np.array(1.0)))
    ycap = float(dphi_values(spec, np.array(1.0 / ptop)))
    return _Std(x, pi, xmax, span, d, ptop, y0, ycap)


def _kl_y_top(st: _Std, spec, tau):
    a = spec.scale
    return spec.shift + a * (1.0 - logsumexp(-st.d / (a * tau), b=st.pi))


def _inner_brent(st: _Std, spec, tau, cfg):
    if spec.kind is Kind.KL:
        return _kl_y_top(st, spec, tau), 0
    shift = st.d / tau

    def f(y):
        return float(st.pi @ dpsi_values(spec, y - shift)) - 1.0

    if st.ycap <= st.y0 or f(st.y0) >= 0:
        return st.y0, 0
    if f(st.ycap) <= 0:
        return st.ycap, 0
    y, info = brentq(f, st.y0, st.ycap, xtol=1e-300, rtol=4 * np.finfo(float).eps,
                     maxiter=cfg.max_iter, full_output=True, disp=False)
    if not info.converged:
        raise SolverError("inner root (normalization) did not converge", residuals=(f(y), math.nan))
    return y, info.iterations


def _density(st: _Std, spec, tau, y_top):
    return dpsi_values(spec, y_top - st.d / tau)


def _finish(loss, spec, delta, st: _Std, log_tau, y_top, iterations, method, primal: bool):
    tau = math.exp(log_tau)
    y = y_top - st.d / tau
    Z = np.where(st.pi > 0, dpsi_values(spec, y), 0.0)
    mass = float(st.pi @ Z)
    div = float(st.pi @ phi_values(spec, Z))
    t = st.span * tau
    mu = st.xmax / t - y_top
    Zn = Z / mass
    dual_value = float(st.pi @ (Zn * st.x))
    with np.errstate(invalid="ignore"):
        psis = np.where(np.isneginf(y), -spec.phi_zero, psi_values(spec, y))
        epsi = float(st.pi @ np.where(st.pi > 0, psis, 0.0))
    primal_value = st.xmax + t * (delta - y_top + epsi)
    return RiskResult(
        value=primal_value if primal else dual_value,
        identifier=_to_identifier(Zn, loss),
        t_star=float(t),
        mu_star=float(mu),
        attained=True,
        iterations=int(iterations),
        residuals=(mass - 1.0, div - delta),
        method=method,
        alpha_bar=alpha_bar(spec, delta),
        saturated=False,
        diagnostics={"primal_value": primal_value, "dual_value": dual_value},
    )


def rho_dual(loss, spec: DivergenceSpec, delta: float, cfg: SolverConfig = DEFAULT_CONFIG) -> RiskResult:
    """Worst-case expected loss over the divergence ball (dual form).

    The multipliers of the two dual constraints are found with Brent's method
    (outer: divergence budget in log t; inner: normalization), and the
    reported value is the expectation of the loss under the optimal measure.
    If the ball contains the point mass on the maximum loss the result is the
    maximum, with ``attained=False`` and no multipliers.
    """
    loss = as_loss(loss)
    delta = _check_delta(delta)
    done = _special_cases(loss, spec, delta, cfg, Method.DUAL.value)
    if done is not None:
        return done
    if spec.kind is Kind.TOTAL_VARIATION:
        return _solve_tv(loss, spec, delta, cfg, Method.DUAL.value)
    x, pi = loss.atoms()
    st = _standardize(x, pi, spec)
    counter = [0]

    def outer(log_tau):
        tau = math.exp(log_tau)
        y, it = _inner_brent(st, spec, tau, cfg)
        counter[0] += it + 1
        return float(st.pi @ phi_values(spec, _density(st, spec, tau, y))) - delta

    f_lo, f_hi = outer(LOG_TAU_MIN), outer(LOG_TAU_MAX)
    if not (f_lo > 0 > f_hi):
        raise SolverError("could not bracket the divergence multiplier", residuals=(f_lo, f_hi))
    log_tau, info = brentq(outer, LOG_TAU_MIN, LOG_TAU_MAX, xtol=1e-14, rtol=4 * np.finfo(float).eps,
                           maxiter=cfg.max_iter, full_output=True, disp=False)
    if not info.converged:
        raise SolverError("outer root (divergence budget) did not converge")
    y_top, _ = _inner_brent(st, spec, math.exp(log_tau), cfg)
    return _finish(loss, spec, delta, st, log_tau, y_top, counter[0], Method.DUAL.value, primal=False)


# ---------------------------------------------------------------------------
# primal: vectorized nested bisection


def _bisect_multipliers(d, pi, ptop, spec, delta, max_iter):
    """Solve the optimality system for a batch of standardized losses.

    ``d`` is B x N (each row in [0, 1] with zeros at its maxima), ``pi`` is the
    shared base measure and ``ptop`` the base mass at each row's maximum.
    Returns (log_tau, y_top, iterations) arrays.
    """
    B = d.shape[0]
    y0 = float(dphi_values(spec, np.array(1.0)))
    ycap = dphi_values(spec, 1.0 / ptop)
    eps = np.finfo(float).eps

    def inner(tau):
        shift = d / tau[:, None]
        if spec.kind is Kind.KL:
            a = spec.scale
            return spec.shift + a * (1.0 - logsumexp(-shift / a, b=pi, axis=1)), 0
        lo = np.full(B, y0)
        hi = ycap.copy()
        n = 0
        while n < max_iter:
            mid = 0.5 * (lo + hi)
            mass = dpsi_values(spec, mid[:, None] - shift) @ pi
            above = mass > 1.0
            hi = np.where(above, mid, hi)
            lo = np.where(above, lo, mid)
            n += 1
            if np.all(hi - lo <= 2 * eps * np.maximum(np.abs(lo), np.abs(hi))):
                break
        return 0.5 * (lo + hi), n

    lo = np.full(B, LOG_TAU_MIN)
    hi = np.full(B, LOG_TAU_MAX)
    total = 0
    for _ in range(max_iter):
        mid = 0.5 * (lo + hi)
        tau = np.exp(mid)
        y, n = inner(tau)
        total += n + 1
        Z = dpsi_values(spec, y[:, None] - d / tau[:, None])
        div = phi_values(spec, Z) @ pi
        over = div > delta
        lo = np.where(over, mid, lo)
        hi = np.where(over, hi, mid)
        if np.all(hi - lo <= 1e-14 * np.maximum(1.0, np.abs(mid))):
            break
    log_tau = 0.5 * (lo + hi)
    y, n = inner(np.exp(log_tau))
    return log_tau, y, total + n


def rho_primal(loss, spec: DivergenceSpec, delta: float, cfg: SolverConfig = DEFAULT_CONFIG) -> RiskResult:
    """Risk from the minimization over (t, mu).

    Solves E[psi'(x/t - mu)] = 1 (inner bisection; the left side is monotone
    in mu) and E[phi(psi'(x/t - mu))] = delta (outer bisection in log t) and
    reports t (delta + mu + E psi(x/t - mu)).  When the infimum is not
    attained (the ball contains the point mass on the maximum) the dual
    result is returned with ``attained=False``.
    """
    loss = as_loss(loss)
    delta = _check_delta(delta)
    done = _special_cases(loss, spec, delta, cfg, Method.PRIMAL.value)
    if done is not None:
        return done
    if spec.kind is Kind.TOTAL_VARIATION:
        return _solve_tv(loss, spec, delta, cfg, Method.PRIMAL.value)
    x, pi = loss.atoms()
    st = _standardize(x, pi, spec)
    log_tau, y, iters = _bisect_multipliers(st.d[None, :], pi, np.array([st.ptop]), spec, delta, cfg.max_iter)
    res = _finish(loss, spec, delta, st, float(log_tau[0]), float(y[0]), iters, Method.PRIMAL.value, primal=True)
    if abs(res.residuals[0]) > 1e-8 or abs(res.residuals[1]) > 1e-8:
        raise SolverError("characterizing equations not solved to tolerance", residuals=res.residuals)
    return res


def rho(loss, spec: DivergenceSpec, delta: float, cfg: SolverConfig = DEFAULT_CONFIG) -> RiskResult:
    """Dispatch on ``cfg.method`` (``auto`` uses the dual solver)."""
    if cfg.method is Method.PRIMAL:
        return rho_primal(loss, spec, delta, cfg)
    return rho_dual(loss, spec, delta, cfg)


def rho_many(losses, spec: DivergenceSpec, delta: float, max_iter: int = 200) -> tuple[np.ndarray, np.ndarray]:
    """Risk values and densities for many single-path losses at once.

    ``losses`` is B x T (uniform base measure).  Returns (values, Z) with Z
    of shape B x T.  Uses the same bisection as :func:`rho_primal`, run on
    all rows together; values are expectations under the optimal measure.
    """
    L = np.asarray(losses, dtype=float)
    if L.ndim != 2:
        raise ShapeError("losses must be B x T")
    delta = _check_delta(delta)
    B, T = L.shape
    pi = np.full(T, 1.0 / T)
    xmax = L.max(axis=1)
    span = xmax - L.min(axis=1)
    values = np.empty(B)
    Z = np.ones((B, T))
    const = span == 0
    values[const] = xmax[const]
    if delta == 0:
        values[~const] = L[~const].mean(axis=1)
        return values, Z
    top = L == xmax[:, None]
    ptop = top.sum(axis=1) / T
    dsat = np.array([point_mass_divergence(spec, p) for p in ptop])
    sat = ~const & (delta >= dsat - DEFAULT_CONFIG.tol_feas)
    values[sat] = xmax[sat]
    Z[sat] = top[sat] / ptop[sat, None]
    rest = ~const & ~sat
    if not np.any(rest):
        return values, Z
    if spec.kind is Kind.TOTAL_VARIATION:
        for i in np.flatnonzero(rest):
            Zi = _tv_dual_density(L[i], pi, spec, delta)
            Z[i] = Zi
            values[i] = pi @ (Zi * L[i])
        return values, Z
    d = (xmax[rest, None] - L[rest]) / span[rest, None]
    log_tau, y, _ = _bisect_multipliers(d, pi, ptop[rest], spec, delta, max_iter)
    Zr = dpsi_values(spec, y[:, None] - d / np.exp(log_tau)[:, None])
    Zr /= (Zr @ pi)[:, None]
    Z[rest] = Zr
    values[rest] = (Zr * L[rest]) @ pi
    return values, Z


# ---------------------------------------------------------------------------
# comparators


def cvar(loss, alpha: float) -> RiskResult:
    """Tail mean of the upper (1 - alpha) share of the loss distribution.

    The atom straddling the VaR level is split fractionally (tied values are
    treated as one atom).  The identifier is the scaled tail indicator.
    """
    if not 0 <= alpha < 1:
        raise ParameterError("alpha must lie in [0, 1)")
    loss = as_loss(loss)
    x, pi = loss.atoms()
    tail = 1.0 - alpha
    Z = np.zeros_like(x)
    remaining = tail
    for v in np.unique(x)[::-1]:
        if remaining <= 0:
            break
        grp = x == v
        mass = pi[grp].sum()
        if mass == 0:
            continue
        take = min(mass, remaining)
        Z[grp] = take / mass / tail
        remaining -= take
    value = float(pi @ (Z * x))
    return RiskResult(
        value=value,
        identifier=_to_identifier(Z, loss),
        t_star=None,
        mu_star=None,
        attained=True,
        iterations=0,
        residuals=(float(pi @ Z) - 1.0, 0.0),
        method="cvar",
    )


def evar(loss, alpha: float, cfg: SolverConfig = DEFAULT_CONFIG) -> float:
    """Entropic VaR at confidence 1 - alpha: KL-ball risk with radius -ln(alpha)."""
    if not 0 < alpha <= 1:
        raise ParameterError("alpha must lie in (0, 1]")
    return rho_dual(loss, kl(), -math.log(alpha), cfg).value


def evar_mgf(loss, alpha: float, tol: float = 1e-13) -> float:
    """EVaR via inf_{z > 0} z^-1 ln(E[exp(z X)] / alpha).

    Independent of the divergence machinery.  With w = 1/z the objective
    w * (ln E exp(X / w) - ln alpha) is a perspective, hence convex in w, and is
    minimized by golden-section search on [0, w_max] with w_max found by
    doubling.
    """
    if not 0 < alpha <= 1:
        raise ParameterError("alpha must lie in (0, 1]")
    loss = as_loss(loss)
    x, pi = loss.atoms()
    live = pi > 0
    x, pi = x[live], pi[live]
    xmax = x.max()
    span = xmax - x.min()
    if span == 0:
        return float(xmax)
    u = (x - xmax) / span
    la = math.log(alpha)

    def f(w):
        if w <= 0:
            return 0.0
        return w * (logsumexp(u / w, b=pi) - la)

    if alpha == 1:
        return float(pi @ x)
    hi = 1.0
    while f(2 * hi) < f(hi) and hi < 1e300:
        hi *= 2
    a, b = 0.0, 2 * hi
    g = (math.sqrt(5) - 1) / 2
    c, e = b - g * (b - a), a + g * (b - a)
    fc, fe = f(c), f(e)
    while b - a > tol * max(1.0, b):
        if fc < fe:
            b, e, fe = e, c, fc
            c = b - g * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, e, fe
            e = a + g * (b - a)
            fe = f(e)
    best = min(f(a), f(b), fc, fe)
    return float(xmax + span * best)
