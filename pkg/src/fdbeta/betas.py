"""Beta metrics against a market portfolio.

All identifier-weighted Betas share one form: with ``q*`` the optimal
(risk-identifying) measure for the market series ``m``,

    beta_i = sum_s sum_t p_s q*_st a^i_st / R(m)

where ``a^i`` is the asset series of the same type (losses, deviations or
drawdowns) and ``R(m) = sum p_s q*_st m_st`` the market risk.  f-Betas take
``q*`` from the divergence-ball risk; the CDaR Beta takes it from the CVaR
tail identifier of the market drawdowns; the ERoD Beta weights the dates on
which the market drawdown exceeds a threshold uniformly.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from enum import Enum

import numpy as np
from scipy.stats import rankdata

from .divergence import DivergenceSpec, point_mass_divergence
from .errors import DegenerateError, FDBetaError, ParameterError, ShapeError
from .market import MarketFrame, deviations, drawdown_asset, drawdown_market
from .risk import DEFAULT_CONFIG, EmpiricalLoss, SolverConfig, cvar, rho

DRIFT_TOL = 1e-10


class BetaKind(str, Enum):
    FRETURN = "freturn"
    FDEVIATION = "fdeviation"
    FDRAWDOWN = "fdrawdown"
    STANDARD = "standard"
    CDAR = "cdar"
    EROD = "erod"


@dataclass(frozen=True, eq=False)
class BetaReport:
    kind: BetaKind
    tickers: tuple[str, ...]
    betas: np.ndarray
    denominator: float
    identifier: np.ndarray | None = None
    delta: float | None = None
    spec: DivergenceSpec | None = None
    params: dict = field(default_factory=dict)
    warnings: tuple[str, ...] = ()

    def as_dict(self) -> dict[str, float]:
        return dict(zip(self.tickers, map(float, self.betas)))


def _names(tickers, n):
    if tickers is None:
        return tuple(f"asset{i}" for i in range(n))
    tickers = tuple(tickers)
    if len(tickers) != n:
        raise ShapeError(f"{len(tickers)} tickers for {n} asset columns")
    return tickers


def _single_path(asset, market):
    """Coerce to (T x I asset array, length-T market vector, squeeze flag)."""
    m = np.asarray(market, dtype=float)
    a = np.asarray(asset, dtype=float)
    if m.ndim != 1:
        raise ShapeError("market series must be 1-D")
    squeeze = a.ndim == 1
    if squeeze:
        a = a[:, None]
    if a.ndim != 2 or a.shape[0] != m.size:
        raise ShapeError(f"asset shape {np.shape(asset)} not aligned with market length {m.size}")
    return a, m, squeeze


def clamp_delta(spec: DivergenceSpec, delta: float, min_mass: float) -> tuple[float, list[str]]:
    """Cap delta at the largest meaningful radius, with a warning."""
    if delta < 0:
        raise ParameterError("delta must be nonnegative")
    cap = point_mass_divergence(spec, min_mass)
    if math.isfinite(cap) and delta > cap:
        return cap, [f"delta={delta:g} exceeds the maximal radius {cap:.6g}; clamped"]
    return delta, []


def _identifier_beta(A, M, spec, delta, path_probs, cfg, kind, tickers, what):
    """A is S x T x I, M is S x T."""
    loss = EmpiricalLoss(M, path_probs)
    d_used, notes = clamp_delta(spec, delta, float(loss.path_probs.min()) / loss.T)
    res = rho(loss, spec, d_used, cfg)
    if not res.value > 0:
        raise DegenerateError(f"market {what} has nonpositive robust risk {res.value:.6g}; Beta undefined")
    w = loss.path_probs[:, None] * res.identifier
    numer = np.einsum("st,sti->i", w, A)
    return BetaReport(
        kind=kind,
        tickers=_names(tickers, A.shape[2]),
        betas=numer / res.value,
        denominator=res.value,
        identifier=res.identifier,
        delta=d_used,
        spec=spec,
        params={"requested_delta": delta, "attained": res.attained},
        warnings=tuple(notes),
    )


def f_beta(asset_losses, market_losses, spec: DivergenceSpec, delta: float, path_probs=None,
           tickers=None, cfg: SolverConfig = DEFAULT_CONFIG) -> BetaReport:
    """f-Beta on losses.

    Single path: ``market_losses`` has length T and ``asset_losses`` is T or
    T x I.  Multiple paths: market S x T, assets S x T or S x T x I, with
    optional path probabilities.
    """
    M = np.asarray(market_losses, dtype=float)
    A = np.asarray(asset_losses, dtype=float)
    if M.ndim == 1:
        A, M, _ = _single_path(A, M)
        A, M = A[None], M[None]
    elif M.ndim == 2:
        if A.ndim == 2:
            A = A[..., None]
        if A.ndim != 3 or A.shape[:2] != M.shape:
            raise ShapeError(f"asset losses {np.shape(asset_losses)} not aligned with market {M.shape}")
    else:
        raise ShapeError("market losses must be T or S x T")
    return _identifier_beta(A, M, spec, delta, path_probs, cfg, BetaKind.FRETURN, tickers, "loss")


def f_beta_deviation(asset_returns, market_returns, spec: DivergenceSpec, delta: float,
                     tickers=None, cfg: SolverConfig = DEFAULT_CONFIG) -> BetaReport:
    """f-Beta on deviations d_t = mean(r) - r_t (single path)."""
    A, m, _ = _single_path(asset_returns, market_returns)
    rep = _identifier_beta(deviations(A)[None], deviations(m)[None], spec, delta, None, cfg,
                           BetaKind.FDEVIATION, tickers, "deviation")
    return rep


def f_beta_drawdown_dd(asset_dd, market_dd, spec: DivergenceSpec, delta: float,
                       tickers=None, cfg: SolverConfig = DEFAULT_CONFIG) -> BetaReport:
    """f-Drawdown Beta from precomputed drawdown series."""
    A, m, _ = _single_path(asset_dd, market_dd)
    if not np.any(m > 0):
        raise DegenerateError("market has no drawdowns; drawdown Beta undefined")
    return _identifier_beta(A[None], m[None], spec, delta, None, cfg, BetaKind.FDRAWDOWN, tickers, "drawdown")


def f_beta_drawdown(asset_returns, market_returns, spec: DivergenceSpec, delta: float,
                    tickers=None, cfg: SolverConfig = DEFAULT_CONFIG) -> BetaReport:
    """f-Drawdown Beta: identifier of the market drawdowns applied to the
    assets' drawdown-window returns."""
    A, m, _ = _single_path(asset_returns, market_returns)
    _, dd, peaks = drawdown_market(m)
    return f_beta_drawdown_dd(drawdown_asset(A, peaks), dd, spec, delta, tickers, cfg)


def standard_beta(asset_returns, market_returns):
    """cov(r^i, r^M) / var(r^M) with population moments."""
    A, m, squeeze = _single_path(asset_returns, market_returns)
    dm = m - m.mean()
    var = float(dm @ dm) / m.size
    if var <= 0:
        raise DegenerateError("market returns have zero variance")
    cov = (A - A.mean(axis=0)).T @ dm / m.size
    b = cov / var
    return float(b[0]) if squeeze else b


def standard_beta_report(asset_returns, market_returns, tickers=None) -> BetaReport:
    A, m, _ = _single_path(asset_returns, market_returns)
    b = np.atleast_1d(standard_beta(A, m))
    return BetaReport(BetaKind.STANDARD, _names(tickers, A.shape[1]), b, float(np.var(m)))


def cdar_beta_dd(asset_dd, market_dd, alpha: float, tickers=None) -> BetaReport:
    """CDaR Beta from drawdown series: CVaR tail identifier of the market
    drawdowns (with fractional splitting at the VaR level)."""
    A, m, _ = _single_path(asset_dd, market_dd)
    if not np.any(m > 0):
        raise DegenerateError("market has no drawdowns; CDaR Beta undefined")
    res = cvar(m, alpha)
    if not res.value > 0:
        raise DegenerateError("market CDaR is zero")
    q = res.identifier[0]
    return BetaReport(BetaKind.CDAR, _names(tickers, A.shape[1]), (q @ A) / res.value, res.value,
                      identifier=res.identifier, params={"alpha": alpha})


def cdar_beta(asset_returns, market_returns, alpha: float, tickers=None) -> BetaReport:
    A, m, _ = _single_path(asset_returns, market_returns)
    _, dd, peaks = drawdown_market(m)
    return cdar_beta_dd(drawdown_asset(A, peaks), dd, alpha, tickers)


def erod_beta_dd(asset_dd, market_dd, epsilon: float = 0.0, tickers=None) -> BetaReport:
    """ERoD Beta from drawdown series: sum of asset drawdowns over the dates
    where the market drawdown exceeds ``epsilon`` (strictly), divided by the
    sum of market drawdowns over the same dates.  ``epsilon=0`` is ERoD_{0+}.
    """
    if epsilon < 0:
        raise ParameterError("epsilon must be nonnegative")
    A, m, _ = _single_path(asset_dd, market_dd)
    hit = m > epsilon
    if not hit.any():
        raise DegenerateError(f"no market drawdown exceeds epsilon={epsilon:g}")
    denom = float(m[hit].sum())
    q = hit / hit.sum()
    return BetaReport(BetaKind.EROD, _names(tickers, A.shape[1]), A[hit].sum(axis=0) / denom,
                      denom / hit.sum(), identifier=q[None], params={"epsilon": epsilon})


def erod_beta(asset_returns, market_returns, epsilon: float = 0.0, tickers=None) -> BetaReport:
    A, m, _ = _single_path(asset_returns, market_returns)
    _, dd, peaks = drawdown_market(m)
    return erod_beta_dd(drawdown_asset(A, peaks), dd, epsilon, tickers)


# ---------------------------------------------------------------------------
# requests, sweeps, correlations


@dataclass(frozen=True)
class BetaRequest:
    kind: BetaKind
    spec: DivergenceSpec | None = None
    delta: float = 0.0
    alpha: float = 0.5
    epsilon: float = 0.0
    cfg: SolverConfig = DEFAULT_CONFIG

    def __post_init__(self):
        object.__setattr__(self, "kind", BetaKind(self.kind))
        if self.kind in (BetaKind.FRETURN, BetaKind.FDEVIATION, BetaKind.FDRAWDOWN) and self.spec is None:
            raise ParameterError(f"{self.kind.value} Beta needs a divergence spec")
        if not 0 <= self.alpha < 1:
            raise ParameterError("alpha must lie in [0, 1)")
        if self.epsilon < 0 or self.delta < 0:
            raise ParameterError("delta and epsilon must be nonnegative")

    def label(self) -> str:
        k = self.kind
        if k is BetaKind.STANDARD:
            return "standard"
        if k is BetaKind.CDAR:
            return f"cdar[alpha={self.alpha:g}]"
        if k is BetaKind.EROD:
            return "erod[eps=0+]" if self.epsilon == 0 else f"erod[eps={self.epsilon:g}]"
        prefix = {BetaKind.FRETURN: "beta", BetaKind.FDEVIATION: "beta_dev", BetaKind.FDRAWDOWN: "beta_dd"}[k]
        return f"{prefix}[delta={self.delta:g}]"


def compute_beta(request: BetaRequest, frame: MarketFrame) -> BetaReport:
    k, R, m, names = request.kind, frame.returns, frame.market_returns, frame.tickers
    if k is BetaKind.FRETURN:
        return f_beta(-R, -m, request.spec, request.delta, tickers=names, cfg=request.cfg)
    if k is BetaKind.FDEVIATION:
        return f_beta_deviation(R, m, request.spec, request.delta, names, request.cfg)
    if k is BetaKind.FDRAWDOWN:
        return f_beta_drawdown_dd(frame.asset_drawdowns, frame.market_drawdowns, request.spec, request.delta,
                                  names, request.cfg)
    if k is BetaKind.STANDARD:
        return standard_beta_report(R, m, names)
    if k is BetaKind.CDAR:
        return cdar_beta_dd(frame.asset_drawdowns, frame.market_drawdowns, request.alpha, names)
    return erod_beta_dd(frame.asset_drawdowns, frame.market_drawdowns, request.epsilon, names)


def classify_drift(values, tol: float = DRIFT_TOL) -> str:
    """'increasing', 'decreasing', 'flat' or 'non-monotone' for a sequence."""
    v = np.asarray(values, dtype=float)
    if v.size < 2 or np.any(np.isnan(v)):
        return "flat" if v.size < 2 else "non-monotone"
    diff = np.diff(v)
    if np.all(np.abs(diff) <= tol):
        return "flat"
    if np.all(diff > tol):
        return "increasing"
    if np.all(diff < -tol):
        return "decreasing"
    return "non-monotone"


@dataclass(frozen=True, eq=False)
class Sweep:
    request: BetaRequest
    deltas: tuple[float, ...]
    tickers: tuple[str, ...]
    betas: np.ndarray  # assets x deltas
    reports: tuple[BetaReport | None, ...]
    drift: tuple[str, ...]
    warnings: tuple[str, ...]

    def columns(self) -> list[str]:
        return [replace(self.request, delta=d).label() for d in self.deltas]


def delta_sweep(request: BetaRequest, frame: MarketFrame, deltas) -> Sweep:
    """One Beta per radius for each asset, plus each asset's drift direction."""
    deltas = tuple(float(d) for d in deltas)
    if not deltas:
        raise ParameterError("empty delta list")
    if any(b < a for a, b in zip(deltas, deltas[1:])):
        raise ParameterError("deltas must be sorted ascending")
    if request.kind not in (BetaKind.FRETURN, BetaKind.FDEVIATION, BetaKind.FDRAWDOWN):
        raise ParameterError("delta sweeps apply to f-Beta kinds only")
    out = np.full((len(frame.tickers), len(deltas)), np.nan)
    reports, notes = [], []
    for j, d in enumerate(deltas):
        try:
            rep = compute_beta(replace(request, delta=d), frame)
        except FDBetaError as exc:
            reports.append(None)
            notes.append(f"delta={d:g}: {exc}")
            continue
        out[:, j] = rep.betas
        reports.append(rep)
        notes.extend(f"delta={d:g}: {w}" for w in rep.warnings)
    drift = tuple(classify_drift(row) for row in out)
    return Sweep(request, deltas, frame.tickers, out, tuple(reports), drift, tuple(notes))


def period_correlations(col_a, col_b) -> tuple[float, float]:
    """Pearson and Spearman (average ranks) correlation of two Beta columns."""
    a = np.asarray(col_a, dtype=float)
    b = np.asarray(col_b, dtype=float)
    if a.shape != b.shape or a.ndim != 1:
        raise ShapeError("columns must be 1-D and of equal length")
    if a.size < 3:
        raise ShapeError("need at least three values")

    def pearson(u, v):
        du, dv = u - u.mean(), v - v.mean()
        su, sv = math.sqrt(du @ du), math.sqrt(dv @ dv)
        if su == 0 or sv == 0:
            raise DegenerateError("zero variance column")
        return float(np.clip((du @ dv) / (su * sv), -1.0, 1.0))

    return pearson(a, b), pearson(rankdata(a), rankdata(b))
