"""Risk measures induced by f-divergence balls, and the Betas they define."""

from .betas import (BetaKind, BetaReport, BetaRequest, cdar_beta, compute_beta, delta_sweep, erod_beta, f_beta,
                    f_beta_deviation, f_beta_drawdown, period_correlations, standard_beta)
from .divergence import DivergenceSpec, Kind, divergence_discrete, hellinger, kl, max_radius, phi, psi, psi_prime
from .errors import (DataError, DegenerateError, DomainError, FDBetaError, InfeasibleError, ParameterError,
                     ShapeError, SolverError)
from .market import MarketFrame, PriceSeries, drawdown_asset, drawdown_market, load_csv, make_frame
from .portfolio import (PortfolioProblem, PortfolioSolution, efficient_frontier, max_return, min_risk,
                        tangency_portfolio, verify_capm)
from .risk import EmpiricalLoss, RiskResult, SolverConfig, cvar, evar, rho, rho_dual, rho_primal

__version__ = "0.1.0"

__all__ = [
    "BetaKind",
    "BetaReport",
    "BetaRequest",
    "cdar_beta",
    "compute_beta",
    "delta_sweep",
    "erod_beta",
    "f_beta",
    "f_beta_deviation",
    "f_beta_drawdown",
    "period_correlations",
    "standard_beta",
    "DivergenceSpec",
    "Kind",
    "divergence_discrete",
    "hellinger",
    "kl",
    "max_radius",
    "phi",
    "psi",
    "psi_prime",
    "DataError",
    "DegenerateError",
    "DomainError",
    "FDBetaError",
    "InfeasibleError",
    "ParameterError",
    "ShapeError",
    "SolverError",
    "MarketFrame",
    "PriceSeries",
    "drawdown_asset",
    "drawdown_market",
    "load_csv",
    "make_frame",
    "PortfolioProblem",
    "PortfolioSolution",
    "efficient_frontier",
    "max_return",
    "min_risk",
    "tangency_portfolio",
    "verify_capm",
    "EmpiricalLoss",
    "RiskResult",
    "SolverConfig",
    "cvar",
    "evar",
    "rho",
    "rho_dual",
    "rho_primal",
    "__version__",
]
