"""Divergence generators, their convex conjugates and discrete f-divergences.

Every generator ``phi`` lives on ``[0, inf)`` with ``phi(1) = 0``.  A
:class:`DivergenceSpec` carries a positive ``scale`` ``a`` and an optional
affine ``shift`` ``C``; the effective generator is

    phi_spec(u) = a * phi(u) + C * (u - 1)

whose conjugate is ``psi_spec(t) = a * psi((t - C) / a) + C``.  The shift
leaves every divergence between probability vectors unchanged.

Conjugates are the true Legendre transforms of the generators restricted to
``u >= 0``.  For Pearson chi^2, total variation and alpha > 1 this flattens the
textbook formula on the far left of the real line (where the maximizing ``u``
hits zero), which keeps ``psi'`` >= 0.

Extended-real values are plain floats; ``math.inf`` marks +infinity.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np
from scipy.special import xlogy

from .errors import DomainError, ParameterError, ShapeError

PROB_TOL = 1e-12


class Kind(str, Enum):
    TOTAL_VARIATION = "tv"
    KL = "kl"
    REVERSE_KL = "reverse_kl"
    PEARSON_CHI2 = "pearson"
    NEYMAN_CHI2 = "neyman"
    SQUARED_HELLINGER = "hellinger"
    JENSEN_SHANNON = "js"
    ALPHA = "alpha"

    @classmethod
    def parse(cls, name: str) -> "Kind":
        key = name.strip().lower().replace("-", "_")
        aliases = {
            "total_variation": "tv",
            "kullback_leibler": "kl",
            "rkl": "reverse_kl",
            "pearson_chi2": "pearson",
            "chi2": "pearson",
            "neyman_chi2": "neyman",
            "squared_hellinger": "hellinger",
            "h2": "hellinger",
            "jensen_shannon": "js",
        }
        key = aliases.get(key, key)
        try:
            return cls(key)
        except ValueError:
            raise ParameterError(f"unknown divergence kind {name!r}") from None


@dataclass(frozen=True)
class DivergenceSpec:
    """Which generator to use and how it is scaled.

    ``scale`` defaults to 1/2 for the squared Hellinger distance so that the
    divergence equals ``(1/2) sum (sqrt(q) - sqrt(p))^2`` (bounded by 1) and
    to 1 for every other kind.
    """

    kind: Kind
    alpha: float | None = None
    scale: float | None = None
    shift: float = 0.0

    def __post_init__(self):
        kind = Kind.parse(self.kind) if isinstance(self.kind, str) else self.kind
        object.__setattr__(self, "kind", kind)
        if kind is Kind.ALPHA:
            if self.alpha is None or not math.isfinite(self.alpha) or self.alpha in (0.0, 1.0):
                raise ParameterError("alpha-divergence needs alpha not in {0, 1}")
        elif self.alpha is not None:
            raise ParameterError(f"alpha parameter given for kind {kind.value}")
        if self.scale is None:
            object.__setattr__(self, "scale", 0.5 if kind is Kind.SQUARED_HELLINGER else 1.0)
        if not (self.scale > 0 and math.isfinite(self.scale)):
            raise ParameterError(f"scale must be positive, got {self.scale}")
        if not math.isfinite(self.shift):
            raise ParameterError("shift must be finite")

    @property
    def strictly_convex(self) -> bool:
        return self.kind is not Kind.TOTAL_VARIATION

    @property
    def phi_zero(self) -> float:
        """phi(0) as the limit u -> 0+."""
        return float(phi(self, 0.0))

    @property
    def dom_sup(self) -> float:
        """Supremum of dom(psi)."""
        return self.shift + self.scale * _dom_sup_unit(self)

    @property
    def dom_closed(self) -> bool:
        """Whether dom(psi) contains its supremum."""
        return self.kind is Kind.TOTAL_VARIATION

    def label(self) -> str:
        if self.kind is Kind.ALPHA:
            return f"alpha({self.alpha:g})"
        return self.kind.value


def hellinger(scale: float = 0.5) -> DivergenceSpec:
    return DivergenceSpec(Kind.SQUARED_HELLINGER, scale=scale)


def kl() -> DivergenceSpec:
    return DivergenceSpec(Kind.KL)


# ---------------------------------------------------------------------------
# unit-scale building blocks (vectorized, no argument checking)


def _dom_sup_unit(spec: DivergenceSpec) -> float:
    k = spec.kind
    if k is Kind.TOTAL_VARIATION:
        return 0.5
    if k in (Kind.KL, Kind.PEARSON_CHI2):
        return math.inf
    if k is Kind.REVERSE_KL:
        return 0.0
    if k in (Kind.NEYMAN_CHI2, Kind.SQUARED_HELLINGER):
        return 1.0
    if k is Kind.JENSEN_SHANNON:
        return math.log(2.0)
    a = spec.alpha
    return 1.0 / (1.0 - a) if a < 1 else math.inf


def _phi_unit(spec: DivergenceSpec, u: np.ndarray) -> np.ndarray:
    k = spec.kind
    with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
        if k is Kind.TOTAL_VARIATION:
            return 0.5 * np.abs(u - 1.0)
        if k is Kind.KL:
            return xlogy(u, u)
        if k is Kind.REVERSE_KL:
            return np.where(u > 0, -np.log(np.where(u > 0, u, 1.0)), np.inf)
        if k is Kind.PEARSON_CHI2:
            return (u - 1.0) ** 2
        if k is Kind.NEYMAN_CHI2:
            return np.where(u > 0, (u - 1.0) ** 2 / np.where(u > 0, u, 1.0), np.inf)
        if k is Kind.SQUARED_HELLINGER:
            return (np.sqrt(u) - 1.0) ** 2
        if k is Kind.JENSEN_SHANNON:
            return xlogy(u, u) - (u + 1.0) * np.log((1.0 + u) / 2.0)
        a = spec.alpha
        if a < 0:
            pw = np.where(u > 0, np.where(u > 0, u, 1.0) ** a, np.inf)
        else:
            pw = u**a
        return (pw - 1.0 - a * (u - 1.0)) / (a * (a - 1.0))


def _dphi_unit(spec: DivergenceSpec, u: np.ndarray) -> np.ndarray:
    """Derivative of the generator for u > 0 (right derivative at kinks)."""
    k = spec.kind
    with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
        if k is Kind.TOTAL_VARIATION:
            return np.where(u >= 1.0, 0.5, -0.5)
        if k is Kind.KL:
            return np.log(u) + 1.0
        if k is Kind.REVERSE_KL:
            return -1.0 / u
        if k is Kind.PEARSON_CHI2:
            return 2.0 * (u - 1.0)
        if k is Kind.NEYMAN_CHI2:
            return 1.0 - 1.0 / u**2
        if k is Kind.SQUARED_HELLINGER:
            return 1.0 - 1.0 / np.sqrt(u)
        if k is Kind.JENSEN_SHANNON:
            return np.log(2.0 * u / (1.0 + u))
        a = spec.alpha
        return (u ** (a - 1.0) - 1.0) / (a - 1.0)


def _psi_unit(spec: DivergenceSpec, t: np.ndarray) -> np.ndarray:
    k = spec.kind
    sup = _dom_sup_unit(spec)
    with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
        if k is Kind.TOTAL_VARIATION:
            return np.where(t <= sup, np.maximum(t, -0.5), np.inf)
        if k is Kind.KL:
            return np.exp(t - 1.0)
        if k is Kind.PEARSON_CHI2:
            return np.where(t >= -2.0, 0.25 * t * t + t, -1.0)
        inside = t < sup
        ts = np.where(inside, t, 0.0)
        if k is Kind.REVERSE_KL:
            ts = np.where(inside, t, -1.0)
            val = -1.0 - np.log(-ts)
        elif k is Kind.NEYMAN_CHI2:
            val = 2.0 - 2.0 * np.sqrt(1.0 - ts)
        elif k is Kind.SQUARED_HELLINGER:
            val = ts / (1.0 - ts)
        elif k is Kind.JENSEN_SHANNON:
            val = -np.log(2.0 - np.exp(ts))
        else:
            a = spec.alpha
            base = ts * (a - 1.0) + 1.0
            if a > 1:
                val = np.where(base > 0, (np.maximum(base, 0.0) ** (a / (a - 1.0)) - 1.0) / a, -1.0 / a)
            else:
                val = (base ** (a / (a - 1.0)) - 1.0) / a
        return np.where(inside, val, np.inf)


def _dpsi_unit(spec: DivergenceSpec, t: np.ndarray) -> np.ndarray:
    """psi' with +inf outside dom(psi); left derivative at TV kinks."""
    k = spec.kind
    sup = _dom_sup_unit(spec)
    with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
        if k is Kind.TOTAL_VARIATION:
            return np.where(t > sup, np.inf, np.where(t > -0.5, 1.0, 0.0))
        if k is Kind.KL:
            return np.exp(t - 1.0)
        if k is Kind.PEARSON_CHI2:
            return np.maximum(0.0, 1.0 + 0.5 * t)
        inside = t < sup
        ts = np.where(inside, t, 0.0)
        if k is Kind.REVERSE_KL:
            ts = np.where(inside, t, -1.0)
            val = -1.0 / ts
        elif k is Kind.NEYMAN_CHI2:
            val = 1.0 / np.sqrt(1.0 - ts)
        elif k is Kind.SQUARED_HELLINGER:
            val = 1.0 / (1.0 - ts) ** 2
        elif k is Kind.JENSEN_SHANNON:
            e = np.exp(ts)
            val = e / (2.0 - e)
        else:
            a = spec.alpha
            base = ts * (a - 1.0) + 1.0
            if a > 1:
                val = np.maximum(base, 0.0) ** (1.0 / (a - 1.0))
            else:
                val = base ** (1.0 / (a - 1.0))
        return np.where(inside, val, np.inf)


def _scalar_or_array(arr: np.ndarray, out: np.ndarray):
    return float(out) if np.ndim(arr) == 0 else out


# ---------------------------------------------------------------------------
# vectorized spec-level evaluators used by the solvers (no domain checks)


def phi_values(spec: DivergenceSpec, u: np.ndarray) -> np.ndarray:
    return spec.scale * _phi_unit(spec, u) + spec.shift * (u - 1.0)


def dphi_values(spec: DivergenceSpec, u: np.ndarray) -> np.ndarray:
    return spec.scale * _dphi_unit(spec, u) + spec.shift


def psi_values(spec: DivergenceSpec, t: np.ndarray) -> np.ndarray:
    return spec.scale * _psi_unit(spec, (t - spec.shift) / spec.scale) + spec.shift


def dpsi_values(spec: DivergenceSpec, t: np.ndarray) -> np.ndarray:
    return _dpsi_unit(spec, (t - spec.shift) / spec.scale)


# ---------------------------------------------------------------------------
# public operations


def phi(spec: DivergenceSpec, u):
    """Generator value; +inf where it is undefined (e.g. reverse KL at 0)."""
    arr = np.asarray(u, dtype=float)
    if np.any(arr < 0) or np.any(np.isnan(arr)):
        raise DomainError("phi is defined for u >= 0 only")
    out = phi_values(spec, arr)
    out = np.where(arr == 1.0, 0.0, out)
    return _scalar_or_array(arr, out)


def psi(spec: DivergenceSpec, t):
    """Convex conjugate; +inf outside dom(psi)."""
    arr = np.asarray(t, dtype=float)
    return _scalar_or_array(arr, psi_values(spec, arr))


def psi_prime(spec: DivergenceSpec, t):
    """Derivative of the conjugate.

    At the total-variation kinks the left derivative is returned.
    """
    arr = np.asarray(t, dtype=float)
    sup = spec.dom_sup
    bad = arr > sup if spec.dom_closed else arr >= sup
    if np.any(bad) or np.any(np.isnan(arr)):
        raise DomainError(f"psi' evaluated outside dom(psi) = (-inf, {sup:g}{']' if spec.dom_closed else ')'}")
    return _scalar_or_array(arr, dpsi_values(spec, arr))


def phi_prime(spec: DivergenceSpec, u):
    """Derivative of the generator for u > 0; inverse of psi' on its range."""
    arr = np.asarray(u, dtype=float)
    if np.any(arr <= 0) or np.any(np.isnan(arr)):
        raise DomainError("phi' is evaluated for u > 0 only")
    return _scalar_or_array(arr, dphi_values(spec, arr))


def prob_vector(weights, tol: float = PROB_TOL) -> np.ndarray:
    """Validate and return a probability vector."""
    w = np.asarray(weights, dtype=float)
    if w.ndim != 1 or w.size == 0:
        raise ShapeError("probability vector must be a non-empty 1-D array")
    if np.any(~np.isfinite(w)) or np.any(w < 0):
        raise DomainError("probability weights must be finite and nonnegative")
    if abs(w.sum() - 1.0) > tol:
        raise DomainError(f"probability weights sum to {w.sum():.17g}, not 1")
    return w


def uniform(T: int) -> np.ndarray:
    if T < 1:
        raise ParameterError("T must be >= 1")
    return np.full(T, 1.0 / T)


def divergence_discrete(spec: DivergenceSpec, q, p) -> float:
    """D_phi(q || p) = sum_t p_t phi(q_t / p_t) for probability vectors."""
    q = np.asarray(q, dtype=float)
    p = np.asarray(p, dtype=float)
    if q.shape != p.shape or q.ndim != 1:
        raise ShapeError(f"length mismatch: {q.shape} vs {p.shape}")
    if np.any(q < 0) or np.any(p < 0):
        raise DomainError("probability weights must be nonnegative")
    support = p > 0
    if np.any(q[~support] > 0):
        return math.inf
    ps = p[support]
    total = float(np.sum(ps * phi_values(spec, q[support] / ps)))
    return total if math.isfinite(total) else math.inf


def point_mass_divergence(spec: DivergenceSpec, mass: float) -> float:
    """Divergence of the measure that spreads all probability uniformly over
    a set of base mass ``mass``: mass*phi(1/mass) + (1 - mass)*phi(0).

    This is the saturation radius of a loss whose maximum carries base
    probability ``mass``; with ``mass = 1 - alpha`` it is the CVaR condition
    value.
    """
    if not 0 < mass <= 1:
        raise ParameterError("mass must lie in (0, 1]")
    if mass == 1.0:
        return 0.0
    inner = phi(spec, 1.0 / mass)
    rest = spec.phi_zero
    if math.isinf(rest):
        return math.inf
    return mass * inner + (1.0 - mass) * rest


def max_radius(spec: DivergenceSpec, T: int) -> float:
    """Largest divergence from the uniform vector over the T-simplex.

    The divergence is convex in q, so the supremum sits at a vertex.
    """
    if T < 1:
        raise ParameterError("T must be >= 1")
    return point_mass_divergence(spec, 1.0 / T)
