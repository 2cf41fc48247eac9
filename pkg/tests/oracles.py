"""Brute-force reference solvers used to freeze expected values.

They share no code with the package solvers: divergences are evaluated from
their closed forms and maxima are found by enumeration.
"""

import numpy as np
from scipy.special import xlogy


def hellinger_half(q, p):
    return 1.0 - np.sqrt(q * p).sum(axis=-1)


def kl_div(q, p):
    return (xlogy(q, q) - xlogy(q, p)).sum(axis=-1)


DIVERGENCES = {"hellinger": hellinger_half, "kl": kl_div}


def simplex_grid(dim, n):
    """All points of the simplex in R^dim with coordinates in {0, 1/n, ..., 1}."""
    axes = np.meshgrid(*([np.arange(n + 1)] * (dim - 1)), indexing="ij")
    free = np.stack([a.ravel() for a in axes], axis=1)
    free = free[free.sum(axis=1) <= n]
    last = n - free.sum(axis=1, keepdims=True)
    return np.hstack((free, last)) / n


def _local_grid(center, h, k=10):
    dim = center.size
    offs = np.meshgrid(*([np.arange(-k, k + 1) * h] * (dim - 1)), indexing="ij")
    d = np.stack([o.ravel() for o in offs], axis=1)
    pts = np.empty((d.shape[0], dim))
    pts[:, :-1] = center[:-1] + d
    pts[:, -1] = 1.0 - pts[:, :-1].sum(axis=1)
    return pts[np.all(pts >= 0, axis=1)]


def grid_rho(x, div, delta, step=1e-3, rounds=3):
    """max q.x over the uniform-based divergence ball by enumeration, then
    zooming around the best feasible grid point."""
    x = np.asarray(x, dtype=float)
    T = x.size
    p = np.full(T, 1.0 / T)
    f = DIVERGENCES[div]
    pts = simplex_grid(T, int(round(1 / step)))
    ok = f(pts, p) <= delta
    vals = np.where(ok, pts @ x, -np.inf)
    best = pts[np.argmax(vals)]
    h = step
    for _ in range(rounds):
        h /= 10
        for _ in range(200):  # recentre until the local box holds no better point
            loc = _local_grid(best, h)
            ok = f(loc, p) <= delta
            v = np.where(ok, loc @ x, -np.inf)
            if not ok.any() or v.max() <= best @ x:
                break
            best = loc[np.argmax(v)]
    best = _pattern_search(best, lambda pts: np.where(f(pts, p) <= delta, pts @ x, -np.inf), step)
    return float(best @ x), best


def _pattern_search(best, score, h, h_min=1e-10, n_dir=400, seed=0):
    """Maximize ``score`` over the simplex by random sum-zero moves of length
    h, halving h after a failed round.  Lattice-free, so it follows curved
    constraint boundaries that stall a grid zoom."""
    rng = np.random.default_rng(seed)
    fbest = score(best[None])[0]
    while h > h_min:
        d = rng.normal(size=(n_dir, best.size))
        d -= d.mean(axis=1, keepdims=True)
        d /= np.linalg.norm(d, axis=1, keepdims=True)
        pts = best + h * d
        pts = pts[np.all(pts >= 0, axis=1)]
        vals = score(pts) if pts.size else np.array([-np.inf])
        if vals.max() > fbest:
            i = int(np.argmax(vals))
            best, fbest = pts[i], vals[i]
        else:
            h /= 2
    return best


def grid_portfolio(R, risk_many, target, step=0.01, rounds=3):
    """min risk over the simplex with mean return >= target, by enumeration.

    ``risk_many`` maps a B x T loss matrix to B risk values.
    """
    m = R.mean(axis=0)

    def scan(W):
        W = W[W @ m >= target - 1e-15]
        if W.shape[0] == 0:
            return None, np.inf
        vals = risk_many(-(W @ R.T))
        i = int(np.argmin(vals))
        return W[i], vals[i]

    best, fbest = scan(simplex_grid(R.shape[1], int(round(1 / step))))
    h = step
    for _ in range(rounds):
        h /= 10
        for _ in range(200):
            w, f = scan(_local_grid(best, h))
            if not f < fbest:
                break
            best, fbest = w, f
    return fbest, best


def polished_rho(x, div, delta, step=1e-3):
    """Grid optimum refined by SLSQP on the same closed-form constraint; use
    when the maximising measure itself is compared, not only the value."""
    from scipy.optimize import minimize

    x = np.asarray(x, dtype=float)
    p = np.full(x.size, 1.0 / x.size)
    f = DIVERGENCES[div]
    _, q0 = grid_rho(x, div, delta, step=step)
    scale = max(np.abs(x).max(), 1e-300)
    res = minimize(lambda q: -(q @ x) / scale, q0, jac=lambda q: -x / scale, method="SLSQP",
                   bounds=[(0.0, 1.0)] * x.size,
                   constraints=[{"type": "eq", "fun": lambda q: q.sum() - 1.0},
                                {"type": "ineq", "fun": lambda q: delta - f(np.clip(q, 0, 1), p)}],
                   options={"ftol": 1e-15, "maxiter": 500})
    q = np.clip(res.x, 0, None)
    q /= q.sum()
    return float(q @ x), q
