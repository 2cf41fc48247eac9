"""Hellinger-risk efficient frontier over a few assets, with the CAPM-type check at the tangency portfolio.

    python3 scripts/frontier_demo.py [--input prices.csv --market SPX] [--assets 4]
"""

import numpy as np

from _common import load_frame, parser, table
from fdbeta.divergence import hellinger
from fdbeta.portfolio import PortfolioProblem, efficient_frontier, tangency_portfolio, verify_capm


def main(argv=None):
    p = parser(__doc__.splitlines()[0])
    p.add_argument("--assets", type=int, default=4, help="use the first k assets")
    p.add_argument("--points", type=int, default=6)
    p.add_argument("--delta", type=float, default=0.1)
    args = p.parse_args(argv)
    frame, _ = load_frame(args)
    k = min(args.assets, len(frame.tickers))
    prob = PortfolioProblem(frame.returns[:, :k], hellinger(), args.delta, tickers=frame.tickers[:k])

    m = prob.mean_returns
    targets = np.linspace(m.min(), m.max(), args.points)
    rows = []
    for pt in efficient_frontier(prob, targets):
        w = pt.weights if pt.weights is not None else np.full(k, np.nan)
        rows.append([pt.target, pt.risk if pt.error is None else float("nan"), *w])
    print(table(["target", "risk", *(f"w[{t}]" for t in prob.tickers)], rows))

    try:
        sol = tangency_portfolio(prob)
    except Exception as exc:  # the sample may have no positive-mean, positive-risk portfolio
        print("\nno tangency portfolio:", exc)
        return
    chk = verify_capm(sol, prob)
    if abs(sol.nu_star) > 1e-6:
        print("\nnote: a no-short constraint binds at the tangency point, so residuals vanish only on held assets")
    print(f"\ntangency: mean {sol.mean_return:.6f}, risk {sol.risk:.6f}, nu {sol.nu_star:.2e}")
    print(table(["ticker", "weight", "beta", "residual"],
                [[t, w, b, r] for t, w, b, r in zip(prob.tickers, sol.weights, chk.betas, chk.residuals)]))


if __name__ == "__main__":
    main()
