"""The worst-case reweighting of market losses under several divergences and radii.

    python3 scripts/identifier_demo.py [--input prices.csv --market SPX]
"""

import numpy as np

from _common import load_frame, parser, table
from fdbeta.divergence import DivergenceSpec, Kind, divergence_discrete, hellinger, kl
from fdbeta.risk import cvar, rho

RADII = (0.0, 0.05, 0.1, 0.2, 0.35)


def main(argv=None):
    p = parser(__doc__.splitlines()[0])
    args = p.parse_args(argv)
    frame, _ = load_frame(args)
    loss = -frame.market_returns
    T = loss.size
    worst = np.argsort(loss)[::-1][:5]

    specs = {"hellinger": hellinger(), "kl": kl(), "tv": DivergenceSpec(Kind.TOTAL_VARIATION)}
    rows = []
    for name, spec in specs.items():
        for delta in RADII:
            res = rho(loss, spec, delta)
            q = res.identifier.ravel()
            rows.append([name, f"{delta:g}", res.value, divergence_discrete(spec, q, np.full(T, 1 / T)),
                         q[worst].sum() * T / worst.size, float((q > 0).mean())])
    print(table(["divergence", "delta", "rho", "D(Q||P)", "tilt on worst 5", "support"], rows))
    print(f"\nmean loss {loss.mean():.5f}, max loss {loss.max():.5f}, CVaR_0.9 {cvar(loss, 0.9).value:.5f}")


if __name__ == "__main__":
    main()
