"""How each asset's Hellinger Beta moves as the divergence radius grows.

    python3 scripts/delta_sweeps.py [--input prices.csv --market SPX] [--kind fdeviation]
"""

import numpy as np

from _common import load_frame, parser, table
from fdbeta.betas import BetaRequest, delta_sweep
from fdbeta.divergence import hellinger

DELTAS = (0.05, 0.1, 0.15, 0.2, 0.25, 0.3, 0.35)


def main(argv=None):
    p = parser(__doc__.splitlines()[0])
    p.add_argument("--kind", default="fdeviation", choices=("freturn", "fdeviation", "fdrawdown"))
    args = p.parse_args(argv)
    frame, _ = load_frame(args)

    sw = delta_sweep(BetaRequest(args.kind, hellinger()), frame, DELTAS)
    rows = [[t, *b, d] for t, b, d in zip(sw.tickers, sw.betas, sw.drift)]
    print(table(["ticker", *sw.columns(), "drift"], rows))
    counts = {k: sw.drift.count(k) for k in sorted(set(sw.drift))}
    print("\ndrift counts:", counts)
    spread = np.nanmax(sw.betas, axis=0) - np.nanmin(sw.betas, axis=0)
    print("cross-sectional spread per delta:", np.round(spread, 4).tolist())
    for w in sw.warnings:
        print("warning:", w)


if __name__ == "__main__":
    main()
