"""Hellinger Betas next to their classical comparators, and how they correlate across two periods.

    python3 scripts/beta_tables.py [--input prices.csv --market SPX] [--delta 0.1]
"""

import numpy as np

from _common import load_frame, parser, table
from fdbeta.betas import BetaRequest, compute_beta, period_correlations
from fdbeta.divergence import hellinger


def beta_columns(frame, delta):
    H = hellinger()
    reqs = [BetaRequest("freturn", H, delta), BetaRequest("fdeviation", H, delta), BetaRequest("standard"),
            BetaRequest("fdrawdown", H, delta), BetaRequest("cdar", alpha=0.5), BetaRequest("erod")]
    return [r.label() for r in reqs], np.column_stack([compute_beta(r, frame).betas for r in reqs])


def main(argv=None):
    p = parser(__doc__.splitlines()[0])
    p.add_argument("--delta", type=float, default=0.1)
    args = p.parse_args(argv)
    frame, planted = load_frame(args)

    labels, B = beta_columns(frame, args.delta)
    header = ["ticker", *labels] + (["planted"] if planted is not None else [])
    rows = [[t, *b] + ([planted[i]] if planted is not None else []) for i, (t, b) in enumerate(zip(frame.tickers, B))]
    print(table(header, rows))

    # period correlations: Hellinger deviation Beta vs standard Beta in each half
    d = frame.dates
    mid = d[len(d) // 2]
    print()
    corr_rows = []
    for name, part in (("first half", frame.between(d[0], mid)), ("second half", frame.between(mid, d[-1]))):
        _, P = beta_columns(part, args.delta)
        pearson, spearman = period_correlations(P[:, 1], P[:, 2])
        corr_rows.append([name, pearson, spearman])
    print(table(["period", "pearson(dev, std)", "spearman(dev, std)"], corr_rows))


if __name__ == "__main__":
    main()
