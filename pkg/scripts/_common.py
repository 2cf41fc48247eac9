"""Shared loader: a CSV from --input, or an in-memory synthetic market."""

import argparse

import numpy as np

from fdbeta.cli import generate_demo
from fdbeta.market import PriceSeries, load_csv, make_frame


def parser(description: str) -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(description=description)
    p.add_argument("--input", help="price CSV (date column plus one column per ticker)")
    p.add_argument("--market", default="MKT", help="market column name")
    p.add_argument("--n-assets", type=int, default=10)
    p.add_argument("--n-obs", type=int, default=500)
    p.add_argument("--seed", type=int, default=0)
    return p


def load_frame(args):
    """(frame, planted betas or None)."""
    if args.input:
        return make_frame(load_csv(args.input), args.market), None
    dates, tickers, prices, planted = generate_demo(args.n_assets, args.n_obs, args.seed, args.market)
    return make_frame(PriceSeries(dates, prices, tickers), args.market), np.asarray(planted)


def table(header, rows) -> str:
    cells = [[str(h) for h in header]] + [[c if isinstance(c, str) else f"{c:.4f}" for c in r] for r in rows]
    widths = [max(len(r[j]) for r in cells) for j in range(len(header))]
    return "\n".join("  ".join(c.rjust(w) for c, w in zip(r, widths)) for r in cells)
