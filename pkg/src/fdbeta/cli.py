"""Command-line front end.

Every command writes ``<out>.csv`` (6 significant digits) and ``<out>.json``
(full precision) unless ``--format`` restricts it.  Relative output paths are
resolved against ``$FDBETA_OUTPUT_DIR`` (default: the working directory).

Exit codes: 0 ok, 1 configuration error, 2 data error, 3 solver error; the
reason is printed as one line ``fdbeta: <kind> error: <message>`` on stderr.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import sys
from dataclasses import asdict, dataclass
from pathlib import Path

import numpy as np

from . import betas as B
from .divergence import DivergenceSpec, Kind
from .errors import (DataError, DegenerateError, DomainError, FDBetaError, InfeasibleError, ParameterError,
                     ShapeError, SolverError)
from .market import align, load_csv, make_frame
from .portfolio import PortfolioProblem, efficient_frontier
from .risk import EmpiricalLoss, rho

COMMANDS = ("risk", "beta", "dd-beta", "sweep", "frontier", "corr", "gen-demo")
OUTPUT_ENV = "FDBETA_OUTPUT_DIR"
EXIT_OK, EXIT_CONFIG, EXIT_DATA, EXIT_SOLVER = 0, 1, 2, 3


class ConfigError(Exception):
    pass


@dataclass(frozen=True)
class RunConfig:
    command: str
    inputs: tuple[str, ...] = ()
    market: str | None = None
    assets: tuple[str, ...] | None = None
    start: str | None = None
    end: str | None = None
    divergence: str = "hellinger"
    scale: float | None = None
    div_alpha: float | None = None
    deltas: tuple[float, ...] = (0.1,)
    kind: str = "return"
    comparators: tuple[str, ...] = ()
    returns_input: bool = False
    out: str | None = None
    fmt: str = "both"
    seed: int = 0
    n_assets: int = 10
    n_obs: int = 2000
    targets: tuple[float, ...] = ()
    n_points: int = 5
    path_probs: str | None = None
    col_a: str | None = None
    col_b: str | None = None

    def __post_init__(self):
        if self.command not in COMMANDS:
            raise ConfigError(f"unknown command {self.command!r}")
        if self.fmt not in ("csv", "json", "both"):
            raise ConfigError("format must be csv, json or both")
        if not self.deltas:
            raise ConfigError("delta list is empty")
        if any(not (d >= 0 and math.isfinite(d)) for d in self.deltas):
            raise ConfigError("deltas must be finite and nonnegative")
        if self.command != "gen-demo" and not self.inputs:
            raise ConfigError(f"{self.command} needs --input")
        if self.command in ("risk", "beta", "dd-beta", "sweep") and not self.market:
            raise ConfigError(f"{self.command} needs --market")

    def spec(self) -> DivergenceSpec:
        try:
            kind = Kind.parse(self.divergence)
            return DivergenceSpec(kind, alpha=self.div_alpha if kind is Kind.ALPHA else None, scale=self.scale)
        except ParameterError as exc:
            raise ConfigError(str(exc)) from None


# ---------------------------------------------------------------------------
# output helpers


def fmt6(x) -> str:
    if x is None or (isinstance(x, float) and math.isnan(x)):
        return "nan"
    if isinstance(x, str):
        return x
    return f"{float(x):.6g}"


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _jsonable(obj.tolist())
    if isinstance(obj, (np.floating, float)):
        v = float(obj)
        return v if math.isfinite(v) else str(v)
    if isinstance(obj, np.integer):
        return int(obj)
    return obj


def output_stem(cfg: RunConfig) -> Path:
    stem = Path(cfg.out or cfg.command)
    if not stem.is_absolute():
        stem = Path(os.environ.get(OUTPUT_ENV, ".")) / stem
    if stem.suffix in (".csv", ".json"):
        stem = stem.with_suffix("")
    return stem


def write_outputs(cfg: RunConfig, header, rows, payload) -> list[Path]:
    stem = output_stem(cfg)
    stem.parent.mkdir(parents=True, exist_ok=True)
    written = []
    if cfg.fmt in ("csv", "both"):
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(header)
        for row in rows:
            w.writerow([fmt6(c) for c in row])
        p = stem.with_suffix(".csv")
        p.write_text(buf.getvalue(), encoding="utf-8")
        written.append(p)
    if cfg.fmt in ("json", "both"):
        p = stem.with_suffix(".json")
        p.write_text(json.dumps(_jsonable(payload), indent=2, sort_keys=True) + "\n", encoding="utf-8")
        written.append(p)
    return written


# ---------------------------------------------------------------------------
# commands


def _frame(cfg: RunConfig):
    series = align(*(load_csv(p, returns_input=cfg.returns_input) for p in cfg.inputs))
    if cfg.start or cfg.end:
        series = series.between(cfg.start, cfg.end)
    frame = make_frame(series, cfg.market, list(cfg.assets) if cfg.assets else None)
    return frame


def _echo(cfg: RunConfig) -> dict:
    d = asdict(cfg)
    d.pop("out")
    d["inputs"] = [Path(p).name for p in cfg.inputs]
    return d


def cmd_risk(cfg: RunConfig):
    frame = _frame(cfg)
    spec, delta = cfg.spec(), cfg.deltas[0]
    res = rho(EmpiricalLoss(frame.market_losses), spec, delta)
    q = res.identifier[0]
    dates = [str(d) for d in frame.dates]
    rows = [(d, r, -r, qq) for d, r, qq in zip(dates, frame.market_returns, q)]
    payload = {
        "config": _echo(cfg),
        "risk": res.value,
        "t_star": res.t_star,
        "mu_star": res.mu_star,
        "attained": res.attained,
        "saturated": res.saturated,
        "method": res.method,
        "dates": dates,
        "identifier": q,
    }
    return ["date", "return", "loss", "q"], rows, payload, f"risk={res.value:.10g}"


def _comparator(token: str) -> B.BetaRequest:
    name, _, arg = token.partition(":")
    name = name.strip().lower()
    try:
        if name == "standard":
            return B.BetaRequest(B.BetaKind.STANDARD)
        if name == "cdar":
            return B.BetaRequest(B.BetaKind.CDAR, alpha=float(arg or 0.5))
        if name == "erod":
            return B.BetaRequest(B.BetaKind.EROD, epsilon=float(arg or 0.0))
    except (ValueError, ParameterError) as exc:
        raise ConfigError(f"bad comparator {token!r}: {exc}") from None
    raise ConfigError(f"unknown comparator {token!r} (use standard, cdar:ALPHA, erod:EPS)")


_KINDS = {"return": B.BetaKind.FRETURN, "deviation": B.BetaKind.FDEVIATION, "drawdown": B.BetaKind.FDRAWDOWN}


def _f_request(cfg: RunConfig, kind: str, delta: float) -> B.BetaRequest:
    if kind not in _KINDS:
        raise ConfigError(f"unknown Beta kind {kind!r}; choose from {', '.join(_KINDS)}")
    return B.BetaRequest(_KINDS[kind], cfg.spec(), delta)


def cmd_beta(cfg: RunConfig, kind: str | None = None, default_comparators=()):
    frame = _frame(cfg)
    kind = kind or cfg.kind
    requests = [_f_request(cfg, kind, d) for d in cfg.deltas]
    requests += [_comparator(c) for c in (cfg.comparators or default_comparators)]
    reports = [B.compute_beta(r, frame) for r in requests]
    header = ["ticker"] + [r.label() for r in requests]
    rows = [[t] + [rep.betas[i] for rep in reports] for i, t in enumerate(frame.tickers)]
    payload = {
        "config": _echo(cfg),
        "tickers": frame.tickers,
        "columns": header[1:],
        "betas": {r.label(): rep.betas for r, rep in zip(requests, reports)},
        "denominators": {r.label(): rep.denominator for r, rep in zip(requests, reports)},
        "warnings": [w for rep in reports for w in rep.warnings],
        "dropped_rows": frame.meta.get("dropped", 0),
    }
    return header, rows, payload, f"{len(frame.tickers)} assets x {len(requests)} columns"


def cmd_sweep(cfg: RunConfig):
    frame = _frame(cfg)
    sweep = B.delta_sweep(_f_request(cfg, cfg.kind, cfg.deltas[0]), frame, cfg.deltas)
    header = ["ticker"] + sweep.columns()
    rows = [[t] + list(sweep.betas[i]) for i, t in enumerate(sweep.tickers)]
    payload = {
        "config": _echo(cfg),
        "tickers": sweep.tickers,
        "deltas": sweep.deltas,
        "columns": header[1:],
        "betas": sweep.betas,
        "drift": dict(zip(sweep.tickers, sweep.drift)),
        "warnings": sweep.warnings,
    }
    return header, rows, payload, f"{len(sweep.tickers)} assets x {len(sweep.deltas)} deltas"


def _read_probs(path: str, n: int) -> np.ndarray:
    try:
        vals = [float(x) for x in Path(path).read_text(encoding="utf-8").split()]
    except ValueError as exc:
        raise DataError(f"{path}: {exc}") from None
    if len(vals) != n:
        raise DataError(f"{path}: {len(vals)} path probabilities for {n} paths")
    return np.array(vals)


def cmd_frontier(cfg: RunConfig):
    panels, tickers = [], None
    for p in cfg.inputs:
        s = load_csv(p, returns_input=cfg.returns_input)
        if cfg.start or cfg.end:
            s = s.between(cfg.start, cfg.end)
        names = list(cfg.assets) if cfg.assets else [t for t in s.tickers if t != cfg.market]
        cols = [s.column(t) for t in names]
        vals = np.column_stack(cols)
        panels.append(vals if s.is_returns else vals[1:] / vals[:-1] - 1.0)
        if tickers is not None and tickers != names:
            raise DataError(f"{p}: tickers differ from the first path")
        tickers = names
    if len({x.shape for x in panels}) > 1:
        raise DataError("paths have different lengths")
    R = np.stack(panels)
    probs = _read_probs(cfg.path_probs, R.shape[0]) if cfg.path_probs else None
    try:
        problem = PortfolioProblem(R, cfg.spec(), cfg.deltas[0], path_probs=probs, tickers=tuple(tickers))
    except ParameterError as exc:
        raise ConfigError(str(exc)) from None
    m = problem.mean_returns
    targets = cfg.targets or tuple(np.linspace(m.min(), m.max(), cfg.n_points))
    points = efficient_frontier(problem, sorted(targets))
    header = ["target", "risk", "mean_return"] + [f"w[{t}]" for t in tickers]
    rows = []
    for pt in points:
        w = pt.weights if pt.weights is not None else np.full(len(tickers), math.nan)
        rows.append([pt.target, pt.risk, pt.mean_return] + list(w))
    payload = {
        "config": _echo(cfg),
        "tickers": tickers,
        "mean_returns": m,
        "points": [{"target": p.target, "risk": p.risk, "mean_return": p.mean_return,
                    "weights": p.weights, "error": p.error} for p in points],
    }
    return header, rows, payload, f"{sum(p.error is None for p in points)}/{len(points)} feasible points"


def cmd_corr(cfg: RunConfig):
    path = Path(cfg.inputs[0])
    try:
        with path.open(newline="", encoding="utf-8") as fh:
            table = list(csv.DictReader(fh))
    except OSError as exc:
        raise DataError(f"{path}: {exc.strerror}") from None
    if not table:
        raise DataError(f"{path}: no rows")
    cols = list(table[0].keys())
    a, b = cfg.col_a or (cols[1] if len(cols) > 1 else None), cfg.col_b or (cols[2] if len(cols) > 2 else None)
    for c in (a, b):
        if c not in cols:
            raise ConfigError(f"column {c!r} not in {path.name}; have {', '.join(cols)}")
    try:
        va = [float(r[a]) for r in table]
        vb = [float(r[b]) for r in table]
    except ValueError as exc:
        raise DataError(f"{path}: {exc}") from None
    pearson, spearman = B.period_correlations(va, vb)
    payload = {"config": _echo(cfg), "col_a": a, "col_b": b, "n": len(va), "pearson": pearson, "spearman": spearman}
    return ["col_a", "col_b", "n", "pearson", "spearman"], [[a, b, len(va), pearson, spearman]], payload, \
        f"pearson={pearson:.4f} spearman={spearman:.4f}"


def generate_demo(n_assets: int, n_obs: int, seed: int, market: str = "MKT"):
    """Synthetic prices with r^i = beta_i r^M + eps_i, eps_i ~ N(0, (sigma_M / 2)^2).

    Returns (dates, tickers, prices (n_obs + 1) x (n_assets + 1), planted betas).
    """
    if n_assets < 1 or n_obs < 2:
        raise ConfigError("gen-demo needs at least one asset and two observations")
    rng = np.random.default_rng(seed)
    sigma_m = 0.01
    rm = rng.normal(0.0004, sigma_m, n_obs)
    planted = rng.uniform(0.5, 2.0, n_assets)
    eps = rng.normal(0.0, 0.5 * sigma_m, (n_obs, n_assets))
    r = np.column_stack((rm, planted * rm[:, None] + eps))
    prices = 100.0 * np.vstack((np.ones(n_assets + 1), np.cumprod(1.0 + r, axis=0)))
    dates = np.busday_offset(np.datetime64("2015-01-02"), np.arange(n_obs + 1), roll="forward")
    tickers = (market,) + tuple(f"A{i + 1:02d}" for i in range(n_assets))
    return dates, tickers, prices, planted


def cmd_gen_demo(cfg: RunConfig):
    market = cfg.market or "MKT"
    dates, tickers, prices, planted = generate_demo(cfg.n_assets, cfg.n_obs, cfg.seed, market)
    rows = [[str(d)] + [repr(float(v)) for v in row] for d, row in zip(dates, prices)]
    payload = {
        "config": _echo(cfg),
        "market": market,
        "planted_betas": dict(zip(tickers[1:], planted)),
        "noise_scale": 0.5,
        "market_sigma": 0.01,
    }
    return ["date", *tickers], rows, payload, f"{cfg.n_assets} assets, {cfg.n_obs} returns"


def run(cfg: RunConfig) -> list[Path]:
    """Execute a configured command and write its reports."""
    handlers = {
        "risk": cmd_risk,
        "beta": cmd_beta,
        "dd-beta": lambda c: cmd_beta(c, kind="drawdown", default_comparators=("cdar:0.5", "erod:0")),
        "sweep": cmd_sweep,
        "frontier": cmd_frontier,
        "corr": cmd_corr,
        "gen-demo": cmd_gen_demo,
    }
    header, rows, payload, summary = handlers[cfg.command](cfg)
    if cfg.command == "gen-demo":
        # prices are written verbatim (full precision) so the returns round-trip
        stem = output_stem(cfg)
        stem.parent.mkdir(parents=True, exist_ok=True)
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(header)
        w.writerows(rows)
        stem.with_suffix(".csv").write_text(buf.getvalue(), encoding="utf-8")
        stem.with_suffix(".json").write_text(json.dumps(_jsonable(payload), indent=2, sort_keys=True) + "\n",
                                             encoding="utf-8")
        paths = [stem.with_suffix(".csv"), stem.with_suffix(".json")]
    else:
        paths = write_outputs(cfg, header, rows, payload)
    print(f"{cfg.command}: {summary} -> {', '.join(str(p) for p in paths)}")
    return paths


# ---------------------------------------------------------------------------
# argument parsing


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise ConfigError(message)


def _floats(text: str) -> tuple[float, ...]:
    try:
        return tuple(float(x) for x in text.split(",") if x.strip())
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from None


def _names(text: str) -> tuple[str, ...]:
    return tuple(x.strip() for x in text.split(",") if x.strip())


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="fdbeta", description="f-divergence risk measures and Betas from price CSVs")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def common(sp, market_required=True):
        sp.add_argument("--input", dest="inputs", nargs="+", required=True, help="CSV file(s): date,TICKER,...")
        sp.add_argument("--market", required=market_required, help="market (index proxy) column")
        sp.add_argument("--assets", type=_names, help="comma-separated asset columns (default: all others)")
        sp.add_argument("--start", help="first date (inclusive, ISO)")
        sp.add_argument("--end", help="last date (inclusive, ISO)")
        sp.add_argument("--returns-input", action="store_true", help="input holds returns, not prices")
        sp.add_argument("--out", help=f"output stem (relative to ${OUTPUT_ENV})")
        sp.add_argument("--format", dest="fmt", choices=("csv", "json", "both"), default="both")

    def divergence(sp):
        sp.add_argument("--div", dest="divergence", default="hellinger", help="divergence kind (default hellinger)")
        sp.add_argument("--scale", type=float, help="generator scale (hellinger default 1/2)")
        sp.add_argument("--div-alpha", type=float, help="order of the alpha-divergence")

    sp = sub.add_parser("risk", help="risk of the market column plus its identifier")
    common(sp)
    divergence(sp)
    sp.add_argument("--delta", type=float, default=0.1)

    for name in ("beta", "dd-beta"):
        sp = sub.add_parser(name, help="f-Beta table" if name == "beta" else "drawdown Beta table")
        common(sp)
        divergence(sp)
        sp.add_argument("--deltas", "--delta", dest="deltas", type=_floats, default=(0.1,))
        if name == "beta":
            sp.add_argument("--kind", choices=tuple(_KINDS), default="return")
        sp.add_argument("--comparators", type=_names, default=(),
                        help="comma list of standard, cdar:ALPHA, erod:EPS")

    sp = sub.add_parser("sweep", help="one Beta column per radius")
    common(sp)
    divergence(sp)
    sp.add_argument("--deltas", type=_floats, default=(0.05, 0.1, 0.15, 0.2, 0.25, 0.3, 0.35))
    sp.add_argument("--kind", choices=tuple(_KINDS), default="deviation")

    sp = sub.add_parser("frontier", help="min-risk efficient frontier")
    common(sp, market_required=False)
    divergence(sp)
    sp.add_argument("--delta", type=float, default=0.1)
    sp.add_argument("--targets", type=_floats, default=())
    sp.add_argument("--n-points", type=int, default=5)
    sp.add_argument("--path-probs", help="whitespace-separated path probabilities (one per input file)")

    sp = sub.add_parser("corr", help="Pearson/Spearman between two Beta columns")
    sp.add_argument("--input", dest="inputs", nargs=1, required=True, help="Beta table CSV")
    sp.add_argument("--col-a")
    sp.add_argument("--col-b")
    sp.add_argument("--out")
    sp.add_argument("--format", dest="fmt", choices=("csv", "json", "both"), default="both")

    sp = sub.add_parser("gen-demo", help="synthetic prices with planted Betas")
    sp.add_argument("--n-assets", type=int, default=10)
    sp.add_argument("--n-obs", type=int, default=2000)
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--market", default="MKT")
    sp.add_argument("--out", default="demo")
    return p


def config_from_args(argv=None) -> RunConfig:
    ns = vars(build_parser().parse_args(argv))
    if "delta" in ns:
        ns["deltas"] = (ns.pop("delta"),)
    ns["inputs"] = tuple(ns.get("inputs") or ())
    return RunConfig(**{k: v for k, v in ns.items() if v is not None or k in ("market",)})


_EXIT = (
    ((ConfigError, ParameterError, InfeasibleError), EXIT_CONFIG, "config"),
    ((DataError, DomainError, ShapeError, DegenerateError, OSError), EXIT_DATA, "data"),
    ((SolverError,), EXIT_SOLVER, "solver"),
)


def main(argv=None) -> int:
    try:
        run(config_from_args(argv))
    except SystemExit as exc:  # --help
        return int(exc.code or 0)
    except Exception as exc:
        for types, code, label in _EXIT:
            if isinstance(exc, types):
                msg = str(exc).replace("\n", " ")
                if isinstance(exc, OSError) and exc.filename:
                    msg = f"{exc.filename}: {exc.strerror}"
                print(f"fdbeta: {label} error: {msg}", file=sys.stderr)
                return code
        if isinstance(exc, FDBetaError):
            print(f"fdbeta: data error: {exc}", file=sys.stderr)
            return EXIT_DATA
        raise
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
