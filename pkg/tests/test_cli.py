import csv
import json

import numpy as np
import pytest

from fdbeta.cli import RunConfig, ConfigError, generate_demo, main, run

SWEEP_DELTAS = "0.05,0.1,0.15,0.2,0.25,0.3,0.35"


@pytest.fixture
def outdir(tmp_path, monkeypatch):
    monkeypatch.setenv("FDBETA_OUTPUT_DIR", str(tmp_path))
    return tmp_path


@pytest.fixture
def demo(outdir):
    assert main(["gen-demo", "--n-assets", "4", "--n-obs", "250", "--seed", "7", "--out", "demo"]) == 0
    return outdir / "demo.csv"


def _rows(path):
    with open(path, newline="") as fh:
        return list(csv.reader(fh))


class TestGenDemo:
    def test_files_and_sidecar(self, demo):
        rows = _rows(demo)
        assert rows[0] == ["date", "MKT", "A01", "A02", "A03", "A04"]
        assert len(rows) == 252
        side = json.loads(demo.with_suffix(".json").read_text())
        betas = side["planted_betas"]
        assert set(betas) == {"A01", "A02", "A03", "A04"}
        assert all(0.5 <= b <= 2.0 for b in betas.values())

    def test_deterministic(self):
        a = generate_demo(3, 50, 1)
        b = generate_demo(3, 50, 1)
        np.testing.assert_array_equal(a[2], b[2])
        assert not np.array_equal(generate_demo(3, 50, 2)[2], a[2])


class TestCommands:
    def test_risk(self, demo, outdir):
        assert main(["risk", "--input", str(demo), "--market", "MKT", "--div", "hellinger", "--delta", "0.2"]) == 0
        payload = json.loads((outdir / "risk.json").read_text())
        rows = _rows(outdir / "risk.csv")
        assert rows[0] == ["date", "return", "loss", "q"]
        assert len(rows) == 251
        assert sum(payload["identifier"]) == pytest.approx(1.0)

    def test_beta_delta_zero_is_mean_ratio(self, demo, outdir):
        assert main(["beta", "--input", str(demo), "--market", "MKT", "--delta", "0"]) == 0
        payload = json.loads((outdir / "beta.json").read_text())
        from fdbeta.market import load_csv, make_frame
        f = make_frame(load_csv(demo), "MKT")
        expect = f.returns.mean(axis=0) / f.market_returns.mean()
        np.testing.assert_allclose(payload["betas"]["beta[delta=0]"], expect, rtol=1e-12)

    def test_beta_comparators(self, demo, outdir):
        code = main(["beta", "--input", str(demo), "--market", "MKT", "--delta", "0.1",
                     "--comparators", "standard,cdar:0.5,erod:0", "--out", "cmp"])
        assert code == 0
        header = _rows(outdir / "cmp.csv")[0]
        assert header == ["ticker", "beta[delta=0.1]", "standard", "cdar[alpha=0.5]", "erod[eps=0+]"]

    def test_dd_beta_defaults(self, demo, outdir):
        assert main(["dd-beta", "--input", str(demo), "--market", "MKT", "--delta", "0.05"]) == 0
        assert _rows(outdir / "dd-beta.csv")[0] == ["ticker", "beta_dd[delta=0.05]", "cdar[alpha=0.5]", "erod[eps=0+]"]

    def test_sweep_shape_and_drift(self, demo, outdir):
        assert main(["sweep", "--input", str(demo), "--market", "MKT", "--deltas", SWEEP_DELTAS]) == 0
        rows = _rows(outdir / "sweep.csv")
        assert len(rows[0]) == 8 and len(rows) == 5
        payload = json.loads((outdir / "sweep.json").read_text())
        assert set(payload["drift"]) == {"A01", "A02", "A03", "A04"}

    def test_csv_round_trips_json(self, demo, outdir):
        main(["sweep", "--input", str(demo), "--market", "MKT", "--deltas", "0.05,0.1"])
        rows = _rows(outdir / "sweep.csv")
        betas = json.loads((outdir / "sweep.json").read_text())["betas"]
        for row, full in zip(rows[1:], betas):
            for cell, value in zip(row[1:], full):
                assert cell == f"{value:.6g}"

    def test_corr(self, demo, outdir):
        main(["beta", "--input", str(demo), "--market", "MKT", "--comparators", "standard", "--out", "b"])
        assert main(["corr", "--input", str(outdir / "b.csv"), "--col-a", "beta[delta=0.1]",
                     "--col-b", "standard"]) == 0
        payload = json.loads((outdir / "corr.json").read_text())
        assert -1 <= payload["pearson"] <= 1 and payload["n"] == 4

    def test_frontier(self, demo, outdir):
        code = main(["frontier", "--input", str(demo), "--market", "MKT", "--assets", "A01,A02,A03",
                     "--n-points", "2"])
        assert code == 0
        rows = _rows(outdir / "frontier.csv")
        assert rows[0] == ["target", "risk", "mean_return", "w[A01]", "w[A02]", "w[A03]"]
        assert len(rows) == 3

    def test_period_filter(self, demo, outdir):
        main(["risk", "--input", str(demo), "--market", "MKT", "--start", "2015-02-01", "--end", "2015-03-01"])
        dates = [r[0] for r in _rows(outdir / "risk.csv")[1:]]
        assert dates[0] >= "2015-02-01" and dates[-1] <= "2015-03-01"

    def test_returns_input(self, outdir):
        p = outdir / "r.csv"
        p.write_text("date,MKT,A\n2020-01-01,0.01,0.02\n2020-01-02,-0.02,-0.01\n2020-01-03,0.005,0.0\n")
        assert main(["beta", "--input", str(p), "--market", "MKT", "--returns-input", "--delta", "0"]) == 0


class TestExitCodes:
    def test_missing_file(self, outdir, capsys):
        assert main(["beta", "--input", str(outdir / "nope.csv"), "--market", "MKT"]) == 2
        err = capsys.readouterr().err.strip().splitlines()
        assert len(err) == 1 and err[0].startswith("fdbeta: data error:")

    def test_bad_flag(self, capsys):
        assert main(["beta", "--market", "MKT"]) == 1
        assert capsys.readouterr().err.startswith("fdbeta: config error:")

    def test_unknown_divergence(self, demo):
        assert main(["beta", "--input", str(demo), "--market", "MKT", "--div", "nope"]) == 1

    def test_bad_cell(self, outdir, capsys):
        p = outdir / "bad.csv"
        p.write_text("date,MKT,A\n2020-01-01,100,10\n2020-01-02,oops,11\n")
        assert main(["beta", "--input", str(p), "--market", "MKT"]) == 2
        assert "row 3" in capsys.readouterr().err

    def test_unsorted_deltas(self, demo):
        assert main(["sweep", "--input", str(demo), "--market", "MKT", "--deltas", "0.2,0.1"]) == 1

    def test_infeasible_frontier_recorded(self, demo, outdir):
        assert main(["frontier", "--input", str(demo), "--market", "MKT", "--assets", "A01,A02",
                     "--targets", "1.0"]) == 0
        payload = json.loads((outdir / "frontier.json").read_text())
        assert payload["points"][0]["error"]


class TestConfig:
    def test_empty_deltas(self):
        with pytest.raises(ConfigError):
            RunConfig("sweep", inputs=("x.csv",), market="M", deltas=())

    def test_unknown_command(self):
        with pytest.raises(ConfigError):
            RunConfig("plot")

    def test_run_returns_paths(self, outdir):
        paths = run(RunConfig("gen-demo", n_assets=2, n_obs=10, out="tiny"))
        assert [p.name for p in paths] == ["tiny.csv", "tiny.json"]
