import csv
import json

import numpy as np
import pytest

from ebmono.cli import IngestError, ingest, main


@pytest.fixture
def data_file(tmp_path):
    path = tmp_path / "data.txt"
    path.write_text("\n".join(f"{v:.6f}" for v in np.random.default_rng(1).exponential(size=40)) + "\n")
    return path


def read_csv(path):
    with open(path, newline="") as fh:
        return list(csv.DictReader(fh))


class TestIngest:
    def test_plain(self, tmp_path):
        p = tmp_path / "a.txt"
        p.write_text("1.0\n3.0\n")
        s = ingest(p)
        assert s.values.tolist() == [1.0, 3.0] and s.n == 2

    def test_header_and_csv(self, tmp_path):
        p = tmp_path / "b.csv"
        p.write_text("loss\n2.5\n0.7\n")
        assert ingest(p).values.tolist() == [0.7, 2.5]
        p.write_text("loss,year\n2.5,1988\n0.7,1988\n")
        assert ingest(p).values.tolist() == [0.7, 2.5]

    def test_negative_names_line(self, tmp_path):
        p = tmp_path / "c.txt"
        p.write_text("1.0\n-1.0\n")
        with pytest.raises(IngestError, match=":2:"):
            ingest(p)

    def test_non_numeric_names_line(self, tmp_path):
        p = tmp_path / "d.txt"
        p.write_text("1.0\n2.0\nabc\n")
        with pytest.raises(IngestError, match=":3:"):
            ingest(p)

    def test_empty(self, tmp_path):
        p = tmp_path / "e.txt"
        p.write_text("")
        with pytest.raises(IngestError):
            ingest(p)


class TestFit:
    def test_golden_grenander_rows(self, tmp_path):
        p = tmp_path / "two.txt"
        p.write_text("1.0\n3.0\n")
        out = tmp_path / "o"
        assert main(["fit", "--data", str(p), "--out", str(out), "--iters", "1", "--thin", "1"]) == 0
        rows = read_csv(out / "grenander.csv")
        assert [(float(r["weight"]), float(r["location"])) for r in rows] == [(0.25, 1.0), (0.75, 3.0)]
        assert [float(r["height"]) for r in rows] == [0.5, 0.25]

    def test_outputs_and_meta(self, data_file, tmp_path):
        out = tmp_path / "o"
        argv = ["fit", "--data", str(data_file), "--out", str(out), "--burnin", "20",
                "--iters", "50", "--grid", "64", "--emit-draws", "--seed", "3"]
        assert main(argv) == 0
        band = read_csv(out / "band.csv")
        assert len(band) == 64
        assert all(float(r["lower"]) <= float(r["upper"]) for r in band)
        draws = read_csv(out / "draws.csv")
        meta = json.loads((out / "meta.json").read_text())
        assert len(draws) == 50 * meta["S"]
        assert meta["n"] == 40 and meta["seed"] == 3
        assert meta["chain"] == {"burn_in": 20, "iterations": 50, "thin": 1, "seed": 3}
        assert set(meta) >= {"c", "delta", "wall_clock_seconds", "config"}

    def test_byte_identical(self, data_file, tmp_path):
        argv = ["--burnin", "20", "--iters", "40", "--seed", "5", "--data", str(data_file)]
        main(["fit", "--out", str(tmp_path / "a"), *argv])
        main(["fit", "--out", str(tmp_path / "b"), *argv])
        for name in ("band.csv", "grenander.csv"):
            assert (tmp_path / "a" / name).read_bytes() == (tmp_path / "b" / name).read_bytes()

    def test_rerun_from_meta(self, data_file, tmp_path):
        main(["fit", "--data", str(data_file), "--out", str(tmp_path / "a"),
              "--burnin", "10", "--iters", "30", "--seed", "8", "--level", "0.8"])
        main(["fit", "--config", str(tmp_path / "a" / "meta.json"), "--out", str(tmp_path / "b")])
        assert (tmp_path / "a" / "band.csv").read_bytes() == (tmp_path / "b" / "band.csv").read_bytes()
        meta = json.loads((tmp_path / "b" / "meta.json").read_text())
        assert meta["config"]["level"] == 0.8

    def test_missing_file(self, tmp_path, capsys):
        out = tmp_path / "o"
        assert main(["fit", "--data", str(tmp_path / "nope.txt"), "--out", str(out)]) != 0
        assert not out.exists()
        assert "error" in capsys.readouterr().err

    def test_bad_level(self, data_file, tmp_path):
        assert main(["fit", "--data", str(data_file), "--out", str(tmp_path / "o"), "--level", "1.5"]) != 0


def test_grenander_command(data_file, tmp_path):
    out = tmp_path / "g"
    assert main(["grenander", "--data", str(data_file), "--out", str(out)]) == 0
    rows = read_csv(out / "grenander.csv")
    assert sum(float(r["weight"]) for r in rows) == pytest.approx(1.0, abs=1e-12)
    assert sorted(p.name for p in out.iterdir()) == ["grenander.csv", "meta.json"]


class TestSimulate:
    def test_shape(self, tmp_path):
        out = tmp_path / "s"
        argv = ["simulate", "--truth", "exponential", "--n", "100", "--x", "1.0", "--reps", "20",
                "--seed", "7", "--burnin", "50", "--iters", "200", "--out", str(out)]
        assert main(argv) == 0
        rows = read_csv(out / "coverage.csv")
        assert len(rows) == 1
        assert 0 <= float(rows[0]["coverage"]) <= 1 and rows[0]["replications"] == "20"

    def test_byte_identical(self, tmp_path):
        argv = ["--truth", "halfnormal", "--n", "50", "--x", "0.5,1", "--reps", "3",
                "--burnin", "20", "--iters", "50", "--seed", "2"]
        main(["simulate", "--out", str(tmp_path / "a"), *argv])
        main(["simulate", "--out", str(tmp_path / "b"), *argv])
        assert (tmp_path / "a" / "coverage.csv").read_bytes() == (tmp_path / "b" / "coverage.csv").read_bytes()

    def test_invalid_truth(self, tmp_path, capsys):
        assert main(["simulate", "--truth", "cauchy", "--out", str(tmp_path / "x")]) != 0
        err = capsys.readouterr().err
        assert "exponential" in err and "halfnormal" in err


def test_rate_shape(tmp_path):
    out = tmp_path / "r"
    argv = ["rate", "--truth", "exponential", "--n", "100,400,1600", "--reps", "1",
            "--burnin", "20", "--iters", "50", "--out", str(out)]
    assert main(argv) == 0
    rows = read_csv(out / "rate.csv")
    assert [int(r["n"]) for r in rows] == [100, 400, 1600]
    assert "loglog_slope" in json.loads((out / "meta.json").read_text())
