"""Command line interface smoke and determinism tests."""

import json

import pytest

from fthresh.cli import auto_grid, crossing_estimate, main
from fthresh.patterns import p_star, pattern_preset

K3 = pattern_preset("k3")


class TestAnalyze:
    def test_basic(self, capsys):
        assert main(["analyze", "--pattern", "k3"]) == 0
        out = capsys.readouterr().out
        assert "strictly 1-balanced: True" in out

    def test_with_n(self, capsys):
        assert main(["analyze", "--pattern", "k3", "--n", "30"]) == 0
        out = capsys.readouterr().out
        assert "p_star" in out

    def test_unbalanced_pattern_fails(self, tmp_path, capsys):
        path = tmp_path / "path4.txt"
        path.write_text("0 1\n1 2\n2 3\n")
        assert main(["analyze", "--pattern-file", str(path)]) == 1
        assert "error:" in capsys.readouterr().err


class TestVerify:
    def test_k3(self, capsys):
        assert main(["verify", "--pattern", "k3", "--max-len", "3"]) == 0
        out = capsys.readouterr().out
        assert "f1max = -1/3" in out
        assert "g1max = -1/3" in out
        assert "delta = 1/12" in out

    def test_csv_out(self, tmp_path):
        dest = tmp_path / "verify.csv"
        assert main(["verify", "--pattern", "k3", "--max-len", "3",
                     "--out", str(dest)]) == 0
        text = dest.read_text()
        assert text.startswith("# fthresh ")
        assert "pattern,k," in text
        assert "kind,context," in text


class TestParams:
    def test_json(self, capsys):
        assert main(["params", "--pattern", "k3", "--n", "40"]) == 0
        payload = json.loads(capsys.readouterr().out)
        assert payload["n"] == 40
        assert 0 < payload["pi"] < 1
        assert payload["p"] > payload["pi"]


class TestScan:
    def test_single_p(self, tmp_path):
        dest = tmp_path / "scan.csv"
        assert main(["scan", "--pattern", "k3", "--n", "9", "--p", "0.5",
                     "--trials", "40", "--out", str(dest)]) == 0
        lines = dest.read_text().splitlines()
        data = [ln for ln in lines if not ln.startswith("#")]
        assert data[0].startswith("p,trials,frac_factor")
        assert len(data) == 2

    def test_deterministic(self, tmp_path):
        a = tmp_path / "a.csv"
        b = tmp_path / "b.csv"
        argv = ["scan", "--pattern", "k3", "--n", "9", "--p", "0.45",
                "--trials", "30", "--seed", "3"]
        assert main(argv + ["--out", str(a)]) == 0
        assert main(argv + ["--out", str(b)]) == 0
        assert a.read_bytes() == b.read_bytes()

    def test_auto_grid(self):
        grid = auto_grid(K3, 30)
        base = p_star(K3, 30)
        assert len(grid) == 9
        assert grid[0] == pytest.approx(0.6 * base)
        assert grid[-1] == pytest.approx(1.5 * base)
        assert all(a < b for a, b in zip(grid, grid[1:]))

    def test_crossing_estimate(self):
        rows = [{"p": 0.1, "frac_factor": 0.2},
                {"p": 0.2, "frac_factor": 0.8}]
        assert crossing_estimate(rows) == pytest.approx(0.15)
        assert crossing_estimate([rows[0]]) is None


class TestCouple:
    def test_exact_with_transcripts(self, tmp_path, capsys):
        dest = tmp_path / "runs.jsonl"
        assert main(["couple", "--pattern", "k3", "--n", "6",
                     "--pi", "0.02", "--trials", "8", "--out",
                     str(dest)]) == 0
        out = capsys.readouterr().out
        assert "containment violations: 0" in out
        recs = [json.loads(ln) for ln in dest.read_text().splitlines()]
        assert recs[0]["kind"] == "header"
        assert any(r["kind"] == "trailer" for r in recs)

    def test_bound_mode(self, capsys):
        assert main(["couple", "--pattern", "k3", "--n", "10",
                     "--pi", "0.01", "--trials", "5", "--mode",
                     "bound"]) == 0
        assert "containment violations: 0" in capsys.readouterr().out


class TestChenStein:
    def test_table(self, tmp_path):
        dest = tmp_path / "cs.csv"
        assert main(["chen-stein", "--pattern", "k3", "--n", "8", "12",
                     "--out", str(dest)]) == 0
        lines = [ln for ln in dest.read_text().splitlines()
                 if not ln.startswith("#")]
        assert lines[0] == "n,lengths,count,pi,p,bound_H,bound_G"
        # one row per length class (2, 3) plus the combined class, per n
        assert len(lines) == 1 + 2 * 3

    def test_requires_n(self):
        with pytest.raises(SystemExit):
            main(["chen-stein", "--pattern", "k3"])


def test_version(capsys):
    with pytest.raises(SystemExit) as exc:
        main(["--version"])
    assert exc.value.code == 0
