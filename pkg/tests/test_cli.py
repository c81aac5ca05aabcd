import csv
import io
import json

import numpy as np
import pytest

from qrsgame.bounds import steering_bound
from qrsgame.cli import main
from qrsgame.game import CheatStrategy, ScoreSpec, exact_honest_score, phi_plus_state
from qrsgame.montecarlo import Honest, SimConfig, simulate
from qrsgame.settings import builtin_directions


def run(capsys, *argv):
    try:
        code = main(list(argv))
    except SystemExit as exc:  # argparse-level rejection
        code = exc.code
    out = capsys.readouterr()
    return code, out.out, out.err


def rows(text):
    return list(csv.DictReader(io.StringIO(text)))


@pytest.fixture
def perfect_prep(tmp_path):
    p = tmp_path / "perfect.txt"
    p.write_text("# perfect orthogonal-2\n1 +1 1 0 0\n1 -1 -1 0 0\n2 +1 0 0 1\n2 -1 0 0 -1\n")
    return p


@pytest.fixture
def fixed_prep(tmp_path):
    p = tmp_path / "fixed.txt"
    p.write_text("1 +1 1 0 0\n1 -1 -1 0 0\n2 +1 1 0 0\n2 -1 -1 0 0\n")
    return p


class TestBound:
    def test_orthogonal_2(self, capsys):
        code, out, _ = run(capsys, "bound", "--family", "orthogonal-2", "--eta", "1.0")
        assert code == 0
        assert out.splitlines()[0] == "eta_h,c_n,k_support,weights"
        (row,) = rows(out)
        assert float(row["c_n"]) == pytest.approx(0.7071068, abs=1e-7)
        assert row["k_support"] == "2"

    def test_threshold(self, capsys):
        code, out, _ = run(capsys, "bound", "--family", "orthogonal-3", "--eta", "0.3333333")
        assert float(rows(out)[0]["c_n"]) == pytest.approx(1.0, abs=1e-12)

    def test_zero_eta_usage_error(self, capsys):
        code, _, err = run(capsys, "bound", "--family", "orthogonal-2", "--eta", "0")
        assert code == 1 and "eta" in err

    def test_grid_and_json(self, capsys):
        code, out, _ = run(capsys, "bound", "--family", "cube-4", "--eta-grid", "0.1:1.0:0.1", "--format", "json")
        doc = json.loads(out)
        assert doc["metadata"]["command"] == "bound"
        assert set(doc["metadata"]) >= {"version", "config", "seed"}
        assert len(doc["rows"]) == 10
        ds = builtin_directions("cube-4")
        for r in doc["rows"]:
            assert r["c_n"] == steering_bound(ds, r["eta_h"]).value

    def test_directions_file(self, capsys, tmp_path):
        p = tmp_path / "d.txt"
        p.write_text("# two axes\n1 0 0\n0 0 1\n")
        code, out, _ = run(capsys, "bound", "--directions", str(p), "--eta", "1")
        assert float(rows(out)[0]["c_n"]) == pytest.approx(np.sqrt(0.5))

    def test_bad_directions_file(self, capsys, tmp_path):
        p = tmp_path / "d.txt"
        p.write_text("2 0 0\n")
        code, _, err = run(capsys, "bound", "--directions", str(p), "--eta", "1")
        assert code == 1 and "line 1" in err


class TestRFactor:
    def test_perfect(self, capsys, perfect_prep):
        code, out, _ = run(capsys, "rfactor", "--family", "orthogonal-2", "--prep", str(perfect_prep))
        (row,) = rows(out)
        assert list(row) == ["eta_h", "c_n", "r", "signs"]
        assert float(row["r"]) == pytest.approx(1.0, abs=1e-9)

    def test_fixed(self, capsys, fixed_prep):
        code, out, _ = run(capsys, "rfactor", "--family", "orthogonal-2", "--prep", str(fixed_prep))
        assert float(rows(out)[0]["r"]) == pytest.approx(np.sqrt(2), abs=1e-9)

    def test_missing_line(self, capsys, tmp_path):
        p = tmp_path / "gap.txt"
        p.write_text("1 +1 1 0 0\n1 -1 -1 0 0\n2 +1 0 0 1\n")
        code, _, err = run(capsys, "rfactor", "--family", "orthogonal-2", "--prep", str(p))
        assert code == 1 and "(j=2, s=-1)" in err


class TestScore:
    def test_phi_plus(self, capsys):
        code, out, _ = run(capsys, "score", "--state", "phi-plus", "--family", "orthogonal-2", "--eta-h", "1", "--eta-m", "1")
        rs = rows(out)
        assert list(rs[0]) == ["j", "s", "corr", "herald", "total", "eta_h_hat"]
        assert len(rs) == 4
        total = float(rs[0]["total"])
        assert total == pytest.approx(0.0732233, abs=1e-7)
        lib = exact_honest_score(phi_plus_state(), ScoreSpec.create(builtin_directions("orthogonal-2"), 1.0))
        assert total == lib.total

    def test_half(self, capsys):
        _, out, _ = run(capsys, "score", "--family", "orthogonal-2", "--eta-m", "0.5")
        assert float(rows(out)[0]["total"]) == pytest.approx(0.0732233 / 2, abs=1e-7)

    def test_product(self, capsys):
        _, out, _ = run(capsys, "score", "--family", "orthogonal-2", "--state", "product-00")
        assert float(rows(out)[0]["total"]) <= 0

    def test_unknown_state(self, capsys):
        code, _, err = run(capsys, "score", "--family", "orthogonal-2", "--state", "ghz")
        assert code == 1


class TestCheat:
    def test_default_pass(self, capsys):
        code, out, err = run(capsys, "cheat", "--family", "orthogonal-2")
        (row,) = rows(out)
        assert code == 0 and row["certificate"] == "PASS"
        assert float(row["supremum"]) <= 1e-9
        assert "PASS" in err

    def test_fixed_prep_with_r(self, capsys, fixed_prep):
        code, out, _ = run(capsys, "cheat", "--family", "orthogonal-2", "--prep", str(fixed_prep))
        row = rows(out)[0]
        assert code == 0 and row["certificate"] == "PASS"
        assert float(row["r"]) == pytest.approx(np.sqrt(2), abs=1e-9)

    def test_fixed_prep_without_r_fails(self, capsys, fixed_prep):
        code, out, _ = run(
            capsys, "cheat", "--family", "orthogonal-2", "--prep", str(fixed_prep), "--r", "1",
            "--subdivisions", "1", "--mu-points", "11",
        )
        assert code == 2 and rows(out)[0]["certificate"] == "FAIL"

    def test_exhaustive_refused(self, capsys):
        code, _, err = run(capsys, "cheat", "--n-family", "dodecahedron-10", "--exhaustive")
        assert code == 1 and "budget" in err

    def test_model_flag(self, capsys):
        code, out, _ = run(
            capsys, "cheat", "--family", "orthogonal-2", "--model", "visibility:0.7", "--r", "auto",
            "--subdivisions", "2", "--mu-points", "21",
        )
        row = rows(out)[0]
        assert code == 0 and float(row["r"]) == pytest.approx(0.7, abs=1e-9)


class TestSimulate:
    ARGS = ("simulate", "--family", "orthogonal-2", "--rounds", "20000", "--seed", "99")

    def test_bit_identical(self, capsys):
        _, a, _ = run(capsys, *self.ARGS)
        _, b, _ = run(capsys, *self.ARGS)
        assert a == b
        assert a.splitlines()[0] == "eta_h_hat,mean,std_error,rounds_valid,seed"

    def test_matches_library(self, capsys):
        _, out, _ = run(capsys, *self.ARGS, "--format", "json")
        doc = json.loads(out)
        est = simulate(SimConfig(ScoreSpec.create(builtin_directions("orthogonal-2"), 1.0), Honest(phi_plus_state()), 20000, 99))
        assert doc["rows"][0]["mean"] == est.mean
        assert doc["metadata"]["seed"] == 99

    def test_zero_rounds(self, capsys):
        code, _, _ = run(capsys, "simulate", "--family", "orthogonal-2", "--rounds", "0")
        assert code == 1

    def test_no_valid_rounds(self, capsys):
        code, _, err = run(capsys, "simulate", "--family", "orthogonal-2", "--rounds", "100", "--eta-h", "0")
        assert code == 1 and "no valid rounds" in err

    def test_cheat_file(self, capsys, tmp_path):
        strat = CheatStrategy.uniform(0.5, (1, 0, 0), (1, 2))
        p = tmp_path / "cheat.json"
        p.write_text(json.dumps(strat.describe()))
        code, out, _ = run(capsys, "simulate", "--family", "orthogonal-2", "--rounds", "50000", "--cheat", str(p))
        assert code == 0
        assert float(rows(out)[0]["eta_h_hat"]) == 1.0

    def test_out_file(self, capsys, tmp_path):
        p = tmp_path / "o.csv"
        run(capsys, *self.ARGS, "--out", str(p))
        assert p.read_text().startswith("eta_h_hat,")


class TestSweep:
    def test_sign_flip(self, capsys):
        code, out, _ = run(
            capsys, "sweep", "--family", "orthogonal-2", "--rounds", "20000", "--axis", "eta_h",
            "--values", "0.4", "0.6", "0.8", "1.0",
        )
        rs = rows(out)
        assert list(rs[0]) == ["axis", "value", "eta_h_hat", "mean", "std_error", "rounds_valid", "seed", "exact", "error"]
        means = [float(r["mean"]) for r in rs]
        assert means[0] <= 0 < means[1]

    def test_error_rows(self, capsys):
        code, out, _ = run(
            capsys, "sweep", "--family", "orthogonal-2", "--rounds", "1000", "--axis", "n-family",
            "--values", "cube-4", "bogus",
        )
        rs = rows(out)
        assert code == 0 and rs[0]["error"] == "" and "unknown family" in rs[1]["error"]

    def test_empty(self, capsys):
        code, out, _ = run(capsys, "sweep", "--family", "orthogonal-2", "--rounds", "10", "--axis", "eta_h", "--format", "json")
        assert json.loads(out)["rows"] == []


def test_policy_override(capsys):
    code, _, err = run(capsys, "bound", "--family", "orthogonal-2", "--eta", "1", "--policy", "nonsense=1")
    assert code == 1 and "policy" in err
    code, _, _ = run(capsys, "bound", "--family", "orthogonal-2", "--eta", "1", "--policy", "psd_slack=1e-8")
    assert code == 0


def test_no_subcommand(capsys):
    with pytest.raises(SystemExit) as exc:
        main([])
    assert exc.value.code == 1
