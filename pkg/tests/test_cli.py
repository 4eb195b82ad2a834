import json

import numpy as np
import pytest

import isacrd as ir
from isacrd.cli import main
from helpers import binary_spec_text


def read_csv(path):
    lines = path.read_text().strip().split("\n")
    header = lines[0].split(",")
    rows = [dict(zip(header, line.split(","))) for line in lines[1:]]
    return header, rows


class TestRdCurveCommand:
    def test_matches_closed_form(self, tmp_path):
        out = tmp_path / "curve.csv"
        code = main(["rd-curve", "--builtin", "binary-mult", "--q", "0.5",
                     "--px", "0.5,0.5", "--out", str(out)])
        assert code == 0
        _, rows = read_csv(out)
        assert len(rows) >= 30
        for row in rows:
            d = float(row["D"])
            expected = ir.binary_mult_rate(0.5, 0.5, min(d, 0.5))
            assert float(row["R_bits"]) == pytest.approx(expected, abs=1e-4)

    def test_single_zero_slope_row(self, tmp_path):
        out = tmp_path / "one.csv"
        code = main(["rd-curve", "--builtin", "binary-mult", "--q", "0.3",
                     "--mu", "0", "--out", str(out)])
        assert code == 0
        _, rows = read_csv(out)
        assert len(rows) == 1
        assert float(rows[0]["R_bits"]) == 0.0
        assert float(rows[0]["D"]) == pytest.approx(0.3, abs=1e-12)

    def test_malformed_spec_exits_2(self, tmp_path, capsys):
        bad = tmp_path / "bad.json"
        bad.write_text(binary_spec_text(bad_row=True))
        out = tmp_path / "curve.csv"
        code = main(["rd-curve", "--spec", str(bad), "--out", str(out)])
        assert code == 2
        assert "sensing_kernel[0][0]" in capsys.readouterr().err

    def test_spec_file_input(self, tmp_path):
        spec = tmp_path / "chan.json"
        spec.write_text(binary_spec_text(q=0.5))
        out = tmp_path / "curve.csv"
        code = main(["rd-curve", "--spec", str(spec), "--mu", "-2", "--out", str(out)])
        assert code == 0


class TestCapacityCommand:
    def test_single_budget(self, tmp_path):
        out = tmp_path / "cap.csv"
        code = main(["capacity", "--builtin", "binary-mult", "--q", "0.5",
                     "--d0", "0.15", "--out", str(out)])
        assert code == 0
        _, rows = read_csv(out)
        assert float(rows[0]["C_bits"]) == pytest.approx(0.4406, abs=1e-4)

    def test_infeasible_budget_exits_3(self, tmp_path):
        out = tmp_path / "cap.csv"
        code = main(["capacity", "--builtin", "binary-mult", "--q", "0.5",
                     "--d0", "-0.1", "--out", str(out)])
        assert code == 3

    def test_product_dmc_grid(self, tmp_path):
        out = tmp_path / "cap.csv"
        px_out = tmp_path / "px.json"
        code = main(["capacity", "--builtin", "product-dmc",
                     "--state-prior", "0.25,0.25,0.25,0.25",
                     "--d0-grid", "0.03:0.1875:4", "--out", str(out),
                     "--px-out", str(px_out)])
        assert code == 0
        _, rows = read_csv(out)
        assert len(rows) == 4
        assert float(rows[-1]["C_bits"]) == pytest.approx(1.5, abs=1e-6)
        records = json.loads(px_out.read_text())
        assert len(records) == 4


class TestRegionCommand:
    def test_binary_sweep(self, tmp_path):
        out = tmp_path / "region.csv"
        code = main(["region", "--builtin", "binary-mult", "--q", "0.3",
                     "--d0-grid", "0.05:0.3:3", "--mu-grid=-30:-0.05:8",
                     "--out", str(out)])
        assert code == 0
        header, rows = read_csv(out)
        assert header == ["D0", "B", "C_bits", "Dmin", "D", "R_bits", "converged"]
        budgets = sorted({float(r["D0"]) for r in rows})
        assert budgets == pytest.approx([0.05, 0.175, 0.3])

    def test_product_dmc_sweep(self, tmp_path):
        out = tmp_path / "region.csv"
        code = main(["region", "--builtin", "product-dmc",
                     "--state-prior", "0.333333333333,0.25,0.25,0.166666666667",
                     "--d0-grid", "0.1:0.5:2", "--mu-grid=-30:-0.05:6",
                     "--out", str(out)])
        assert code == 0
        _, rows = read_csv(out)
        assert len(rows) == 12

    def test_all_infeasible_exits_3(self, tmp_path):
        out = tmp_path / "region.csv"
        with pytest.warns(UserWarning):
            code = main(["region", "--builtin", "binary-mult", "--q", "0.5",
                         "--d0-grid=-0.5:-0.2:2", "--out", str(out)])
        assert code == 3


class TestGaussianCommand:
    def test_compare_high_power(self, tmp_path):
        out = tmp_path / "g.csv"
        code = main(["gaussian", "--compare", "--power-db", "10",
                     "--pam-order", "16", "--out", str(out)])
        assert code == 0
        header, rows = read_csv(out)
        assert header == ["D", "R_det_bits", "R_pam_bits"]
        low = [r for r in rows if 2.0 <= float(r["D"]) <= 5.0]
        assert low and all(float(r["R_pam_bits"]) < float(r["R_det_bits"]) for r in low)

    def test_low_power_deterministic_wins(self, tmp_path):
        out = tmp_path / "g.csv"
        code = main(["gaussian", "--compare", "--power-db", "0", "--out", str(out)])
        assert code == 0
        _, rows = read_csv(out)
        for r in rows:
            assert float(r["R_det_bits"]) <= float(r["R_pam_bits"]) + 1e-12

    def test_deterministic_point_value(self, tmp_path):
        out = tmp_path / "g.csv"
        code = main(["gaussian", "--waveform", "det", "--power-db", "0",
                     "--d-grid", "0.75:0.75:1", "--out", str(out)])
        assert code == 0
        _, rows = read_csv(out)
        assert float(rows[0]["R_bits"]) == pytest.approx(0.5, abs=1e-12)

    def test_mixture_domain_error_exits_2(self, tmp_path):
        out = tmp_path / "g.csv"
        code = main(["gaussian", "--waveform", "pam", "--power-db", "10",
                     "--d-grid", "0.1:0.2:2", "--out", str(out)])
        assert code == 2


class TestValidateCommand:
    def test_valid_builtin(self, capsys):
        code = main(["validate", "--builtin", "binary-mult", "--q", "0.3"])
        assert code == 0
        out = capsys.readouterr().out
        assert "zero-rate distortion: 0.3" in out

    def test_bad_spec_exits_2(self, tmp_path, capsys):
        bad = tmp_path / "bad.json"
        bad.write_text("{}")
        assert main(["validate", "--spec", str(bad)]) == 2
        assert "missing fields" in capsys.readouterr().err

    def test_monte_carlo_check(self, capsys):
        code = main(["validate", "--builtin", "binary-mult", "--q", "0.5",
                     "--mc", "20000", "--seed", "11"])
        assert code == 0
        assert "empirical minimum distortion" in capsys.readouterr().out


class TestDeterminism:
    def test_reruns_byte_identical(self, tmp_path):
        first = tmp_path / "a.csv"
        second = tmp_path / "b.csv"
        argv = ["rd-curve", "--builtin", "binary-mult", "--q", "0.3",
                "--px", "0.4,0.6", "--mu-grid=-20:-0.1:10"]
        assert main(argv + ["--out", str(first)]) == 0
        assert main(argv + ["--out", str(second)]) == 0
        assert first.read_bytes() == second.read_bytes()
