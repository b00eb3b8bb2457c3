"""CLI wiring: grammars, file IO, exit codes, end-to-end runs."""

import argparse
import json
import math
import xml.etree.ElementTree as ET

import numpy as np
import pytest

import melldec.cli as cli
import melldec.estimators as es
import melldec.lkernel as lk
import melldec.mellin as mm
import melldec.simulate as sim
from melldec.errors import EmptyFile, ParseError


class TestParsers:
    def test_complex_forms(self):
        assert cli.parse_complex("2+0i") == 2 + 0j
        assert cli.parse_complex("-1.5-2i") == -1.5 - 2j
        assert cli.parse_complex("3i") == 3j
        assert cli.parse_complex("2") == 2 + 0j
        assert cli.parse_complex("1 + 2i") == 1 + 2j
        with pytest.raises(argparse.ArgumentTypeError):
            cli.parse_complex("abc")

    def test_model_grammar(self):
        assert cli.parse_model("uniform:2").params["theta"] == 2.0
        assert cli.parse_model("beta:1,2").params == {"shape": 2.0, "theta": 2.0}
        assert cli.parse_model("power:0.5").params["shape"] == 0.5
        assert cli.parse_model("pareto:3,1").kind == "pareto"
        assert cli.parse_model("gamma:2,3").kind == "gamma"
        assert cli.parse_model("halfnormal").kind == "halfnormal"
        assert cli.parse_model("logproduct").kind == "logproduct"
        assert cli.parse_model("pointmass").kind == "pointmass"

    def test_model_grammar_rejections(self):
        for bad in ("nosuch:1", "beta", "pareto:3", "logproduct:1",
                    "uniform:a", "pareto:0.5,1"):
            with pytest.raises(argparse.ArgumentTypeError):
                cli.parse_model(bad)


class TestLoadSample:
    def test_header_detected(self, tmp_path):
        p = tmp_path / "s.csv"
        p.write_text("y\n1.0\n2.5\n")
        assert np.array_equal(cli.load_sample(p), [1.0, 2.5])

    def test_headerless(self, tmp_path):
        p = tmp_path / "s.csv"
        p.write_text("1.0\n2.5\n")
        assert np.array_equal(cli.load_sample(p), [1.0, 2.5])

    def test_parse_error_carries_line(self, tmp_path):
        p = tmp_path / "s.csv"
        p.write_text("1.0\nabc\n")
        with pytest.raises(ParseError) as info:
            cli.load_sample(p)
        assert info.value.line == 2

    def test_empty_file(self, tmp_path):
        p = tmp_path / "s.csv"
        p.write_text("header\n\n")
        with pytest.raises(EmptyFile):
            cli.load_sample(p)

    def test_missing_file(self, tmp_path):
        with pytest.raises(cli.UsageError):
            cli.load_sample(tmp_path / "nope.csv")


@pytest.fixture()
def sample_file(tmp_path):
    rng = np.random.default_rng(3)
    y = rng.exponential(1.0, 200) * rng.random(200)
    p = tmp_path / "sample.csv"
    p.write_text("y\n" + "\n".join(repr(float(v)) for v in y) + "\n")
    return p, y


class TestEstimateCommand:
    def test_matches_library(self, sample_file, capsys):
        p, y = sample_file
        code = cli.run(["estimate", "--input", str(p), "--model", "uniform:1",
                        "--point", "1.0", "--h", "0.3"])
        assert code == 0
        payload = json.loads(capsys.readouterr().out)
        cfg = es.EstimatorConfig(es.AtPoint(1.0), 0.0, 0.3,
                                 lk.lkernel_closed_beta(1.0, 1, 0.3))
        direct = es.estimate_at_point(y, cfg)
        assert payload["estimate"] == pytest.approx(direct, rel=1e-11)
        assert payload["n"] == 200 and payload["warnings"] == []

    def test_rule_bandwidth(self, sample_file, capsys):
        p, _ = sample_file
        code = cli.run(["estimate", "--input", str(p), "--model", "uniform:1",
                        "--point", "1.0", "--rule", "smooth:A=1,beta=1"])
        assert code == 0
        payload = json.loads(capsys.readouterr().out)
        assert payload["h"] == pytest.approx(
            es.bandwidth_smooth(1.0, 1.0, 1.0, 200), rel=1e-11)

    def test_h_and_rule_conflict(self, sample_file, capsys):
        p, _ = sample_file
        code = cli.run(["estimate", "--input", str(p), "--model", "uniform:1",
                        "--point", "1.0", "--h", "0.3", "--rule",
                        "smooth:A=1,beta=1"])
        assert code == 2

    def test_out_file(self, sample_file, tmp_path):
        p, _ = sample_file
        out = tmp_path / "est.json"
        assert cli.run(["estimate", "--input", str(p), "--model", "uniform:1",
                        "--point", "1.0", "--h", "0.3", "--out",
                        str(out)]) == 0
        assert "estimate" in json.loads(out.read_text())

    def test_support_warning_reported(self, tmp_path, capsys):
        p = tmp_path / "s.csv"
        p.write_text("1.0\n-2.0\n0.5\n")
        code = cli.run(["estimate", "--input", str(p), "--model", "uniform:1",
                        "--point", "1.0", "--h", "0.3"])
        assert code == 0
        payload = json.loads(capsys.readouterr().out)
        assert len(payload["warnings"]) == 1

    def test_zero_variant(self, tmp_path, capsys):
        rng = np.random.default_rng(9)
        y = rng.exponential(0.5, 150) * rng.random(150)
        p = tmp_path / "s.csv"
        p.write_text("\n".join(repr(float(v)) for v in y) + "\n")
        code = cli.run(["estimate-zero", "--input", str(p), "--model",
                        "power:1", "--h", "0.3"])
        assert code == 0
        payload = json.loads(capsys.readouterr().out)
        assert payload["s"] == 0.5
        L = lk.lkernel_closed_beta_zero(1.0, 1, 0.5, 0.3)
        cfg = es.EstimatorConfig(es.AtZero(), 0.5, 0.3, L)
        assert payload["estimate"] == pytest.approx(
            es.estimate_at_zero(y, cfg), rel=1e-11)

    def test_zero_rule(self, tmp_path, capsys):
        p = tmp_path / "s.csv"
        p.write_text("\n".join(str(v) for v in np.linspace(0.05, 2, 100)))
        code = cli.run(["estimate-zero", "--input", str(p), "--model",
                        "power:1", "--rule", "zero:A=1,beta=1,M=1"])
        assert code == 0
        payload = json.loads(capsys.readouterr().out)
        s, h, _ = es.bandwidth_zero(1.0, 1.0, 1.0, 0.0, 0.0, 100)
        assert payload["s"] == s
        assert payload["h"] == pytest.approx(h, rel=1e-11)


SPEC_TOML = """
[target]
kind = "exponential"
rate = 1.0

[model]
spec = "uniform:1"

[campaign]
n = [100, 200]
points = [1.0]
runs = 20
oracle_runs = 30
seed = 5
"""


class TestSimulateCommand:
    def test_end_to_end_and_determinism(self, tmp_path, monkeypatch):
        spec = tmp_path / "spec.toml"
        spec.write_text(SPEC_TOML)
        out1 = tmp_path / "r1.csv"
        out2 = tmp_path / "r2.csv"
        svg = tmp_path / "b.svg"
        assert cli.run(["simulate", "--spec", str(spec), "--out", str(out1),
                        "--svg", str(svg), "--workers", "1"]) == 0
        monkeypatch.setenv("MELLDEC_WORKERS", "3")
        assert cli.run(["simulate", "--spec", str(spec), "--out",
                        str(out2)]) == 0
        assert out1.read_bytes() == out2.read_bytes()
        report = sim.RiskReport.from_csv(out1.read_text())
        assert [r.n for r in report.rows] == [100, 200]
        ET.fromstring(svg.read_text())

    def test_zero_points_keyword(self, tmp_path):
        spec = tmp_path / "spec.toml"
        spec.write_text(SPEC_TOML.replace('points = [1.0]', 'points = "zero"')
                        .replace('rate = 1.0', 'rate = 2.0')
                        .replace('n = [100, 200]', 'n = [100]'))
        out = tmp_path / "r.csv"
        assert cli.run(["simulate", "--spec", str(spec), "--out",
                        str(out)]) == 0
        assert sim.RiskReport.from_csv(out.read_text()).rows[0].x0 == 0.0

    def test_missing_spec_names_path(self, tmp_path, capsys):
        missing = tmp_path / "missing.toml"
        code = cli.run(["simulate", "--spec", str(missing), "--out",
                        str(tmp_path / "r.csv")])
        assert code == 2
        assert str(missing) in capsys.readouterr().err

    def test_incomplete_spec(self, tmp_path):
        spec = tmp_path / "spec.toml"
        spec.write_text("[target]\nkind = 'exponential'\n")
        assert cli.run(["simulate", "--spec", str(spec), "--out",
                        str(tmp_path / "r.csv")]) == 2


class TestRateCheckCommand:
    def write_report(self, tmp_path, rows):
        p = tmp_path / "report.csv"
        p.write_text(sim.RiskReport(tuple(rows)).to_csv())
        return p

    def test_exact_slope(self, tmp_path, capsys):
        rows = [sim.RiskRow(n, 1.0, 0.1, 0, 0, 3.0 * n ** -0.2, 0, 0, 0, 10, 0)
                for n in (100, 1000, 10000)]
        p = self.write_report(tmp_path, rows)
        assert cli.run(["rate-check", "--report", str(p)]) == 0
        payload = json.loads(capsys.readouterr().out)
        assert payload["slope"] == pytest.approx(-0.2, abs=1e-11)

    def test_degenerate_design_is_computational(self, tmp_path, capsys):
        rows = [sim.RiskRow(n, 1.0, 0.1, 0, 0, 0.5, 0, 0, 0, 10, 0)
                for n in (100, 1000)]
        p = self.write_report(tmp_path, rows)
        assert cli.run(["rate-check", "--report", str(p)]) == 1
        assert "DegenerateDesign" in capsys.readouterr().err

    def test_missing_report(self, tmp_path):
        assert cli.run(["rate-check", "--report",
                        str(tmp_path / "nope.csv")]) == 2


class TestDumpCommands:
    def test_kernel_dump_stdout(self, capsys):
        assert cli.run(["kernel-dump", "--family", "gj", "--m", "2",
                        "--count", "11"]) == 0
        lines = capsys.readouterr().out.strip().splitlines()
        assert lines[0] == "t,K" and len(lines) == 12
        float(lines[1].split(",")[1])

    def test_kernel_dump_zero_family_file(self, tmp_path):
        out = tmp_path / "k.csv"
        assert cli.run(["kernel-dump", "--family", "zero-exp", "--m", "1",
                        "--out", str(out)]) == 0
        assert out.read_text().startswith("t,K\n")

    def test_kernel_dump_unknown_family(self):
        assert cli.run(["kernel-dump", "--family", "nosuch"]) == 2

    def test_lkernel_dump_point(self, capsys):
        assert cli.run(["lkernel-dump", "--model", "uniform:1", "--h", "0.3",
                        "--point", "1.0", "--count", "9"]) == 0
        lines = capsys.readouterr().out.strip().splitlines()
        assert lines[0] == "y,L" and len(lines) == 10
        assert all(np.isfinite(float(ln.split(",")[1])) for ln in lines[1:])

    def test_lkernel_dump_zero(self, capsys):
        assert cli.run(["lkernel-dump", "--model", "power:1", "--h", "0.3",
                        "--zero", "--count", "9"]) == 0
        lines = capsys.readouterr().out.strip().splitlines()
        assert len(lines) == 10
        assert float(lines[1].split(",")[0]) == 0.0


class TestMellinEval:
    def test_uniform_mean(self, capsys):
        assert cli.run(["mellin-eval", "--model", "uniform:1", "--z",
                        "2+0i"]) == 0
        assert capsys.readouterr().out.strip() == "0.5"

    def test_complex_output(self, capsys):
        assert cli.run(["mellin-eval", "--model", "gamma:2,3", "--z",
                        "1+1i"]) == 0
        text = capsys.readouterr().out.strip()
        val = mm.gamma_errors(2.0, 3.0).mellin(1 + 1j)
        assert text == f"{val.real:.12g}{val.imag:+.12g}i"


class TestTopLevel:
    def test_no_subcommand(self, capsys):
        assert cli.run([]) == 2

    def test_unknown_subcommand(self):
        assert cli.run(["frobnicate"]) == 2

    def test_self_test_passes(self, capsys):
        assert cli.run(["self-test"]) == 0
        out = capsys.readouterr().out
        assert "all checks passed" in out
        assert "FAIL" not in out
