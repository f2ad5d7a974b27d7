import json
import subprocess
import sys

import numpy as np
import pytest

from modstand import cli
from modstand.errors import IoError
from modstand.reporting import Check, Report, emit_plot


class TestReport:
    def test_check_pass_flag(self):
        assert Check("a", 1e-12, 1e-10).passed
        assert not Check("a", 1e-8, 1e-10).passed

    def test_nonfinite_residual_rejected(self):
        with pytest.raises(ValueError):
            Check("bad", float("nan"), 1e-10)

    def test_round_trip_bit_identical(self):
        rep = Report("standard", {"dim": 4}, seed=7)
        rep.add("x", 1.25e-11, 1e-9)
        rep.add("y", 3.0e-3, 1e-9, provenance="closed-form")
        rep.wall_time_s = 0.125
        text = rep.serialize()
        again = Report.deserialize(text).serialize()
        assert text == again

    def test_passed_aggregates(self):
        rep = Report("standard", {}, seed=1)
        rep.add("ok", 0.0, 1e-12)
        assert rep.passed
        rep.add("bad", 1.0, 1e-12)
        assert not rep.passed


class TestPlot:
    def test_single_point(self, tmp_path):
        path = tmp_path / "one.svg"
        emit_plot([(256, 1e-3)], str(path))
        data = path.read_text()
        assert data.count("<circle") == 1
        assert data.startswith("<svg")

    def test_deterministic_bytes(self, tmp_path):
        series = [(256, 1e-2), (1024, 3e-4)]
        p1, p2 = tmp_path / "a.svg", tmp_path / "b.svg"
        emit_plot(series, str(p1))
        emit_plot(series, str(p2))
        assert p1.read_bytes() == p2.read_bytes()

    def test_monotone_series_plots_line(self, tmp_path):
        path = tmp_path / "curve.svg"
        emit_plot([(64, 1e-1), (256, 1e-3), (1024, 1e-6)], str(path))
        assert "<path" in path.read_text()

    def test_empty_series_rejected(self, tmp_path):
        with pytest.raises(IoError):
            emit_plot([], str(tmp_path / "no.svg"))


class TestSuites:
    def test_standard_suite_passes(self):
        checks = cli.suite_standard(4, 10, seed=7)
        assert len(checks) >= 6
        assert all(c.passed for c in checks)

    def test_group_suite_passes(self):
        checks = cli.suite_group(3, seed=7)
        assert all(c.passed for c in checks)

    def test_vn_suite_passes(self):
        checks = cli.suite_vn(3, 3, seed=7)
        assert all(c.passed for c in checks)

    def test_fock_suite_passes(self):
        checks = cli.suite_fock(3, 3, seed=7)
        assert all(c.passed for c in checks)

    def test_wedge_suite_passes(self):
        checks = cli.suite_wedge(15, seed=7)
        assert all(c.passed for c in checks)

    def test_affine_suite_passes(self):
        checks, extras = cli.suite_affine(256, 4.0, seed=7)
        assert all(c.passed for c in checks)
        assert extras["residual_series"]


class TestRun:
    def test_standard_run_writes_report(self, tmp_path):
        out = tmp_path / "report.json"
        code = cli.run(["standard", "--dim", "4", "--trials", "10",
                        "--seed", "7", "--out", str(out)])
        assert code == 0
        data = json.loads(out.read_text())
        assert data["passed"]
        assert data["seed"] == 7
        assert len(data["checks"]) >= 6

    def test_seed_reproducibility(self, tmp_path):
        o1, o2 = tmp_path / "r1.json", tmp_path / "r2.json"
        for o in (o1, o2):
            assert cli.run(["standard", "--dim", "3", "--trials", "6",
                            "--seed", "11", "--out", str(o)]) == 0
        d1 = json.loads(o1.read_text())
        d2 = json.loads(o2.read_text())
        assert d1["checks"] == d2["checks"]

    def test_fock_run(self, tmp_path):
        out = tmp_path / "fock.json"
        code = cli.run(["fock", "--fermi-dim", "3", "--trials", "5",
                        "--seed", "3", "--out", str(out)])
        assert code == 0

    def test_affine_run_with_plot(self, tmp_path):
        out = tmp_path / "affine.json"
        plot = tmp_path / "affine.svg"
        code = cli.run(["affine", "--grid-n", "256", "--grid-l", "4",
                        "--seed", "5", "--out", str(out), "--plot", str(plot)])
        assert code == 0
        assert plot.exists()
        data = json.loads(out.read_text())
        assert str(plot) in data["artifacts"]

    def test_usage_error_exit_code(self):
        assert cli.run(["no-such-command"]) == 2

    def test_module_entry_point(self, tmp_path):
        out = tmp_path / "group.json"
        proc = subprocess.run(
            [sys.executable, "-m", "modstand.cli", "group",
             "--trials", "5", "--seed", "2", "--out", str(out)],
            capture_output=True, text=True,
        )
        assert proc.returncode == 0, proc.stderr
        assert "pass" in proc.stdout


def test_group_suite_preset_flag(tmp_path):
    out = tmp_path / "q8.json"
    code = cli.run(["group", "--preset", "q8-z2", "--trials", "5",
                    "--seed", "4", "--out", str(out)])
    assert code == 0
    data = json.loads(out.read_text())
    names = [c["name"] for c in data["checks"]]
    assert "preset-q8-z2-extension" in names
