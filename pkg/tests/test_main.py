"""Tests for the littlewood-lab CLI entry point."""

from __future__ import annotations

import pytest

from littlewood_lab import audits
from littlewood_lab.main import EXIT_AUDIT_FAILED, EXIT_ERROR, EXIT_OK, run_command
from littlewood_lab.report import AuditReport, read_csv


@pytest.fixture
def out(tmp_path, monkeypatch):
    monkeypatch.chdir(tmp_path)
    return tmp_path / "results"


class TestBuild:
    def test_writes_build_csv(self, out):
        code = run_command(["build", "--k-range", "1..3", "--prime", "5", "--out", str(out)])
        assert code == EXIT_OK
        rows = read_csv(out / "build.csv")
        assert [r["member"] for r in rows] == ["P", "Q"] * 3 + ["self"]
        assert all(r["config_hash"] for r in rows)
        assert rows[-1]["reciprocity_ok"] == "True"

    def test_run_log_created(self, out):
        run_command(["build", "--k", "2", "--out", str(out)])
        logs = list((out / "runs").glob("*.jsonl"))
        assert len(logs) == 1

    def test_no_log(self, out):
        run_command(["build", "--k", "2", "--no-log", "--out", str(out)])
        assert not (out / "runs").exists()


class TestAudit:
    def test_single_audit_passes(self, out, capsys):
        code = run_command(["audit", "--name", "parallelogram", "--k", "10", "--out", str(out)])
        assert code == EXIT_OK
        rows = read_csv(out / "audits.csv")
        assert [(r["name"], r["k"], r["status"]) for r in rows] == [
            ("parallelogram", "10", "pass")
        ]
        assert "PASS" in capsys.readouterr().err

    def test_list(self, out, capsys):
        assert run_command(["audit", "--list", "--no-log"]) == EXIT_OK
        text = capsys.readouterr().out
        assert "parallelogram" in text
        assert "ensemble" in text

    def test_unknown_audit(self, out):
        assert run_command(["audit", "--name", "nope", "--out", str(out)]) == EXIT_ERROR

    def test_failed_audit_exit_code(self, out, monkeypatch):
        def always_fail(cfg, cal):
            return [AuditReport.upper("always_fail", "", {"k": 1}, 2.0, 1.0)]

        monkeypatch.setitem(audits.AUDITS, "always_fail", always_fail)
        code = run_command(["audit", "--name", "always_fail", "--out", str(out)])
        assert code == EXIT_AUDIT_FAILED


class TestZeros:
    def test_fekete_counts(self, out):
        code = run_command(["zeros", "--out", str(out), "--fekete", "5"])
        assert code == EXIT_OK
        rows = read_csv(out / "unimodular.csv")
        assert rows[0]["p"] == "5"
        assert rows[0]["count"] == "1"
        roots = read_csv(out / "roots.csv")
        assert len(roots) == 4

    def test_rudin_shapiro_summary(self, out):
        assert run_command(["zeros", "--k-range", "1..3", "--out", str(out)]) == EXIT_OK
        summary = read_csv(out / "zero_summary.csv")
        assert len(summary) == 6
        assert all(r["real_zeros"] == "1" for r in summary)


class TestPlot:
    def test_plot_after_autocorr(self, out):
        assert run_command(["autocorr", "--k-range", "2..6", "--out", str(out)]) == EXIT_OK
        assert (out / "autocorr_fit.json").exists()
        assert run_command(["plot", "--no-preview", "--out", str(out)]) == EXIT_OK
        assert (out / "plots" / "autocorr.dat").exists()

    def test_plot_without_results(self, out):
        assert run_command(["plot", "--out", str(out)]) == EXIT_ERROR


class TestUsage:
    def test_unknown_flag(self, out):
        assert run_command(["build", "--bogus"]) == EXIT_ERROR

    def test_no_command(self, out):
        assert run_command([]) == EXIT_ERROR

    def test_invalid_config_value(self, out):
        assert run_command(["build", "--grid-factor", "4", "--out", str(out)]) == EXIT_ERROR

    def test_list_runs(self, out, capsys):
        run_command(["build", "--k", "1", "--out", str(out)])
        capsys.readouterr()
        assert run_command(["--list-runs", "--runs-out", str(out)]) == EXIT_OK
        text = capsys.readouterr().out
        assert "build" in text
        assert "ok" in text

    def test_replay_missing(self, out):
        assert run_command(["--replay", "nope", "--runs-out", str(out)]) == EXIT_ERROR
