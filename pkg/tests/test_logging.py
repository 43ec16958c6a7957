"""Tests for littlewood_lab.logging: JSONL run logs."""

from __future__ import annotations

import json

import pytest

from littlewood_lab.logging import (
    NullLogger,
    RunLogger,
    get_run_dir,
    get_run_path,
    list_runs,
    replay_run,
)


class TestGetRunDir:
    def test_creates_directory(self, tmp_path):
        d = get_run_dir(tmp_path / "results")
        assert d.is_dir()
        assert d.name == "runs"

    def test_run_path(self, tmp_path):
        p = get_run_path("20250101_120000_abcd1234", tmp_path)
        assert p.name == "20250101_120000_abcd1234.jsonl"
        assert p.parent == tmp_path / "runs"


class TestRunLogger:
    def test_writes_valid_jsonl(self, tmp_path):
        with RunLogger(tmp_path) as logger:
            logger.log_start("audit", ["audit", "--k", "3"], "abc")
            logger.log_audit("parallelogram", "pass", 1e-9, 1e-3, 1e-3)
            logger.log_artifact(tmp_path / "audits.csv", rows=1)
            logger.log_done(0, 1.234, {"pass": 1, "fail": 0, "inconclusive": 0})

        files = list((tmp_path / "runs").glob("*.jsonl"))
        assert len(files) == 1
        events = [json.loads(line) for line in files[0].read_text().splitlines()]
        assert [e["event"] for e in events] == ["start", "audit", "artifact", "done"]
        assert all("timestamp" in e for e in events)
        assert events[0]["config_hash"] == "abc"
        assert events[-1]["elapsed_s"] == 1.23
        assert events[-1]["tallies"]["pass"] == 1

    def test_run_id_format(self, tmp_path):
        with RunLogger(tmp_path) as logger:
            date, time_, suffix = logger.run_id.split("_")
        assert len(date) == 8 and len(time_) == 6 and len(suffix) == 8

    def test_error_is_truncated(self, tmp_path):
        with RunLogger(tmp_path) as logger:
            logger.log_error("x" * 2000)
        events = replay_run(logger.run_id, tmp_path)
        assert len(events[0]["message"]) < 600

    def test_numpy_values(self, tmp_path):
        np = pytest.importorskip("numpy")
        with RunLogger(tmp_path) as logger:
            logger.log_audit("m4", "pass", np.float64(0.5), np.float64(1.0), np.float64(0.5))
        assert replay_run(logger.run_id, tmp_path)[0]["lhs"] == 0.5


class TestNullLogger:
    def test_accepts_events(self):
        with NullLogger() as logger:
            logger.log_start("build", [], "h")
            logger.log_done(0, 0.1)
        assert logger.path is None

    def test_unknown_attribute(self):
        with pytest.raises(AttributeError):
            NullLogger().write


class TestListRuns:
    def _write(self, tmp_path, name, events):
        d = get_run_dir(tmp_path)
        (d / f"{name}.jsonl").write_text("\n".join(json.dumps(e) for e in events) + "\n")

    def test_statuses_newest_first(self, tmp_path):
        self._write(tmp_path, "20250101_000000_aaaaaaaa", [
            {"event": "start", "command": "build"},
            {"event": "done", "exit_code": 0, "elapsed_s": 1.0},
        ])
        self._write(tmp_path, "20250102_000000_bbbbbbbb", [
            {"event": "start", "command": "audit"},
            {"event": "audit", "status": "fail"},
            {"event": "done", "exit_code": 2, "elapsed_s": 3.0},
        ])
        self._write(tmp_path, "20250103_000000_cccccccc", [
            {"event": "start", "command": "zeros"},
        ])
        runs = list_runs(tmp_path)
        assert [r["status"] for r in runs] == ["incomplete", "audit-failed", "ok"]
        assert runs[1]["failures"] == 1
        assert runs[2]["command"] == "build"

    def test_empty(self, tmp_path):
        assert list_runs(tmp_path) == []


class TestReplayRun:
    def test_missing(self, tmp_path):
        with pytest.raises(FileNotFoundError):
            replay_run("nope", tmp_path)
