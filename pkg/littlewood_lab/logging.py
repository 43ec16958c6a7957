"""Run logging: persist structured JSONL logs of CLI runs next to their results."""

from __future__ import annotations

import json
import os
from datetime import datetime, timezone
from pathlib import Path
from typing import Any, Sequence

_RUNS_SUBDIR = "runs"
_MAX_PREVIEW_LEN = 500


def get_run_dir(out: str | Path) -> Path:
    """Return ``<out>/runs``, creating it if needed."""
    d = Path(out) / _RUNS_SUBDIR
    d.mkdir(parents=True, exist_ok=True)
    return d


def get_run_path(run_id: str, out: str | Path) -> Path:
    return get_run_dir(out) / f"{run_id}.jsonl"


def _make_run_id() -> str:
    """Generate a human-readable run ID: YYYYMMDD_HHMMSS_8hexchars."""
    ts = datetime.now(timezone.utc).strftime("%Y%m%d_%H%M%S")
    return f"{ts}_{os.urandom(4).hex()}"


def _truncate(text: str, max_len: int = _MAX_PREVIEW_LEN) -> str:
    if len(text) <= max_len:
        return text
    return text[:max_len] + "..."


class RunLogger:
    """Writes structured JSONL events for a single CLI run."""

    def __init__(self, out: str | Path) -> None:
        self.run_id = _make_run_id()
        self.path = get_run_path(self.run_id, out)
        self._file = open(self.path, "a", encoding="utf-8")  # noqa: SIM115

    # -- public API -----------------------------------------------------------

    def log_start(self, command: str, argv: Sequence[str], config_hash: str) -> None:
        self._write(event="start", command=command, argv=list(argv), config_hash=config_hash)

    def log_audit(self, name: str, status: str, lhs: float, rhs: float, margin: float) -> None:
        self._write(event="audit", name=name, status=status, lhs=lhs, rhs=rhs, margin=margin)

    def log_artifact(self, path: str | Path, rows: int | None = None) -> None:
        self._write(event="artifact", path=str(path), rows=rows)

    def log_error(self, message: str) -> None:
        self._write(event="error", message=_truncate(message))

    def log_done(
        self, exit_code: int, elapsed_s: float, tallies: dict[str, int] | None = None
    ) -> None:
        fields: dict[str, Any] = {
            "event": "done",
            "exit_code": exit_code,
            "elapsed_s": round(elapsed_s, 2),
        }
        if tallies is not None:
            fields["tallies"] = dict(tallies)
        self._write(**fields)

    def close(self) -> None:
        if self._file and not self._file.closed:
            self._file.close()

    # -- internal -------------------------------------------------------------

    def _write(self, **fields: object) -> None:
        fields["timestamp"] = datetime.now(timezone.utc).isoformat()
        self._file.write(json.dumps(fields, default=_plain) + "\n")
        self._file.flush()

    def __enter__(self) -> "RunLogger":
        return self

    def __exit__(self, *exc: object) -> None:
        self.close()


def _plain(obj: object) -> object:
    if hasattr(obj, "item"):
        return obj.item()
    return str(obj)


class NullLogger:
    """Stand-in used with ``--no-log``; accepts every event and writes nothing."""

    run_id = None
    path = None

    def __getattr__(self, name: str) -> Any:
        if name.startswith("log_") or name == "close":
            return lambda *args, **kwargs: None
        raise AttributeError(name)

    def __enter__(self) -> "NullLogger":
        return self

    def __exit__(self, *exc: object) -> None:
        return None


# ── Utilities for listing / replaying runs ───────────────────────────────


def list_runs(out: str | Path) -> list[dict[str, object]]:
    """Return run summaries, newest first.

    Each entry has keys: id, command, status, elapsed_s, failures, path.
    """
    d = get_run_dir(out)
    runs: list[dict[str, object]] = []
    for p in sorted(d.glob("*.jsonl"), reverse=True):
        summary: dict[str, object] = {
            "id": p.stem,
            "command": "?",
            "status": "unknown",
            "elapsed_s": 0.0,
            "failures": 0,
            "path": str(p),
        }
        try:
            with open(p, encoding="utf-8") as f:
                for raw_line in f:
                    raw_line = raw_line.strip()
                    if not raw_line:
                        continue
                    evt = json.loads(raw_line)
                    kind = evt.get("event")
                    if kind == "start":
                        summary["command"] = evt.get("command", "?")
                    elif kind == "audit" and evt.get("status") == "fail":
                        summary["failures"] = int(summary["failures"]) + 1  # type: ignore[arg-type]
                    elif kind == "done":
                        summary["elapsed_s"] = evt.get("elapsed_s", 0.0)
                        code = evt.get("exit_code", 0)
                        summary["status"] = {0: "ok", 2: "audit-failed"}.get(code, "error")
        except (json.JSONDecodeError, OSError):
            pass
        if summary["status"] == "unknown":
            summary["status"] = "incomplete"
        runs.append(summary)
    return runs


def replay_run(run_id: str, out: str | Path) -> list[dict[str, object]]:
    """Read and return all events of a run log.

    Raises FileNotFoundError if the run does not exist.
    """
    p = get_run_path(run_id, out)
    events: list[dict[str, object]] = []
    with open(p, encoding="utf-8") as f:
        for raw_line in f:
            raw_line = raw_line.strip()
            if raw_line:
                events.append(json.loads(raw_line))
    return events
