"""Audit reports and result persistence (CSV and JSON)."""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Iterable, Literal, Sequence

SCHEMA_VERSION = 1
AUDIT_COLUMNS = ("name", "k", "params", "lhs", "rhs", "margin", "status", "anchor")

Status = Literal["pass", "fail", "inconclusive"]


def _status_from_margin(margin: float) -> Status:
    if margin is None or math.isnan(margin):
        return "inconclusive"
    return "pass" if margin >= 0 else "fail"


@dataclass(frozen=True)
class AuditReport:
    """Outcome of one audit: ``margin = rhs - lhs`` and pass iff ``margin >= 0``.

    Upper-bound claims put the measured value in ``lhs``; lower-bound
    claims put the bound in ``lhs`` and the measurement in ``rhs``.
    """

    name: str
    anchor: str
    params: dict[str, Any]
    lhs: float
    rhs: float
    margin: float
    status: Status
    detail: dict[str, Any] = field(default_factory=dict)

    @classmethod
    def compare(
        cls,
        name: str,
        anchor: str,
        params: dict[str, Any],
        lhs: float,
        rhs: float,
        detail: dict[str, Any] | None = None,
    ) -> "AuditReport":
        margin = float(rhs) - float(lhs)
        return cls(name, anchor, dict(params), float(lhs), float(rhs), margin,
                   _status_from_margin(margin), dict(detail or {}))

    @classmethod
    def upper(cls, name: str, anchor: str, params: dict[str, Any], value: float, bound: float,
              detail: dict[str, Any] | None = None) -> "AuditReport":
        """Claim ``value <= bound``."""
        return cls.compare(name, anchor, params, value, bound, detail)

    @classmethod
    def lower(cls, name: str, anchor: str, params: dict[str, Any], value: float, bound: float,
              detail: dict[str, Any] | None = None) -> "AuditReport":
        """Claim ``value >= bound``."""
        return cls.compare(name, anchor, params, bound, value, detail)

    @classmethod
    def within(cls, name: str, anchor: str, params: dict[str, Any], value: float, lo: float,
               hi: float, detail: dict[str, Any] | None = None) -> "AuditReport":
        """Claim ``lo <= value <= hi``: lhs is the distance from the centre, rhs the half-width."""
        info = {"value": value, "interval": [lo, hi], **(detail or {})}
        centre, half = 0.5 * (lo + hi), 0.5 * (hi - lo)
        return cls.compare(name, anchor, params, abs(value - centre), half, info)

    @classmethod
    def inconclusive(cls, name: str, anchor: str, params: dict[str, Any], reason: str,
                     detail: dict[str, Any] | None = None) -> "AuditReport":
        info = dict(detail or {})
        info["reason"] = reason
        nan = float("nan")
        return cls(name, anchor, dict(params), nan, nan, nan, "inconclusive", info)

    @property
    def passed(self) -> bool:
        return self.status == "pass"

    def row(self) -> tuple[Any, ...]:
        return (
            self.name,
            self.params.get("k", ""),
            json.dumps(self.params, sort_keys=True, default=_jsonable),
            self.lhs,
            self.rhs,
            self.margin,
            self.status,
            self.anchor,
        )

    def to_dict(self) -> dict[str, Any]:
        return {
            "name": self.name,
            "anchor": self.anchor,
            "params": self.params,
            "lhs": _finite_or_none(self.lhs),
            "rhs": _finite_or_none(self.rhs),
            "margin": _finite_or_none(self.margin),
            "status": self.status,
            "detail": self.detail,
        }


def _finite_or_none(x: float) -> float | None:
    return None if x is None or math.isnan(x) else x


def _jsonable(obj: object) -> object:
    """``json.dumps`` fallback for numpy scalars, tuples of numpy values, etc."""
    for attr in ("item", "tolist"):
        if hasattr(obj, attr):
            return getattr(obj, attr)()
    return str(obj)


def _finite_tree(obj: Any) -> Any:
    """Replace NaN and infinities by ``None`` throughout nested containers."""
    if isinstance(obj, dict):
        return {k: _finite_tree(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_finite_tree(v) for v in obj]
    if hasattr(obj, "tolist"):
        return _finite_tree(obj.tolist())
    if isinstance(obj, float) and not math.isfinite(obj):
        return None
    return obj


def tally(reports: Iterable[AuditReport]) -> dict[str, int]:
    counts = {"pass": 0, "fail": 0, "inconclusive": 0}
    for r in reports:
        counts[r.status] += 1
    return counts


# ---------------------------------------------------------------------------
# Writers
# ---------------------------------------------------------------------------


def _format_cell(value: Any) -> str:
    if isinstance(value, float):
        if math.isnan(value):
            return ""
        return repr(value)
    if hasattr(value, "item"):
        return _format_cell(value.item())
    return str(value)


def csv_text(columns: Sequence[str], rows: Iterable[Sequence[Any]], config_hash: str) -> str:
    """Render RFC-4180 CSV with a mandatory header and a ``config_hash`` column."""
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\r\n")
    writer.writerow([*columns, "config_hash"])
    for row in rows:
        writer.writerow([*(_format_cell(v) for v in row), config_hash])
    return buf.getvalue()


def write_csv(
    path: str | Path, columns: Sequence[str], rows: Iterable[Sequence[Any]], config_hash: str
) -> Path:
    """Write a CSV file (UTF-8, '.' decimal separator) and return its resolved path."""
    p = Path(path)
    p.parent.mkdir(parents=True, exist_ok=True)
    p.write_text(csv_text(columns, rows, config_hash), encoding="utf-8", newline="")
    return p.resolve()


def read_csv(path: str | Path) -> list[dict[str, str]]:
    with open(path, encoding="utf-8", newline="") as f:
        return list(csv.DictReader(f))


def write_json(path: str | Path, payload: dict[str, Any], config_hash: str) -> Path:
    """Write one top-level JSON object carrying ``schema_version`` and ``config_hash``."""
    p = Path(path)
    p.parent.mkdir(parents=True, exist_ok=True)
    body = _finite_tree({"schema_version": SCHEMA_VERSION, "config_hash": config_hash, **payload})
    p.write_text(
        json.dumps(body, indent=2, sort_keys=True, default=_jsonable, allow_nan=False) + "\n",
        encoding="utf-8",
    )
    return p.resolve()


def write_audits(path: str | Path, reports: Sequence[AuditReport], config_hash: str) -> Path:
    return write_csv(path, AUDIT_COLUMNS, (r.row() for r in reports), config_hash)


def bundle(reports: Sequence[AuditReport]) -> dict[str, Any]:
    """JSON payload bundling every audit with its status and the overall tallies."""
    return {
        "audits": [r.to_dict() for r in reports],
        "summary": tally(reports),
    }
