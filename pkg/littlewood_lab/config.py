"""Run configuration: find, parse and hash ``.littlewood-lab.conf`` files."""

from __future__ import annotations

import dataclasses
import hashlib
import json
from dataclasses import dataclass
from importlib import resources
from pathlib import Path
from typing import Any

from littlewood_lab.errors import ConfigError

_CONFIG_FILENAME = ".littlewood-lab.conf"
_MAX_FILE_SIZE = 64 * 1024  # 64 KB
_CALIBRATION_RESOURCE = "calibration.json"


@dataclass(frozen=True)
class RunConfig:
    """Everything that determines a run's numbers; hashed into every output file."""

    k_range: tuple[int, int] = (1, 12)
    primes: tuple[int, ...] = (1009, 2003, 3001, 4001, 5003)
    grid_factor: int = 16
    delta_circle: float = 1e-8
    root_tol: float = 1e-10
    quadrature_tol: float = 1e-10
    calibration: str | None = None
    seed: int = 20240229
    threads: int = 1
    out: str = "results"
    k_max: int = 22
    root_degree_cap: int = 1 << 14
    etas: tuple[float, ...] = (0.1, 0.2, 0.29)
    alphas: tuple[float, ...] = (0.1, 0.25, 0.5)
    c1: float = 2.0
    samples: int = 2000
    ensemble_n: int = 64

    def ks(self, lo: int | None = None, hi: int | None = None) -> list[int]:
        """Generations of ``k_range`` clipped to ``[lo, hi]``."""
        start = self.k_range[0] if lo is None else max(lo, self.k_range[0])
        stop = self.k_range[1] if hi is None else min(hi, self.k_range[1])
        return list(range(start, stop + 1))

    def grid_for(self, length: int) -> int:
        """Power-of-two grid of at least ``grid_factor * length`` points."""
        return 1 << max(0, int(self.grid_factor * length - 1).bit_length())

    def replace(self, **changes: Any) -> "RunConfig":
        cfg = dataclasses.replace(self, **{k: v for k, v in changes.items() if v is not None})
        cfg.validate()
        return cfg

    def validate(self) -> None:
        lo, hi = self.k_range
        if lo < 0 or lo > hi:
            raise ConfigError(f"k_range must satisfy 0 <= lo <= hi, got {lo}..{hi}")
        if hi > self.k_max:
            raise ConfigError(f"k_range upper end {hi} exceeds k_max={self.k_max}")
        for name in ("delta_circle", "root_tol", "quadrature_tol", "c1"):
            if getattr(self, name) <= 0:
                raise ConfigError(f"{name} must be positive")
        if self.grid_factor < 16:
            raise ConfigError(f"grid_factor must be >= 16, got {self.grid_factor}")
        if self.threads < 1:
            raise ConfigError("threads must be >= 1")
        if self.samples < 100:
            raise ConfigError(f"samples must be >= 100, got {self.samples}")
        if any(not 0 < e < 2 for e in self.etas):
            raise ConfigError("every eta must lie in (0, 2)")
        if any(not 0 < a <= 1 for a in self.alphas):
            raise ConfigError("every alpha must lie in (0, 1]")

    def to_dict(self) -> dict[str, Any]:
        return dataclasses.asdict(self)


# ── Parsing ──────────────────────────────────────────────────────────────


def parse_k_range(text: str) -> tuple[int, int]:
    """Parse ``"a..b"`` or a single ``"k"`` into an inclusive range."""
    text = text.strip()
    try:
        if ".." in text:
            lo, hi = text.split("..", 1)
            return int(lo), int(hi)
        k = int(text)
    except ValueError:
        raise ConfigError(f"invalid k range: {text!r}") from None
    return k, k


def _parse_list(text: str, kind: type) -> tuple[Any, ...]:
    try:
        return tuple(kind(item) for item in text.split(",") if item.strip())
    except ValueError:
        raise ConfigError(f"invalid {kind.__name__} list: {text!r}") from None


def _coerce(name: str, raw: str) -> Any:
    field = {f.name: f for f in dataclasses.fields(RunConfig)}[name]
    kind = str(field.type)
    if name == "k_range":
        return parse_k_range(raw)
    if "tuple[int" in kind:
        return _parse_list(raw, int)
    if "tuple[float" in kind:
        return _parse_list(raw, float)
    if kind.startswith("str"):
        return raw
    try:
        return int(raw) if kind == "int" else float(raw)
    except ValueError:
        raise ConfigError(f"invalid value for {name}: {raw!r}") from None


def parse_config_text(text: str) -> dict[str, Any]:
    """Parse flat ``key = value`` lines; ``#`` starts a comment, unknown keys are rejected."""
    known = {f.name for f in dataclasses.fields(RunConfig)}
    values: dict[str, Any] = {}
    for lineno, raw_line in enumerate(text.splitlines(), start=1):
        line = raw_line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected 'key = value', got {raw_line.strip()!r}")
        key, value = (part.strip() for part in line.split("=", 1))
        key = key.replace("-", "_")
        if key not in known:
            raise ConfigError(f"line {lineno}: unknown key {key!r}")
        values[key] = _coerce(key, value)
    return values


def find_config_file(start_dir: str | Path | None = None) -> Path | None:
    """Walk from *start_dir* (default CWD) up to $HOME looking for .littlewood-lab.conf.

    Returns the path to the first match, or ``None`` if not found.
    """
    current = (Path(start_dir) if start_dir else Path.cwd()).resolve()
    home = Path.home().resolve()

    while True:
        candidate = current / _CONFIG_FILENAME
        if candidate.is_file():
            return candidate
        if current == home:
            break
        parent = current.parent
        if parent == current:
            break
        current = parent
    return None


def load_config(path: str | Path | None = None, base: RunConfig | None = None) -> RunConfig:
    """Read a config file on top of *base* (default: built-in defaults).

    Raises
    ------
    ConfigError
        If the file is missing, too large, or contains invalid entries.
    """
    base = base or RunConfig()
    if path is None:
        return base
    p = Path(path)
    try:
        size = p.stat().st_size
    except OSError as exc:
        raise ConfigError(f"cannot read config file {p}: {exc}") from exc
    if size > _MAX_FILE_SIZE:
        raise ConfigError(f"Config file is too large ({size:,} bytes, max {_MAX_FILE_SIZE:,}): {p}")
    try:
        text = p.read_text(encoding="utf-8")
    except (OSError, UnicodeDecodeError) as exc:
        raise ConfigError(f"cannot read config file {p}: {exc}") from exc
    cfg = dataclasses.replace(base, **parse_config_text(text))
    cfg.validate()
    return cfg


def config_hash(config: RunConfig) -> str:
    """First 12 hex digits of SHA-256 over the sorted ``key=value`` dump."""
    lines = [f"{key}={value!r}" for key, value in sorted(config.to_dict().items())]
    return hashlib.sha256("\n".join(lines).encode("utf-8")).hexdigest()[:12]


# ── Calibration constants ────────────────────────────────────────────────


@dataclass(frozen=True)
class Calibration:
    """Frozen inputs plus empirical constants (``None`` until a pilot run fills them)."""

    c1: float = 2.0
    delta_circle: float = 1e-8
    nearest_zero_c: float = 0.0233079
    c2: float | None = None
    autocorr_constant: float | None = None
    saffari_threshold_k18: float | None = None
    c4: float | None = None

    def to_dict(self) -> dict[str, Any]:
        return dataclasses.asdict(self)


def load_calibration(path: str | Path | None = None) -> Calibration:
    """Load the calibration file, defaulting to the copy shipped with the package."""
    try:
        if path is None:
            text = resources.files("littlewood_lab").joinpath(_CALIBRATION_RESOURCE).read_text(
                encoding="utf-8"
            )
        else:
            text = Path(path).read_text(encoding="utf-8")
        data = json.loads(text)
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigError(f"cannot load calibration file: {exc}") from exc
    known = {f.name for f in dataclasses.fields(Calibration)}
    unknown = set(data) - known - {"schema_version", "config_hash"}
    if unknown:
        raise ConfigError(f"unknown calibration keys: {sorted(unknown)}")
    return Calibration(**{k: v for k, v in data.items() if k in known})


def save_calibration(path: str | Path, calibration: Calibration) -> Path:
    p = Path(path)
    p.parent.mkdir(parents=True, exist_ok=True)
    p.write_text(json.dumps(calibration.to_dict(), indent=2, sort_keys=True) + "\n",
                 encoding="utf-8")
    return p
