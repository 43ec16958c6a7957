"""Figure data: turn result CSVs into gnuplot ``.dat`` files and Pillow previews."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from pathlib import Path

from PIL import Image, ImageDraw, ImageFont

from littlewood_lab.autocorr import fit_power_law
from littlewood_lab.errors import DomainError
from littlewood_lab.report import read_csv

SCRIPT_NAME = "figures.gp"
PREVIEW_SIZE = (640, 400)
_MARGIN = 56
_LABEL_SIZE = 12


@dataclass(frozen=True)
class FigureData:
    """One figure: a two-column series plus the labels the plot script needs."""

    name: str
    title: str
    xlabel: str
    ylabel: str
    points: list[tuple[float, float]]
    comments: list[str] = field(default_factory=list)

    @property
    def filename(self) -> str:
        return f"{self.name}.dat"

    def dat_text(self) -> str:
        lines = [f"# {self.xlabel} {self.ylabel}", *(f"# {c}" for c in self.comments)]
        lines += [f"{x!r} {y!r}" for x, y in self.points]
        return "\n".join(lines) + "\n"


# ── Figure builders ──────────────────────────────────────────────────────


def _discrepancy_figures(rows: list[dict[str, str]]) -> list[FigureData]:
    figures = []
    for family, name in (("SAFFARI_CDF", "saffari"), ("MONTGOMERY_CELLS", "montgomery")):
        points = sorted((float(r["k"]), float(r["sup_dev"])) for r in rows if r["family"] == family)
        if points:
            figures.append(FigureData(name, f"{name} discrepancy", "k", "sup_dev", points))
    return figures


def _autocorr_figure(rows: list[dict[str, str]]) -> list[FigureData]:
    data = sorted((int(r["n"]), int(r["max_abs"])) for r in rows if int(r["max_abs"]) > 0)
    if not data:
        return []
    points = [(math.log(n), math.log(m)) for n, m in data]
    comments = []
    if len({n for n, _ in data}) >= 2:
        fit = fit_power_law([n for n, _ in data], [m for _, m in data])
        comments.append(f"slope={fit.slope!r} intercept={fit.intercept!r}")
    return [FigureData("autocorr", "max |a_j| against n", "log_n", "log_max_abs", points, comments)]


def _annulus_figure(rows: list[dict[str, str]]) -> list[FigureData]:
    points = sorted(
        (float(r["k"]), float(r["annulus_fraction"])) for r in rows if r.get("member", "P") == "P"
    )
    if not points:
        return []
    return [FigureData("annulus", "annulus zero fraction", "k", "annulus_fraction", points)]


def _fekete_figure(rows: list[dict[str, str]]) -> list[FigureData]:
    points = sorted((float(r["p"]), float(r["fraction"])) for r in rows)
    if not points:
        return []
    return [FigureData("fekete", "Fekete unimodular fraction", "p", "fraction", points)]


_SOURCES = (
    ("dist.csv", _discrepancy_figures),
    ("autocorr.csv", _autocorr_figure),
    ("zero_summary.csv", _annulus_figure),
    ("unimodular.csv", _fekete_figure),
)


def collect_figures(out_dir: str | Path) -> list[FigureData]:
    """Build every figure whose source CSV exists in *out_dir*."""
    out = Path(out_dir)
    figures: list[FigureData] = []
    for filename, builder in _SOURCES:
        path = out / filename
        if path.is_file():
            figures.extend(builder(read_csv(path)))
    return figures


# ── Writers ──────────────────────────────────────────────────────────────


def gnuplot_script(figures: list[FigureData]) -> str:
    """Plot script referencing only the emitted data files."""
    lines = ["set terminal pngcairo size 800,500", "set grid"]
    for fig in figures:
        lines += [
            f"set output '{fig.name}.png'",
            f"set title '{fig.title}'",
            f"set xlabel '{fig.xlabel}'",
            f"set ylabel '{fig.ylabel}'",
            f"plot '{fig.filename}' using 1:2 with linespoints title '{fig.name}'",
        ]
    return "\n".join(lines) + "\n"


def _load_font(size: int) -> ImageFont.ImageFont:
    try:
        return ImageFont.truetype("/System/Library/Fonts/Menlo.ttc", size)
    except (OSError, IOError):
        try:
            dejavu = "/usr/share/fonts/truetype/dejavu/DejaVuSansMono.ttf"
            return ImageFont.truetype(dejavu, size)
        except (OSError, IOError):
            return ImageFont.load_default()


def _span(values: list[float]) -> tuple[float, float]:
    lo, hi = min(values), max(values)
    if hi == lo:
        pad = abs(lo) * 0.05 or 1.0
        return lo - pad, hi + pad
    return lo, hi


def render_preview(fig: FigureData, path: str | Path) -> Path:
    """Draw a quick line plot of *fig* with Pillow and save it as PNG."""
    width, height = PREVIEW_SIZE
    img = Image.new("RGB", PREVIEW_SIZE, (255, 255, 255))
    draw = ImageDraw.Draw(img)
    font = _load_font(_LABEL_SIZE)

    x0, y0, x1, y1 = _MARGIN, _MARGIN // 2, width - _MARGIN // 2, height - _MARGIN
    draw.rectangle([x0, y0, x1, y1], outline=(0, 0, 0))

    xlo, xhi = _span([p[0] for p in fig.points])
    ylo, yhi = _span([p[1] for p in fig.points])

    def to_pixel(x: float, y: float) -> tuple[float, float]:
        px = x0 + (x - xlo) / (xhi - xlo) * (x1 - x0)
        py = y1 - (y - ylo) / (yhi - ylo) * (y1 - y0)
        return px, py

    pixels = [to_pixel(x, y) for x, y in fig.points]
    if len(pixels) > 1:
        draw.line(pixels, fill=(30, 90, 200), width=2)
    for px, py in pixels:
        draw.ellipse([px - 3, py - 3, px + 3, py + 3], fill=(200, 40, 40))

    draw.text((x0, 4), fig.title, fill=(0, 0, 0), font=font)
    draw.text((x1 - 80, y1 + 24), fig.xlabel, fill=(0, 0, 0), font=font)
    draw.text((4, y0), fig.ylabel, fill=(0, 0, 0), font=font)
    draw.text((x0, y1 + 6), f"{xlo:.4g}", fill=(80, 80, 80), font=font)
    draw.text((x1 - 40, y1 + 6), f"{xhi:.4g}", fill=(80, 80, 80), font=font)
    draw.text((4, y1 - 14), f"{ylo:.4g}", fill=(80, 80, 80), font=font)
    draw.text((4, y0 + 16), f"{yhi:.4g}", fill=(80, 80, 80), font=font)

    path = Path(path)
    img.save(path)
    return path.resolve()


def emit_plotdata(
    out_dir: str | Path, dest: str | Path | None = None, *, previews: bool = True
) -> list[Path]:
    """Write one ``.dat`` file per figure, ``figures.gp`` and optional PNG previews.

    Raises :class:`DomainError` when *out_dir* holds none of the source CSVs.
    """
    figures = collect_figures(out_dir)
    if not figures:
        raise DomainError(f"no plottable results in {out_dir}")
    target = Path(dest) if dest is not None else Path(out_dir) / "plots"
    target.mkdir(parents=True, exist_ok=True)

    written = []
    for fig in figures:
        p = target / fig.filename
        p.write_text(fig.dat_text(), encoding="utf-8")
        written.append(p.resolve())
        if previews:
            written.append(render_preview(fig, target / f"{fig.name}_preview.png"))
    script = target / SCRIPT_NAME
    script.write_text(gnuplot_script(figures), encoding="utf-8")
    written.append(script.resolve())
    return written
