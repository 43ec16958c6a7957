"""Tests for littlewood_lab.plotdata: gnuplot data files and Pillow previews."""

from __future__ import annotations

import math

import pytest
from PIL import Image

from littlewood_lab.errors import DomainError
from littlewood_lab.plotdata import (
    SCRIPT_NAME,
    FigureData,
    collect_figures,
    emit_plotdata,
    gnuplot_script,
)
from littlewood_lab.report import write_csv


@pytest.fixture
def results(tmp_path):
    write_csv(tmp_path / "dist.csv", ("k", "N", "family", "sup_dev"), [
        (2, 64, "SAFFARI_CDF", 0.2),
        (3, 128, "SAFFARI_CDF", 0.15),
        (2, 64, "MONTGOMERY_CELLS", 0.3),
    ], "h")
    write_csv(tmp_path / "autocorr.csv", ("k", "n", "max_abs", "argmax_j", "l2"), [
        (0, 1, 0, 0, 0),
        (2, 4, 1, 1, 2),
        (3, 8, 3, 1, 4),
        (4, 16, 4, 3, 8),
    ], "h")
    return tmp_path


class TestFigureData:
    def test_dat_text(self):
        fig = FigureData("x", "title", "k", "v", [(1.0, 0.5)], ["note"])
        assert fig.filename == "x.dat"
        assert fig.dat_text() == "# k v\n# note\n1.0 0.5\n"


class TestCollectFigures:
    def test_figures_from_present_csvs(self, results):
        names = [f.name for f in collect_figures(results)]
        assert names == ["saffari", "montgomery", "autocorr"]

    def test_autocorr_skips_zero_maximum(self, results):
        fig = next(f for f in collect_figures(results) if f.name == "autocorr")
        assert fig.points[0] == (math.log(4), math.log(1))
        assert len(fig.points) == 3
        assert fig.comments[0].startswith("slope=")


class TestEmitPlotdata:
    def test_writes_files(self, results):
        written = emit_plotdata(results)
        names = sorted(p.name for p in written)
        assert SCRIPT_NAME in names
        assert "saffari.dat" in names
        assert "autocorr_preview.png" in names
        assert all(p.parent == (results / "plots").resolve() for p in written)

    def test_slope_comment(self, results):
        emit_plotdata(results, previews=False)
        text = (results / "plots" / "autocorr.dat").read_text()
        assert "# slope=" in text

    def test_preview_is_png(self, results, tmp_path):
        emit_plotdata(results, tmp_path / "figs")
        with Image.open(tmp_path / "figs" / "saffari_preview.png") as img:
            assert img.format == "PNG"
            assert img.size == (640, 400)

    def test_no_previews(self, results):
        written = emit_plotdata(results, previews=False)
        assert not any(p.suffix == ".png" for p in written)

    def test_empty_directory(self, tmp_path):
        with pytest.raises(DomainError, match="no plottable"):
            emit_plotdata(tmp_path)


class TestGnuplotScript:
    def test_references_only_dat_files(self, results):
        figures = collect_figures(results)
        script = gnuplot_script(figures)
        plotted = [line.split("'")[1] for line in script.splitlines() if line.startswith("plot")]
        assert plotted == [f.filename for f in figures]
