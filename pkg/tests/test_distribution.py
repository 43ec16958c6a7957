"""Tests for littlewood_lab.distribution: discrepancies and random ensembles."""

from __future__ import annotations

import math

import numpy as np
import pytest

from littlewood_lab.distribution import (
    ALPHA_POINTS,
    MAHLER_LIMIT,
    alpha_grid,
    empirical_cdf,
    ensemble_mean,
    ensemble_norm_mean,
    moment_limit,
    montgomery_discrepancy,
    norm_limit,
    saffari_discrepancy,
    sample_rng,
)
from littlewood_lab.errors import DomainError


class TestAlphaGrid:
    def test_shape(self):
        alphas = alpha_grid()
        assert alphas.size == ALPHA_POINTS
        assert alphas[0] == pytest.approx(1 / 1024)
        assert alphas[-1] == 1.0

    def test_empirical_cdf(self):
        power = np.array([0.1, 0.2, 0.2, 0.9])
        assert empirical_cdf(power, np.array([0.15, 0.2, 1.0])).tolist() == [0.25, 0.75, 1.0]


class TestSaffari:
    def test_k1_matches_arcsine_law(self):
        alphas = alpha_grid()
        expected = float(np.max(np.abs(2 / np.pi * np.arcsin(np.sqrt(alphas)) - alphas)))
        report = saffari_discrepancy(1, 1 << 14)
        assert report.sup_dev == pytest.approx(expected, abs=1e-3)
        assert report.family == "SAFFARI_CDF"

    def test_detail(self):
        report = saffari_discrepancy(6)
        assert report.sup_dev == max(report.detail["sup_dev_p"], report.detail["sup_dev_q"])
        assert report.detail["grid_error"] == pytest.approx(1 / 1024)
        assert report.row() == (6, report.n_grid, "SAFFARI_CDF", report.sup_dev)

    def test_rejects_coarse_grid(self):
        with pytest.raises(DomainError):
            saffari_discrepancy(6, 512)

    @pytest.mark.slow
    def test_shrinks_with_k(self):
        assert saffari_discrepancy(18).sup_dev < saffari_discrepancy(10).sup_dev


class TestMontgomery:
    def test_radial_marginal_ends_at_one(self):
        report = montgomery_discrepancy(8, cells=(8, 4))
        assert report.detail["radial_cdf_p"][-1] == pytest.approx(1.0)
        assert len(report.detail["radial_cdf_q"]) == 4
        assert report.family == "MONTGOMERY_CELLS"

    def test_radial_marginal_matches_saffari(self):
        k, radial = 8, 4
        cells = montgomery_discrepancy(k, cells=(1, radial)).detail["radial_cdf_p"]
        saffari = saffari_discrepancy(k)
        # ring i holds |w|^2 in [i/M_r, (i+1)/M_r)
        assert len(cells) == radial
        assert max(abs(c - (i + 1) / radial) for i, c in enumerate(cells)) <= (
            saffari.detail["sup_dev_p"] + 1e-12
        )

    def test_rejects_too_many_cells(self):
        with pytest.raises(DomainError, match="exceeds"):
            montgomery_discrepancy(4, cells=(65, 2))


class TestLimits:
    def test_moment_limits(self):
        assert moment_limit(2) == pytest.approx(1.0)
        assert moment_limit(4) == pytest.approx(2.0)
        assert moment_limit(0) == MAHLER_LIMIT
        assert MAHLER_LIMIT == pytest.approx(0.749306, abs=1e-6)

    def test_norm_limit(self):
        assert norm_limit(4) == pytest.approx(2.0**0.25)
        assert norm_limit(2) == pytest.approx(1.0)


class TestEnsemble:
    def test_rng_is_reproducible(self):
        a = sample_rng(11, 5).integers(0, 2, size=16)
        b = sample_rng(11, 5).integers(0, 2, size=16)
        c = sample_rng(11, 6).integers(0, 2, size=16)
        assert a.tolist() == b.tolist()
        assert a.tolist() != c.tolist()

    def test_parseval_mean_is_one(self):
        est = ensemble_mean(16, 2.0, 100, seed=1)
        assert est.mean == pytest.approx(1.0, abs=1e-12)
        assert est.limit == 1.0

    def test_threads_do_not_change_result(self):
        one = ensemble_mean(16, 4.0, 100, seed=3, threads=1)
        many = ensemble_mean(16, 4.0, 100, seed=3, threads=4)
        assert one == many

    def test_norm_mean_limit(self):
        est = ensemble_norm_mean(16, 4.0, 100, seed=2)
        assert est.limit == pytest.approx(2.0**0.25)
        assert est.row()[0] == 16

    def test_z_score(self):
        est = ensemble_mean(16, 4.0, 100, seed=4)
        assert est.z_score == pytest.approx(abs(est.mean - 2.0) / est.std_err)

    def test_rejects_small_sample(self):
        with pytest.raises(DomainError, match="at least 100"):
            ensemble_mean(16, 4.0, 99, seed=1)

    def test_rejects_negative_exponent(self):
        with pytest.raises(DomainError):
            ensemble_mean(16, -1.0, 100, seed=1)

    @pytest.mark.slow
    def test_fourth_moment_and_mahler(self):
        q4 = ensemble_mean(64, 4.0, 2000, seed=20240229)
        assert abs(q4.mean - 2.0) <= 3 * q4.std_err
        m0 = ensemble_mean(64, 0.0, 2000, seed=20240229)
        assert math.isclose(m0.mean, MAHLER_LIMIT, abs_tol=0.03)
