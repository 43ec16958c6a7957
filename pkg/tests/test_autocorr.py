"""Tests for littlewood_lab.autocorr: autocorrelation profiles and growth fits."""

from __future__ import annotations

import pytest

from littlewood_lab.autocorr import (
    UPPER_EXPONENT,
    autocorr_profile,
    autocorr_profiles,
    calibrate_constant,
    fit_power_law,
    growth_exponent,
)
from littlewood_lab.errors import DomainError


class TestAutocorrProfile:
    def test_k2(self):
        profile = autocorr_profile(2)
        assert profile.n == 4
        assert profile.max_abs == 1
        assert profile.argmax_j == 1
        assert profile.l2 == 2
        # R(0) = |P_2(1)|^2 = 4
        assert profile.sum_all == 4

    def test_row(self):
        assert autocorr_profile(3).row()[:2] == (3, 8)

    def test_k0_has_no_off_peak_terms(self):
        profile = autocorr_profile(0)
        assert profile.max_abs == 0
        assert profile.argmax_j == 0

    def test_threads_do_not_change_order(self):
        ks = [6, 3, 9, 4]
        assert autocorr_profiles(ks, threads=3) == autocorr_profiles(ks, threads=1)


class TestFitPowerLaw:
    def test_exact_fit(self):
        ns = [2**k for k in range(4, 10)]
        fit = fit_power_law(ns, [3.0 * n**0.75 for n in ns])
        assert fit.slope == pytest.approx(0.75, abs=1e-12)
        assert fit.half_width == pytest.approx(0.0, abs=1e-9)
        assert fit.points == 6

    def test_needs_distinct_abscissae(self):
        with pytest.raises(DomainError, match="two distinct"):
            fit_power_law([8, 8], [1, 2])

    def test_growth_exponent_needs_five(self):
        with pytest.raises(DomainError, match="at least 5"):
            growth_exponent(range(8, 11))


class TestCalibration:
    def test_constant_is_max_ratio(self):
        profiles = autocorr_profiles(range(4, 9))
        c = calibrate_constant(profiles)
        for p in profiles:
            assert p.max_abs <= c * p.n**UPPER_EXPONENT + 1e-9

    def test_requires_profiles(self):
        with pytest.raises(DomainError):
            calibrate_constant([autocorr_profile(0)])


@pytest.mark.slow
class TestGrowthAtScale:
    def test_exponent_window(self):
        fit = growth_exponent(range(8, 19))
        assert 0.70 <= fit.slope <= 0.85
