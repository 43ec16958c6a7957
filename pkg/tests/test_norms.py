"""Tests for littlewood_lab.norms: M_q norms and Mahler measure."""

from __future__ import annotations

import math

import pytest

from littlewood_lab.errors import CapacityError, DomainError
from littlewood_lab.norms import (
    INFINITY,
    M4_K_MAX,
    MAHLER_MIN_GRID,
    m4_fourth_power_exact,
    m4_fourth_power_quadrature,
    m4_ratio,
    mahler_jensen,
    mahler_quadrature,
    mq_norm,
    saffari_mq_ratio,
)
from littlewood_lab.poly_core import SignedPoly, fekete, rudin_shapiro
from littlewood_lab.zeros import find_roots

GOLDEN = (1 + math.sqrt(5)) / 2


class TestMqNorm:
    @pytest.mark.parametrize("k", [0, 3, 8, 12])
    def test_parseval(self, k):
        result = mq_norm(rudin_shapiro(k).p, 2.0)
        assert result.value == pytest.approx(2.0 ** (k / 2), rel=1e-12)
        assert result.route == "exact-parseval"

    def test_sup_norm(self):
        result = mq_norm(SignedPoly.from_coeffs([1, 1]), INFINITY)
        assert result.value == pytest.approx(2.0, rel=1e-12)

    def test_sup_norm_of_rudin_shapiro_bounded(self):
        k = 8
        value = mq_norm(rudin_shapiro(k).p, INFINITY, estimate_error=False).value
        assert 2.0 ** (k / 2) < value <= math.sqrt(2.0 ** (k + 1)) + 1e-9

    def test_doubling_delta_reported(self):
        result = mq_norm(rudin_shapiro(5).p, 4.0)
        assert result.doubling_delta is not None
        assert result.doubling_delta < 1e-12

    def test_rejects_non_positive_exponent(self):
        with pytest.raises(DomainError, match="positive"):
            mq_norm(rudin_shapiro(3).p, 0.0)

    def test_rejects_coarse_grid(self):
        with pytest.raises(DomainError, match="below"):
            mq_norm(rudin_shapiro(5).p, 2.0, n_grid=64)


class TestMahler:
    def test_quadrature_without_unimodular_zeros(self):
        f = SignedPoly.from_coeffs([1, 1, -1])
        assert mahler_quadrature(f, 1024).value == pytest.approx(GOLDEN, rel=1e-10)

    def test_boundary_zero_on_coarse_grid(self):
        f = SignedPoly.from_coeffs([1, 1])
        assert mahler_quadrature(f, 16).value == pytest.approx(2.0 ** (1 / 16))

    def test_default_grid_for_short_input(self):
        result = mahler_quadrature(SignedPoly.from_coeffs([1, 1]))
        assert result.n_grid == MAHLER_MIN_GRID
        assert result.value == pytest.approx(1.0, abs=2e-5)

    def test_fekete_5(self):
        f = fekete(5).poly
        assert f.coeffs.tolist()[1:] == [1, -1, -1, 1]
        result = mahler_quadrature(f)
        assert result.value == pytest.approx(2.0 ** (3 / MAHLER_MIN_GRID), rel=1e-9)
        assert result.value == pytest.approx(1.0, abs=1e-4)

    def test_jensen(self):
        f = SignedPoly.from_coeffs([1, 1, -1])
        assert mahler_jensen(find_roots(f), f.leading).value == pytest.approx(GOLDEN, rel=1e-10)

    def test_jensen_rejects_incomplete_set(self):
        f = SignedPoly.from_coeffs([1, 1, -1])
        roots = find_roots(f)
        partial = type(roots)(roots.roots[:1], roots.residuals[:1], roots.degree, True, roots.tol)
        with pytest.raises(DomainError, match="incomplete"):
            mahler_jensen(partial, f.leading)

    def test_routes_agree_on_rudin_shapiro(self):
        f = rudin_shapiro(6).p
        jensen = mahler_jensen(find_roots(f), f.leading).value
        quad = mahler_quadrature(f, 1 << 18, estimate_error=False).value
        assert quad == pytest.approx(jensen, rel=1e-5)


class TestFourthMoment:
    @pytest.mark.parametrize("k", range(0, 11))
    def test_closed_form(self, k):
        assert m4_fourth_power_exact(rudin_shapiro(k).p) == (4 ** (k + 1) - (-2) ** k) // 3

    @pytest.mark.parametrize("k", range(1, 7))
    def test_quadrature_reproduces_integer(self, k):
        f = rudin_shapiro(k).p
        assert round(m4_fourth_power_quadrature(f)) == m4_fourth_power_exact(f)

    def test_ratio_converges(self):
        for k in range(2, 19):
            assert abs(m4_ratio(k) - 1.0) <= 2.0 ** (1 - k)

    def test_ratio_capacity(self):
        with pytest.raises(CapacityError):
            m4_ratio(M4_K_MAX + 1)


class TestSaffariMoments:
    def test_mirror_identity(self):
        rp, rq = saffari_mq_ratio(8, 4.0)
        assert rp == pytest.approx(rq, rel=1e-9)

    def test_fourth_moment_limit(self):
        rp, _ = saffari_mq_ratio(10, 4.0)
        assert rp == pytest.approx(1.0, abs=1e-3)
