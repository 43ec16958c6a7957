"""Tests for littlewood_lab.zeros: roots, unimodular counts and level crossings."""

from __future__ import annotations

import math

import numpy as np
import pytest

from littlewood_lab.errors import CapacityError, DomainError
from littlewood_lab.eval_engine import modulus_squared
from littlewood_lab.poly_core import SignedPoly, fekete, rudin_shapiro
from littlewood_lab.zeros import (
    GAMMA,
    RootSet,
    argument_principle_count,
    arc_diagnostics,
    bernstein_audit,
    classify,
    classify_sensitivity,
    crossing_upper_constant,
    disk_zero_statistics,
    find_roots,
    implied_nearest_zero_constant,
    level_crossings,
    level_crossings_near_n,
    nearest_zero_audit,
    realpart_zero_count,
    realpart_zero_locations,
    root_labels,
    root_of_unity_floor,
    rudin_shapiro_roots,
    sublevel_measure,
    unimodular_count_reciprocal,
    zero_density_audit,
)


def _poly(*coeffs: int) -> SignedPoly:
    return SignedPoly.from_coeffs(list(coeffs))


class TestFindRoots:
    def test_linear(self):
        roots = find_roots(_poly(1, 1))
        assert roots.converged
        assert roots.roots[0] == pytest.approx(-1.0, abs=1e-12)
        assert roots.max_residual() <= roots.tol

    def test_fekete_5_has_double_root(self):
        roots = find_roots(fekete(5).poly)
        assert roots.degree == 4
        assert len(roots.roots) == 4
        found = sorted(roots.roots.real)
        assert found == pytest.approx([-1.0, 0.0, 1.0, 1.0], abs=1e-5)
        assert np.max(np.abs(roots.roots.imag)) < 1e-5

    def test_golden_polynomial(self):
        roots = find_roots(_poly(1, 1, -1))
        golden = (1 + math.sqrt(5)) / 2
        assert sorted(roots.roots.real) == pytest.approx([1 - golden, golden], abs=1e-12)
        assert roots.count_inside(1.0) == 1

    def test_rudin_shapiro_degree(self):
        roots = rudin_shapiro_roots(6, "P")
        assert roots.converged
        assert len(roots.roots) == 63
        assert roots.max_residual() <= roots.tol

    def test_seed_does_not_change_roots(self):
        f = rudin_shapiro(5).q
        a = np.sort_complex(find_roots(f, seed=0).roots)
        b = np.sort_complex(find_roots(f, seed=7).roots)
        assert np.max(np.abs(a - b)) < 1e-8

    def test_capacity(self):
        with pytest.raises(CapacityError, match="cap"):
            find_roots(rudin_shapiro(6).p, degree_cap=32)

    def test_rejects_non_positive_tol(self):
        with pytest.raises(DomainError):
            find_roots(_poly(1, 1), tol=0.0)


class TestClassify:
    def test_unimodular_root(self):
        cls = classify(find_roots(_poly(1, 1)), n=2)
        assert cls.on_circle == 1
        assert cls.real_zeros == 1
        assert cls.inside == cls.outside == 0

    def test_counts_partition_roots(self):
        k = 7
        cls = classify(rudin_shapiro_roots(k, "P"), 1 << k)
        assert cls.on_circle + cls.inside + cls.outside == cls.degree
        assert 0 <= cls.annulus_fraction <= 1

    @pytest.mark.parametrize("k", range(1, 8))
    def test_one_real_zero(self, k):
        for which in ("P", "Q"):
            assert classify(rudin_shapiro_roots(k, which), 1 << k).real_zeros == 1

    def test_rejects_unconverged(self):
        roots = RootSet(np.array([-1 + 0j]), np.array([0.0]), 1, False, 1e-10)
        with pytest.raises(DomainError, match="converged"):
            classify(roots, 2)

    def test_rejects_bad_parameters(self):
        with pytest.raises(DomainError):
            classify(find_roots(_poly(1, 1)), 2, delta_circle=0.0)

    def test_sensitivity_keys(self):
        sens = classify_sensitivity(rudin_shapiro_roots(5, "P"), 32)
        assert set(sens) == {0.1, 1.0, 10.0}
        assert sens[0.1].on_circle <= sens[1.0].on_circle <= sens[10.0].on_circle

    def test_labels(self):
        roots = find_roots(_poly(1, 1, -1))
        labels = root_labels(roots, 2, 1e-8, 0.5)
        assert sorted(labels) == ["inside", "outside"]


class TestArgumentPrinciple:
    def test_golden_polynomial(self):
        f = _poly(1, 1, -1)
        assert argument_principle_count(f, 0.5) == 0
        assert argument_principle_count(f, 0.9) == 1
        assert argument_principle_count(f, 1.1) == 1
        assert argument_principle_count(f, 2.0) == 2

    def test_zero_at_origin(self):
        assert argument_principle_count(fekete(5).poly, 0.5) == 1

    def test_agrees_with_root_finder(self):
        k = 7
        f = rudin_shapiro(k).p
        roots = rudin_shapiro_roots(k, "P")
        for rho in (0.9, 1.1):
            assert argument_principle_count(f, rho) == roots.count_inside(rho)

    def test_rejects_non_positive_radius(self):
        with pytest.raises(DomainError):
            argument_principle_count(_poly(1, 1), 0.0)


class TestUnimodularCount:
    def test_fekete_5(self):
        result = unimodular_count_reciprocal(fekete(5))
        assert result.count == 1
        assert result.fraction == pytest.approx(0.25)

    def test_locations_are_zeros(self):
        fp = fekete(13)
        result = unimodular_count_reciprocal(fp)
        c = fp.poly.as_float()
        for t in result.locations:
            value = np.polyval(c[::-1], np.exp(1j * t))
            assert abs(value) < 1e-8

    def test_rejects_coarse_grid(self):
        with pytest.raises(DomainError, match="4p"):
            unimodular_count_reciprocal(fekete(101), n_grid=256)

    @pytest.mark.slow
    def test_fraction_near_half(self):
        for p in (1009, 2003):
            result = unimodular_count_reciprocal(fekete(p), refine=False, detect_tangency=False)
            assert 0.49 <= result.fraction <= 0.52


class TestLevelCrossings:
    def test_two_term_example(self):
        R = modulus_squared(_poly(1, 1))
        report = level_crossings(R, 0.5, 2)
        assert report.transversal == 2
        assert report.tangent == 0
        assert sorted(report.locations) == pytest.approx([2 * np.pi / 3, 4 * np.pi / 3],
                                                         abs=1e-9)

    def test_level_n_example(self):
        report = level_crossings(modulus_squared(_poly(1, 1)), 1.0, 2)
        assert report.tangent == 0
        assert sorted(report.locations) == pytest.approx([np.pi / 2, 3 * np.pi / 2], abs=1e-9)

    def test_rejects_level_outside_range(self):
        R = modulus_squared(_poly(1, 1))
        for eta in (0.0, 2.0):
            with pytest.raises(DomainError, match="level factor"):
                level_crossings(R, eta, 2)

    def test_cap_respected(self):
        k = 8
        pair = rudin_shapiro(k)
        report = level_crossings(modulus_squared(pair.p), 0.29, pair.n)
        assert report.with_multiplicity <= 2 * (pair.n - 1)

    def test_near_n_window(self):
        pair = rudin_shapiro(6)
        R = modulus_squared(pair.p)
        report = level_crossings_near_n(R, 2.0**-12, pair.n)
        assert report.level == pytest.approx(1 + 2.0**-12)
        with pytest.raises(DomainError, match="window"):
            level_crossings_near_n(R, 2.0**-10, pair.n)

    def test_row(self):
        report = level_crossings(modulus_squared(_poly(1, 1)), 0.5, 2)
        assert report.row(1) == (1, 0.5, 2, 0)

    def test_upper_constant_positive(self):
        assert crossing_upper_constant(6, 0.2) > 0


class TestSublevelAndRealPart:
    def test_sublevel_half(self):
        R = modulus_squared(_poly(1, 1))
        assert sublevel_measure(R, 0.5) == pytest.approx(np.pi, abs=1e-9)

    def test_sublevel_full(self):
        R = modulus_squared(rudin_shapiro(4).p)
        assert sublevel_measure(R, 1.0) == pytest.approx(2 * np.pi)

    def test_sublevel_rejects_alpha(self):
        with pytest.raises(DomainError):
            sublevel_measure(modulus_squared(_poly(1, 1)), 0.0)

    def test_imaginary_part_of_linear(self):
        assert realpart_zero_count(_poly(1, 1), "IM") == 2

    def test_real_part_tangency_not_counted(self):
        assert realpart_zero_count(_poly(1, 1), "RE") == 0

    def test_locations(self):
        t = realpart_zero_locations(_poly(1, 1), "IM")
        assert t == pytest.approx([0.0, np.pi], abs=1e-9)

    def test_rejects_unknown_part(self):
        with pytest.raises(DomainError, match="'RE' or 'IM'"):
            realpart_zero_count(_poly(1, 1), "ABS")  # type: ignore[arg-type]


class TestAudits:
    def test_implied_constant(self):
        assert implied_nearest_zero_constant(1.0) == pytest.approx(400 * math.e**2)

    def test_nearest_zero_passes(self):
        k = 8
        f = rudin_shapiro(k).p
        report = nearest_zero_audit(f, modulus_squared(f), 0.0233079,
                                    rudin_shapiro_roots(k, "P"), k=k)
        assert report.passed
        assert report.detail["witnesses"] >= 0

    def test_nearest_zero_two_term_example(self):
        f = _poly(1, 1)
        report = nearest_zero_audit(f, modulus_squared(f), 0.5, find_roots(f))
        assert report.detail["witnesses"] == 1
        assert report.detail["worst_angle"] == pytest.approx(3 * np.pi / 2)
        assert report.lhs == pytest.approx(2 * math.sqrt(2))
        assert report.passed

    def test_nearest_zero_calibrated_bound(self):
        f = _poly(1, 1)
        report = nearest_zero_audit(f, modulus_squared(f), 0.5, find_roots(f), c4=2.0)
        assert report.params["c4"] == 2.0
        assert report.status == "fail"

    def test_nearest_zero_inconclusive_without_convergence(self):
        f = _poly(1, 1)
        roots = RootSet(np.array([-1 + 0j]), np.array([0.0]), 1, False, 1e-10)
        report = nearest_zero_audit(f, modulus_squared(f), 0.1, roots)
        assert report.status == "inconclusive"

    def test_bernstein(self):
        k = 6
        R = modulus_squared(rudin_shapiro(k).p)
        report = bernstein_audit(R, 0.4, 1.0 / 128, rudin_shapiro_roots(k, "P"), k=k)
        assert report.status in ("pass", "inconclusive")
        if report.status == "pass":
            assert report.detail["ratio"] <= 1.0

    def test_bernstein_two_term_example(self):
        R = modulus_squared(_poly(1, 1))
        report = bernstein_audit(R, np.pi / 2, 0.5, find_roots(_poly(1, 1)))
        assert report.rhs == pytest.approx(40 * math.e)
        assert report.lhs == pytest.approx(2.0)
        assert report.passed

    def test_bernstein_rejects_radius(self):
        R = modulus_squared(_poly(1, 1))
        with pytest.raises(DomainError):
            bernstein_audit(R, 0.0, 3.0, find_roots(_poly(1, 1)))

    @pytest.mark.parametrize("k", range(1, 11))
    def test_root_of_unity_floor(self, k):
        assert root_of_unity_floor(k).passed

    def test_root_of_unity_floor_limits(self):
        with pytest.raises(DomainError):
            root_of_unity_floor(0)
        with pytest.raises(CapacityError):
            root_of_unity_floor(19)

    def test_zero_density(self):
        pair = rudin_shapiro(7)
        report = zero_density_audit(modulus_squared(pair.p), 0.2, pair.n, k=7)
        assert report.passed


class TestDiagnostics:
    def test_arc_counts_bounded(self):
        n = 64
        diag = arc_diagnostics(modulus_squared(rudin_shapiro(6).p), n)
        assert 0 <= diag.both <= min(diag.low_arcs, diag.steep_arcs) <= n

    def test_arc_requires_power_of_two(self):
        with pytest.raises(DomainError):
            arc_diagnostics(modulus_squared(_poly(1, 1, 1)), 3)

    def test_gamma(self):
        assert GAMMA == pytest.approx(math.sin(math.pi / 8) ** 2)

    def test_disk_statistics(self):
        stats = disk_zero_statistics(5)
        assert stats.inside_product == stats.inside_p + stats.inside_q
        assert stats.fractions()["PQ"] == pytest.approx(stats.inside_product / 32)
