"""Tests for littlewood_lab.poly_core: coefficient models and families."""

from __future__ import annotations

import numpy as np
import pytest

from littlewood_lab.errors import CapacityError, DomainError
from littlewood_lab.poly_core import (
    SignedPoly,
    check_fekete_reciprocity,
    conjugate_reciprocal,
    fekete,
    is_prime,
    legendre_by_squares,
    legendre_symbol,
    littlewood_from_signs,
    rudin_shapiro,
    rudin_shapiro_member,
    substitute_negative,
)


def _coeffs(f: SignedPoly) -> list[int]:
    return [int(c) for c in f.coeffs]


class TestSignedPoly:
    def test_trims_trailing_zeros(self):
        f = SignedPoly.from_coeffs([1, -1, 0, 0])
        assert _coeffs(f) == [1, -1]
        assert f.degree == 1

    def test_rejects_out_of_range_coefficient(self):
        with pytest.raises(DomainError, match="-1, 0, \\+1"):
            SignedPoly.from_coeffs([1, 2])

    def test_rejects_empty_and_zero(self):
        with pytest.raises(DomainError):
            SignedPoly.from_coeffs([])
        with pytest.raises(DomainError, match="zero polynomial"):
            SignedPoly.from_coeffs([0, 0])

    def test_coefficients_are_read_only(self):
        f = SignedPoly.from_coeffs([1, 1])
        with pytest.raises(ValueError):
            f.coeffs[0] = -1

    def test_properties(self):
        f = SignedPoly.from_coeffs([0, 0, 1, -1, 1])
        assert f.low_order_zeros == 2
        assert f.leading == 1
        assert f.square_sum() == 3
        assert not f.is_littlewood
        assert SignedPoly.from_coeffs([1, -1, -1]).is_littlewood

    def test_equality_by_coefficients(self):
        assert SignedPoly.from_coeffs([1, -1]) == SignedPoly.from_coeffs(np.array([1, -1]))
        assert SignedPoly.from_coeffs([1, -1]) != SignedPoly.from_coeffs([1, 1])

    def test_littlewood_from_signs(self):
        f = littlewood_from_signs(np.array([-3, 2, -1, 5]))
        assert _coeffs(f) == [-1, 1, -1, 1]


class TestRudinShapiro:
    def test_first_generations(self):
        assert _coeffs(rudin_shapiro(0).p) == [1]
        pair = rudin_shapiro(1)
        assert _coeffs(pair.p) == [1, 1]
        assert _coeffs(pair.q) == [1, -1]
        pair = rudin_shapiro(2)
        assert _coeffs(pair.p) == [1, 1, 1, -1]
        assert _coeffs(pair.q) == [1, 1, -1, 1]

    def test_recursion(self):
        for k in range(1, 9):
            prev, cur = rudin_shapiro(k - 1), rudin_shapiro(k)
            assert _coeffs(cur.p) == _coeffs(prev.p) + _coeffs(prev.q)
            assert _coeffs(cur.q) == _coeffs(prev.p) + [-c for c in _coeffs(prev.q)]

    def test_length_and_class(self):
        pair = rudin_shapiro(10)
        assert pair.n == 1024
        assert len(pair.p) == len(pair.q) == 1024
        assert pair.p.is_littlewood and pair.q.is_littlewood

    def test_parseval_pair_identity(self):
        pair = rudin_shapiro(7)
        p = pair.p.coeffs.astype(np.int64)
        q = pair.q.coeffs.astype(np.int64)
        total = np.correlate(p, p, "full") + np.correlate(q, q, "full")
        centre = p.size - 1
        assert total[centre] == 2 * pair.n
        assert np.count_nonzero(total) == 1

    def test_capacity(self):
        with pytest.raises(CapacityError, match="K_max"):
            rudin_shapiro(5, k_max=4)
        with pytest.raises(DomainError):
            rudin_shapiro(-1)

    def test_member_selector(self):
        assert rudin_shapiro_member(3, "Q") == rudin_shapiro(3).q
        with pytest.raises(DomainError, match="'P' or 'Q'"):
            rudin_shapiro_member(3, "R")  # type: ignore[arg-type]


class TestLegendre:
    def test_euler_matches_squares(self):
        for p in (3, 5, 7, 13, 101):
            for j in range(2 * p):
                assert legendre_symbol(j, p) == legendre_by_squares(j, p)

    def test_rejects_even_modulus(self):
        with pytest.raises(DomainError):
            legendre_symbol(3, 8)

    def test_is_prime(self):
        assert is_prime(1009)
        assert is_prime(5003)
        assert not is_prime(1001)
        assert not is_prime(1)
        assert is_prime(2)


class TestFekete:
    def test_fekete_5(self):
        fp = fekete(5)
        assert _coeffs(fp.poly) == [0, 1, -1, -1, 1]
        assert fp.reciprocity == "self"

    def test_fekete_7_is_anti(self):
        fp = fekete(7)
        assert fp.reciprocity == "anti"
        assert fp.reciprocity_sign == -1

    def test_rejects_non_prime(self):
        for bad in (2, 9, 15):
            with pytest.raises(DomainError, match="odd prime"):
                fekete(bad)

    @pytest.mark.parametrize("p", [5, 7, 11, 13, 1009, 2003])
    def test_reciprocity(self, p):
        assert check_fekete_reciprocity(fekete(p))


class TestTransforms:
    def test_conjugate_reciprocal(self):
        f = SignedPoly.from_coeffs([1, 1, -1])
        assert _coeffs(conjugate_reciprocal(f)) == [-1, 1, 1]

    def test_conjugate_reciprocal_is_involution(self):
        f = rudin_shapiro(5).p
        assert conjugate_reciprocal(conjugate_reciprocal(f)) == f

    def test_exponent_below_degree(self):
        with pytest.raises(DomainError):
            conjugate_reciprocal(SignedPoly.from_coeffs([1, 1, 1]), exponent=1)

    def test_substitute_negative(self):
        f = SignedPoly.from_coeffs([1, 1, 1, -1])
        assert _coeffs(substitute_negative(f)) == [1, -1, 1, 1]
