"""Exact construction of the polynomial families studied by the lab.

All coefficient arrays are ``int8`` and every construction is integer
arithmetic; floating point first appears in :mod:`littlewood_lab.eval_engine`.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import Iterable, Literal

import numpy as np

from littlewood_lab.errors import CapacityError, DomainError

K_MAX_DEFAULT = 22

# Deterministic Miller-Rabin witnesses, valid for every n < 2**64.
_MR_BASES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37)


# ---------------------------------------------------------------------------
# SignedPoly
# ---------------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class SignedPoly:
    """Polynomial with coefficients in {-1, 0, +1}; ``coeffs[j]`` multiplies ``z**j``.

    Build instances with :meth:`from_coeffs`, which validates and trims
    trailing zeros.  The coefficient array is read-only.
    """

    coeffs: np.ndarray

    @classmethod
    def from_coeffs(cls, values: Iterable[int] | np.ndarray) -> "SignedPoly":
        arr = np.asarray(list(values) if not isinstance(values, np.ndarray) else values)
        if arr.ndim != 1 or arr.size == 0:
            raise DomainError("coefficients must be a non-empty 1-D sequence")
        if not np.all(np.isin(arr, (-1, 0, 1))):
            raise DomainError("coefficients must lie in {-1, 0, +1}")
        nonzero = np.flatnonzero(arr)
        if nonzero.size == 0:
            raise DomainError("the zero polynomial is not a SignedPoly")
        trimmed = np.array(arr[: nonzero[-1] + 1], dtype=np.int8)
        trimmed.setflags(write=False)
        return cls(trimmed)

    @property
    def degree(self) -> int:
        return int(self.coeffs.size - 1)

    @property
    def is_littlewood(self) -> bool:
        """True when no coefficient is zero (class L_n)."""
        return bool(np.all(self.coeffs != 0))

    @property
    def leading(self) -> int:
        return int(self.coeffs[-1])

    @property
    def low_order_zeros(self) -> int:
        """Multiplicity of the root at z = 0."""
        return int(np.flatnonzero(self.coeffs)[0])

    def square_sum(self) -> int:
        """Sum of squared coefficients, i.e. ``M_2(f)**2`` by Parseval."""
        return int(np.count_nonzero(self.coeffs))

    def as_float(self) -> np.ndarray:
        return self.coeffs.astype(np.float64)

    def negate(self) -> "SignedPoly":
        return SignedPoly.from_coeffs(-self.coeffs.astype(np.int8))

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, SignedPoly):
            return NotImplemented
        return bool(np.array_equal(self.coeffs, other.coeffs))

    __hash__ = None  # type: ignore[assignment]

    def __len__(self) -> int:
        return int(self.coeffs.size)

    def __repr__(self) -> str:
        head = ", ".join(str(int(c)) for c in self.coeffs[:8])
        tail = ", ..." if self.coeffs.size > 8 else ""
        return f"SignedPoly(deg={self.degree}, [{head}{tail}])"


def littlewood_from_signs(signs: np.ndarray) -> SignedPoly:
    """Wrap a ±1 vector (e.g. a random draw) as a Littlewood polynomial."""
    return SignedPoly.from_coeffs(np.where(np.asarray(signs) < 0, -1, 1).astype(np.int8))


# ---------------------------------------------------------------------------
# Rudin-Shapiro pairs
# ---------------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class RudinShapiroPair:
    k: int
    n: int
    p: SignedPoly
    q: SignedPoly


@lru_cache(maxsize=32)
def _rudin_shapiro_arrays(k: int) -> tuple[np.ndarray, np.ndarray]:
    p = np.ones(1, dtype=np.int8)
    q = np.ones(1, dtype=np.int8)
    for _ in range(k):
        p, q = np.concatenate((p, q)), np.concatenate((p, -q))
    p.setflags(write=False)
    q.setflags(write=False)
    return p, q


def rudin_shapiro(k: int, k_max: int = K_MAX_DEFAULT) -> RudinShapiroPair:
    """Return the k-th Rudin-Shapiro pair ``(P_k, Q_k)`` of length ``2**k``.

    ``P_{k+1} = P_k + z^{2^k} Q_k`` and ``Q_{k+1} = P_k - z^{2^k} Q_k``,
    started from ``P_0 = Q_0 = 1``.  Raises :class:`CapacityError` above
    *k_max*.
    """
    if k < 0:
        raise DomainError(f"generation index must be >= 0, got {k}")
    if k > k_max:
        raise CapacityError(f"generation {k} exceeds K_max={k_max}")
    p, q = _rudin_shapiro_arrays(int(k))
    return RudinShapiroPair(k=int(k), n=1 << int(k), p=SignedPoly(p), q=SignedPoly(q))


def rudin_shapiro_member(
    k: int, which: Literal["P", "Q"], k_max: int = K_MAX_DEFAULT
) -> SignedPoly:
    pair = rudin_shapiro(k, k_max=k_max)
    if which == "P":
        return pair.p
    if which == "Q":
        return pair.q
    raise DomainError(f"which must be 'P' or 'Q', got {which!r}")


# ---------------------------------------------------------------------------
# Legendre symbols and Fekete polynomials
# ---------------------------------------------------------------------------


def is_prime(n: int) -> bool:
    """Deterministic Miller-Rabin primality test for ``n < 2**64``."""
    if n < 2:
        return False
    for b in _MR_BASES:
        if n % b == 0:
            return n == b
    d, s = n - 1, 0
    while d % 2 == 0:
        d //= 2
        s += 1
    for a in _MR_BASES:
        x = pow(a, d, n)
        if x in (1, n - 1):
            continue
        for _ in range(s - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


def legendre_symbol(j: int, p: int) -> int:
    """Return ``(j|p)`` by Euler's criterion.

    *p* must be an odd prime; primality itself is not checked here.
    """
    if p < 3 or p % 2 == 0:
        raise DomainError(f"p must be an odd prime, got {p}")
    r = pow(j % p, (p - 1) // 2, p)
    if r == 0:
        return 0
    return 1 if r == 1 else -1


def legendre_by_squares(j: int, p: int) -> int:
    """Exhaustive-squares cross-check of :func:`legendre_symbol`."""
    if p < 3 or p % 2 == 0:
        raise DomainError(f"p must be an odd prime, got {p}")
    j %= p
    if j == 0:
        return 0
    return 1 if any(x * x % p == j for x in range(1, p)) else -1


@dataclass(frozen=True, eq=False)
class FeketePoly:
    p: int
    poly: SignedPoly

    @property
    def reciprocity(self) -> Literal["self", "anti"]:
        """``"self"`` when ``z^p f(1/z) = f(z)`` (p = 1 mod 4), else ``"anti"``."""
        return "self" if self.p % 4 == 1 else "anti"

    @property
    def reciprocity_sign(self) -> int:
        return 1 if self.p % 4 == 1 else -1


def fekete(p: int) -> FeketePoly:
    """Return ``f_p(z) = sum_{j=0}^{p-1} (j|p) z^j``."""
    if p < 3 or p % 2 == 0 or not is_prime(p):
        raise DomainError(f"fekete requires an odd prime, got {p}")
    residue = np.zeros(p, dtype=bool)
    x = np.arange(1, p, dtype=np.int64)
    residue[(x * x) % p] = True
    coeffs = np.where(residue, 1, -1).astype(np.int8)
    coeffs[0] = 0
    return FeketePoly(p=p, poly=SignedPoly.from_coeffs(coeffs))


# ---------------------------------------------------------------------------
# Coefficient transforms
# ---------------------------------------------------------------------------


def conjugate_reciprocal(f: SignedPoly, exponent: int | None = None) -> SignedPoly:
    """Return ``z**m * f(1/z)`` with ``m = deg f`` unless *exponent* is given.

    For real coefficients this is a coefficient reversal over ``m + 1``
    slots.  It is an involution when the constant term is nonzero.
    """
    m = f.degree if exponent is None else int(exponent)
    if m < f.degree:
        raise DomainError(f"exponent {m} is below the degree {f.degree}")
    padded = np.zeros(m + 1, dtype=np.int8)
    padded[: f.coeffs.size] = f.coeffs
    return SignedPoly.from_coeffs(padded[::-1])


def substitute_negative(f: SignedPoly) -> SignedPoly:
    """Return ``f(-z)``."""
    signs = np.where(np.arange(f.coeffs.size) % 2 == 0, 1, -1).astype(np.int8)
    return SignedPoly.from_coeffs(f.coeffs * signs)


def check_fekete_reciprocity(fp: FeketePoly) -> bool:
    """Verify ``z^p f_p(1/z) = (-1|p) f_p(z)`` coefficientwise."""
    rev = conjugate_reciprocal(fp.poly, exponent=fp.p)
    padded = np.zeros(fp.p + 1, dtype=np.int8)
    padded[: len(rev)] = rev.coeffs
    target = np.zeros(fp.p + 1, dtype=np.int8)
    target[: len(fp.poly)] = fp.poly.coeffs * fp.reciprocity_sign
    return bool(np.array_equal(padded, target))
