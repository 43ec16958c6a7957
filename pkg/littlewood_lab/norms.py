"""M_q norms on the unit circle and the Mahler measure by two routes."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Literal, Union

import numpy as np

from littlewood_lab.eval_engine import (
    eval_grid,
    evaluate_coefficients,
    golden_section_max,
    modulus_squared,
    next_power_of_two,
)
from littlewood_lab.errors import CapacityError, DomainError, SingularSampleError
from littlewood_lab.poly_core import SignedPoly, rudin_shapiro
from littlewood_lab.zeros import RootSet

ZERO = "ZERO"
INFINITY = "INFINITY"
Exponent = Union[float, Literal["ZERO", "INFINITY"]]

SINGULAR_FLAG_RATIO = 1e-13
SUP_ANGLE_TOL = 1e-12
MAHLER_MIN_GRID = 1 << 16
M4_K_MAX = 20


@dataclass(frozen=True)
class NormResult:
    q: Exponent
    value: float
    n_grid: int
    route: Literal["quadrature", "jensen", "exact-parseval"]
    doubling_delta: float | None = None
    flagged_angles: tuple[float, ...] = field(default=())


def default_grid(f: SignedPoly) -> int:
    """Default quadrature grid: ``8 (deg + 1)`` rounded up to a power of two."""
    return next_power_of_two(8 * (f.degree + 1))


def _check_grid(f: SignedPoly, n_grid: int) -> None:
    if n_grid < 4 * (f.degree + 1):
        raise DomainError(f"grid size {n_grid} is below 4*(deg+1) = {4 * (f.degree + 1)}")


def _is_infinite(q: Exponent) -> bool:
    return q == INFINITY or (isinstance(q, float) and math.isinf(q))


def _finite_mean(modulus: np.ndarray, q: float) -> float:
    return float(np.mean(modulus**q) ** (1.0 / q))


def _sup_modulus(f: SignedPoly, n_grid: int, candidates: int = 4) -> float:
    samples = eval_grid(f, n_grid, verify=False)
    power = samples.modulus_squared()
    h = 2.0 * np.pi / n_grid
    top = np.argsort(power)[-candidates:]
    coeffs = f.as_float()

    def objective(t: np.ndarray) -> np.ndarray:
        return np.abs(evaluate_coefficients(coeffs, np.exp(1j * t))) ** 2

    _, refined = golden_section_max(objective, top * h - h, top * h + h, tol=SUP_ANGLE_TOL)
    return math.sqrt(max(float(power.max()), float(refined.max())))


def mq_norm(
    f: SignedPoly,
    q: Exponent,
    n_grid: int | None = None,
    *,
    estimate_error: bool = True,
) -> NormResult:
    """Return ``M_q(f)`` for ``q > 0`` or ``q = INFINITY``.

    Finite exponents use the trapezoidal rule on the N-grid; the sup norm
    refines the best grid points by golden-section ascent.  With
    *estimate_error* the relative change under one grid doubling is stored
    in ``doubling_delta``.
    """
    n_grid = n_grid or default_grid(f)
    _check_grid(f, n_grid)
    if _is_infinite(q):
        value = _sup_modulus(f, n_grid)
        delta = None
        if estimate_error:
            delta = abs(_sup_modulus(f, 2 * n_grid) - value) / value
        return NormResult(INFINITY, value, n_grid, "quadrature", delta)

    if q == ZERO or float(q) <= 0:
        raise DomainError("q must be positive; use mahler_quadrature for M_0")
    q = float(q)
    modulus = np.abs(eval_grid(f, n_grid, verify=False).values)
    value = _finite_mean(modulus, q)
    delta = None
    if estimate_error:
        finer = _finite_mean(np.abs(eval_grid(f, 2 * n_grid, verify=False).values), q)
        delta = abs(finer - value) / value
    route = "exact-parseval" if q == 2.0 else "quadrature"
    return NormResult(q, value, n_grid, route, delta)


def _log_mean(f: SignedPoly, n_grid: int) -> tuple[float, tuple[float, ...]]:
    samples = eval_grid(f, n_grid, half_step=True, verify=False)
    modulus = np.abs(samples.values)
    angles = samples.angles()
    zero = np.flatnonzero(modulus == 0.0)
    if zero.size:
        raise SingularSampleError(float(angles[zero[0]]), 0.0)
    threshold = SINGULAR_FLAG_RATIO * math.sqrt(f.square_sum())
    flagged = tuple(float(t) for t in angles[modulus < threshold])
    return float(np.mean(np.log(modulus))), flagged


def mahler_quadrature(
    f: SignedPoly, n_grid: int | None = None, *, estimate_error: bool = True
) -> NormResult:
    """Mahler measure ``exp(mean log|f|)`` on a half-step rotated N-grid.

    The rotation keeps nodes off ``z = +-1``, where Littlewood and Fekete
    polynomials often vanish.  Unimodular zeros make the integrand
    logarithmically singular; the rule still converges as N doubles, only
    slowly, which ``doubling_delta`` exposes.  A zero at ``+-1`` of
    multiplicity m costs a factor ``2^{m/N}``: ``[1, 1]`` gives ``2^{1/16}``
    at N = 16, so the default grid never drops below ``MAHLER_MIN_GRID``
    (relative error about ``1e-5`` per such zero).
    """
    n_grid = n_grid or max(default_grid(f), MAHLER_MIN_GRID)
    _check_grid(f, n_grid)
    log_mean, flagged = _log_mean(f, n_grid)
    value = math.exp(log_mean)
    delta = None
    if estimate_error:
        finer, _ = _log_mean(f, 2 * n_grid)
        delta = abs(math.exp(finer) - value) / value
    return NormResult(ZERO, value, n_grid, "quadrature", delta, flagged)


def mahler_jensen(roots: RootSet, leading: complex) -> NormResult:
    """Mahler measure ``|leading| * prod max(1, |z_j|)`` from a complete root set."""
    if not roots.converged or len(roots.roots) != roots.degree:
        raise DomainError(
            f"root set incomplete: {len(roots.roots)} of {roots.degree} roots, "
            f"converged={roots.converged}"
        )
    if roots.residuals.size and float(np.max(roots.residuals)) > roots.tol:
        raise DomainError("root residuals exceed the certification tolerance")
    log_value = math.log(abs(leading)) + float(
        np.sum(np.log(np.maximum(1.0, np.abs(roots.roots))))
    )
    return NormResult(ZERO, math.exp(log_value), 0, "jensen")


# ---------------------------------------------------------------------------
# Rudin-Shapiro specific norms
# ---------------------------------------------------------------------------


def m4_fourth_power_exact(f: SignedPoly) -> int:
    """``M_4(f)**4 = a_0**2 + 2 sum_{j>=1} a_j**2`` from integer autocorrelations."""
    a = modulus_squared(f, verify=False).a
    return int(a[0]) ** 2 + 2 * int(np.dot(a[1:], a[1:]))


def m4_fourth_power_quadrature(f: SignedPoly, n_grid: int | None = None) -> float:
    """Grid mean of ``|f|**4``; exact to rounding once ``N > 2 deg``."""
    n_grid = n_grid or next_power_of_two(4 * (f.degree + 1))
    power = eval_grid(f, n_grid, verify=False).modulus_squared()
    return float(np.mean(power**2))


def m4_ratio(k: int) -> float:
    """``M_4(P_k)**4 / (4**(k+1)/3)``; tends to 1 geometrically in k."""
    if k > M4_K_MAX:
        raise CapacityError(f"m4_ratio supports k <= {M4_K_MAX}, got {k}")
    fourth = m4_fourth_power_exact(rudin_shapiro(k).p)
    return float(Fraction(3 * fourth, 4 ** (k + 1)))


def saffari_mq_ratio(k: int, q: float, n_grid: int | None = None) -> tuple[float, float]:
    """Ratios ``M_q(P_k) / L`` and ``M_q(Q_k) / L`` with ``L = 2^((k+1)/2) / (q/2+1)^(1/q)``."""
    pair = rudin_shapiro(k)
    limit = 2.0 ** ((k + 1) / 2) / (q / 2 + 1) ** (1.0 / q)
    n_grid = n_grid or next_power_of_two(16 * pair.n)
    mp = mq_norm(pair.p, q, n_grid, estimate_error=False).value
    mq = mq_norm(pair.q, q, n_grid, estimate_error=False).value
    return mp / limit, mq / limit
