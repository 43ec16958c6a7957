"""Evaluation of polynomials on unit-circle grids and at arbitrary points.

Grid evaluation goes through a zero-padded FFT; point evaluation is a
compensated Horner scheme (error-free transformations for every product and
sum) that also serves as the oracle the FFT path is checked against.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Iterable

import numpy as np

from littlewood_lab.errors import DomainError, InvariantError
from littlewood_lab.poly_core import SignedPoly

DIRECT_AUTOCORR_LIMIT = 1 << 12
GRID_CHECK_POINTS = 64
GRID_CHECK_TOL = 1e-9
_BLOCK_THRESHOLD = 1024
_SPLITTER = 134217729.0  # 2**27 + 1
_CHUNK_ELEMENTS = 1 << 22
_INV_PHI = (math.sqrt(5.0) - 1.0) / 2.0


def is_power_of_two(n: int) -> bool:
    return n > 0 and (n & (n - 1)) == 0


def next_power_of_two(n: int) -> int:
    return 1 << max(0, int(n - 1).bit_length())


# ---------------------------------------------------------------------------
# Compensated Horner
# ---------------------------------------------------------------------------


def _two_sum(a: np.ndarray, b: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    s = a + b
    bb = s - a
    return s, (a - (s - bb)) + (b - bb)


def _split(a: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    c = _SPLITTER * a
    hi = c - (c - a)
    return hi, a - hi


def _two_prod(a: np.ndarray, b: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    p = a * b
    ah, al = _split(a)
    bh, bl = _split(b)
    return p, al * bl - (((p - ah * bh) - al * bh) - ah * bl)


def _horner_compensated(rows: Iterable[np.ndarray], z: np.ndarray) -> np.ndarray:
    """Compensated Horner over *rows* (highest power first) at points *z*.

    Each row is broadcast against *z*; rows may be complex.
    """
    x = np.real(z).astype(np.float64)
    y = np.imag(z).astype(np.float64)
    rr = ri = None
    er = ei = None
    for row in rows:
        cr = np.real(row).astype(np.float64)
        ci = np.imag(row).astype(np.float64)
        if rr is None:
            shape = np.broadcast(x, cr).shape
            rr = np.broadcast_to(cr, shape).copy()
            ri = np.broadcast_to(ci, shape).copy()
            er = np.zeros(shape)
            ei = np.zeros(shape)
            continue
        p1, e1 = _two_prod(rr, x)
        p2, e2 = _two_prod(ri, -y)
        s1, e3 = _two_sum(p1, p2)
        s2, e4 = _two_sum(s1, cr)
        p3, e5 = _two_prod(rr, y)
        p4, e6 = _two_prod(ri, x)
        s3, e7 = _two_sum(p3, p4)
        s4, e8 = _two_sum(s3, ci)
        er, ei = er * x - ei * y + (e1 + e2 + e3 + e4), er * y + ei * x + (e5 + e6 + e7 + e8)
        rr, ri = s2, s4
    if rr is None:
        raise DomainError("cannot evaluate an empty coefficient sequence")
    return (rr + er) + 1j * (ri + ei)


def evaluate_coefficients(coeffs: np.ndarray, z: complex | np.ndarray) -> np.ndarray:
    """Evaluate ``sum coeffs[j] * z**j`` at every point of *z*.

    Long coefficient vectors are split into ``sqrt(len)`` blocks so the
    Python-level loop stays short; both levels are compensated.
    """
    c = np.asarray(coeffs)
    pts = np.atleast_1d(np.asarray(z, dtype=np.complex128))
    if c.size <= _BLOCK_THRESHOLD:
        return _horner_compensated((c[j] for j in range(c.size - 1, -1, -1)), pts)

    m = int(math.isqrt(c.size - 1)) + 1
    blocks = -(-c.size // m)
    padded = np.zeros(blocks * m, dtype=c.dtype)
    padded[: c.size] = c
    table = padded.reshape(blocks, m)
    inner = _horner_compensated(
        (table[:, i][None, :] for i in range(m - 1, -1, -1)), pts[:, None]
    )
    w = pts**m
    return _horner_compensated((inner[:, b] for b in range(blocks - 1, -1, -1)), w)


def eval_point(f: SignedPoly, z: complex) -> complex:
    """Compensated Horner value ``f(z)``."""
    return complex(evaluate_coefficients(f.as_float(), z)[0])


def eval_points(f: SignedPoly, z: np.ndarray) -> np.ndarray:
    return evaluate_coefficients(f.as_float(), z)


def scaled_modulus(coeffs: np.ndarray, z: np.ndarray) -> np.ndarray:
    """Return ``|f(z)| / max(1, |z|)**deg`` without overflow.

    Points outside the unit disk are evaluated through the reversed
    polynomial at ``1/z``.
    """
    pts = np.atleast_1d(np.asarray(z, dtype=np.complex128))
    out = np.empty(pts.shape, dtype=np.float64)
    inside = np.abs(pts) <= 1.0
    c = np.asarray(coeffs, dtype=np.float64)
    if np.any(inside):
        out[inside] = np.abs(evaluate_coefficients(c, pts[inside]))
    if np.any(~inside):
        out[~inside] = np.abs(evaluate_coefficients(c[::-1], 1.0 / pts[~inside]))
    return out


# ---------------------------------------------------------------------------
# Grid evaluation
# ---------------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class GridSamples:
    """Values ``f(exp(i t_m))`` with ``t_m = 2*pi*(m + offset)/N``."""

    n_grid: int
    values: np.ndarray
    source_degree: int
    offset: float = 0.0

    def angles(self) -> np.ndarray:
        return 2.0 * np.pi * (np.arange(self.n_grid) + self.offset) / self.n_grid

    def modulus_squared(self) -> np.ndarray:
        return self.values.real**2 + self.values.imag**2

    def parseval_mean(self) -> float:
        """Mean of ``|f|**2`` over the grid; equals the coefficient square sum."""
        return float(np.mean(self.modulus_squared()))


def grid_values(coeffs: np.ndarray, n_grid: int, half_step: bool = False) -> np.ndarray:
    """Raw FFT evaluation of a coefficient vector on the N-th roots of unity."""
    c = np.asarray(coeffs)
    if half_step:
        c = c * np.exp(1j * np.pi * np.arange(c.size) / n_grid)
    return np.fft.ifft(c, n=n_grid) * n_grid


def eval_grid(
    f: SignedPoly,
    n_grid: int,
    *,
    half_step: bool = False,
    verify: bool = True,
    tol: float = GRID_CHECK_TOL,
    checks: int = GRID_CHECK_POINTS,
    seed: int = 0,
) -> GridSamples:
    """Evaluate *f* at the N-th roots of unity by a zero-padded FFT.

    With *half_step* the grid is rotated by half a step, which keeps every
    node away from ``z = +1`` and ``z = -1``.  When *verify* is set,
    ``checks`` random nodes are recomputed with compensated Horner and the
    largest deviation must stay below ``tol * (deg + 1)``.
    """
    if not is_power_of_two(n_grid):
        raise DomainError(f"grid size must be a power of two, got {n_grid}")
    if n_grid < f.degree + 1:
        raise DomainError(f"grid size {n_grid} does not resolve degree {f.degree}")
    offset = 0.5 if half_step else 0.0
    values = grid_values(f.as_float(), n_grid, half_step=half_step)
    samples = GridSamples(n_grid=n_grid, values=values, source_degree=f.degree, offset=offset)
    if verify:
        deviation = grid_oracle_deviation(f, samples, checks=checks, seed=seed)
        if deviation > tol * (f.degree + 1):
            raise InvariantError(
                f"FFT and Horner disagree by {deviation:.3e} on a {n_grid}-point grid"
            )
    return samples


def grid_oracle_deviation(
    f: SignedPoly, samples: GridSamples, checks: int = GRID_CHECK_POINTS, seed: int = 0
) -> float:
    """Largest ``|FFT value - Horner value|`` over *checks* random grid nodes."""
    rng = np.random.Generator(np.random.Philox(seed))
    count = min(checks, samples.n_grid)
    idx = rng.choice(samples.n_grid, size=count, replace=False)
    z = np.exp(1j * samples.angles()[idx])
    oracle = evaluate_coefficients(f.as_float(), z)
    return float(np.max(np.abs(samples.values[idx] - oracle)))


# ---------------------------------------------------------------------------
# |f|^2 as a cosine polynomial
# ---------------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class CosinePoly:
    """``R(t) = a[0] + 2 * sum_{j>=1} a[j] * cos(j t)``."""

    a: np.ndarray

    @property
    def n(self) -> int:
        return int(self.a.size)

    @property
    def trig_degree(self) -> int:
        return self.n - 1

    def _terms(
        self, t: np.ndarray, kernel: Callable[[np.ndarray], np.ndarray], weight: np.ndarray
    ) -> np.ndarray:
        t = np.atleast_1d(np.asarray(t, dtype=np.float64))
        out = np.empty(t.shape, dtype=np.float64)
        j = np.arange(1, self.n, dtype=np.float64)
        rows = max(1, _CHUNK_ELEMENTS // max(1, self.n))
        for start in range(0, t.size, rows):
            block = t[start:start + rows]
            out[start:start + rows] = kernel(np.outer(block, j)) @ weight
        return out

    def evaluate(self, t: float | np.ndarray) -> np.ndarray:
        a = self.a.astype(np.float64)
        if self.n == 1:
            return np.full(np.atleast_1d(t).shape, a[0])
        return a[0] + 2.0 * self._terms(t, np.cos, a[1:])

    def derivative(self, t: float | np.ndarray) -> np.ndarray:
        if self.n == 1:
            return np.zeros(np.atleast_1d(t).shape)
        j = np.arange(1, self.n, dtype=np.float64)
        return -2.0 * self._terms(t, np.sin, j * self.a[1:].astype(np.float64))

    def _spectrum(self, n_grid: int, weights: np.ndarray) -> np.ndarray:
        if not is_power_of_two(n_grid) or n_grid < 2 * self.n - 1:
            raise DomainError(f"grid size {n_grid} cannot resolve a length-{self.n} cosine poly")
        b = np.zeros(n_grid, dtype=np.complex128)
        b[: self.n] = weights
        if self.n > 1:
            b[n_grid - self.n + 1:] = np.conj(weights[1:][::-1])
        return np.fft.ifft(b) * n_grid

    def grid(self, n_grid: int) -> np.ndarray:
        """Values at ``t_m = 2*pi*m/N`` (N a power of two, ``N >= 2n - 1``)."""
        return self._spectrum(n_grid, self.a.astype(np.complex128)).real

    def derivative_grid(self, n_grid: int) -> np.ndarray:
        j = np.arange(self.n, dtype=np.float64)
        return self._spectrum(n_grid, 1j * j * self.a.astype(np.float64)).real

    def value_at_zero(self) -> float:
        return float(self.a[0] + 2 * np.sum(self.a[1:]))

    def sup(self, n_grid: int | None = None, candidates: int = 4) -> float:
        """``max_t R(t)``: grid maximum refined by golden-section search."""
        n_grid = n_grid or next_power_of_two(16 * self.n)
        values = self.grid(n_grid)
        h = 2.0 * np.pi / n_grid
        top = np.argsort(values)[-candidates:]
        _, v_best = golden_section_max(
            lambda t: self.evaluate(t), top * h - h, top * h + h
        )
        return float(max(values.max(), v_best.max()))


def golden_section_max(
    func: Callable[[np.ndarray], np.ndarray],
    lo: np.ndarray,
    hi: np.ndarray,
    tol: float = 1e-12,
) -> tuple[np.ndarray, np.ndarray]:
    """Vectorised golden-section ascent on independent brackets.

    Returns ``(argmax, max)`` per bracket; *func* maps an array of angles to
    an array of values.
    """
    a = np.asarray(lo, dtype=np.float64).copy()
    b = np.asarray(hi, dtype=np.float64).copy()
    c = b - _INV_PHI * (b - a)
    d = a + _INV_PHI * (b - a)
    fc, fd = func(c), func(d)
    while np.max(b - a) > tol:
        left = fc >= fd
        b = np.where(left, d, b)
        a = np.where(left, a, c)
        new_c = b - _INV_PHI * (b - a)
        new_d = a + _INV_PHI * (b - a)
        c_next = np.where(left, new_c, d)
        d_next = np.where(left, c, new_d)
        trial = np.where(left, c_next, d_next)
        fp = func(trial)
        fc, fd = np.where(left, fp, fd), np.where(left, fc, fp)
        c, d = c_next, d_next
    t = 0.5 * (a + b)
    return t, func(t)


def autocorrelation_direct(f: SignedPoly) -> np.ndarray:
    """Aperiodic autocorrelations ``a_j = sum_m c_m c_{m+j}`` by direct convolution."""
    c = f.coeffs.astype(np.int64)
    full = np.correlate(c, c, mode="full")
    return full[c.size - 1:]


def autocorrelation_fft(f: SignedPoly) -> np.ndarray:
    """Aperiodic autocorrelations via an FFT of size ``>= 2 (deg + 1)``, rounded."""
    size = next_power_of_two(2 * len(f))
    spectrum = np.fft.rfft(f.as_float(), size)
    raw = np.fft.irfft(spectrum.real**2 + spectrum.imag**2, size)[: len(f)]
    rounded = np.rint(raw)
    drift = float(np.max(np.abs(raw - rounded)))
    if drift > 0.25:
        raise InvariantError(f"autocorrelation FFT drifted {drift:.3f} from an integer")
    return rounded.astype(np.int64)


def modulus_squared(f: SignedPoly, verify: bool = True) -> CosinePoly:
    """Return ``|f(e^{it})|**2`` as a :class:`CosinePoly` with integer coefficients.

    Below degree ``2**12`` the FFT result is compared with the direct
    convolution when *verify* is set.
    """
    a = autocorrelation_fft(f)
    if verify and f.degree < DIRECT_AUTOCORR_LIMIT:
        direct = autocorrelation_direct(f)
        if not np.array_equal(a, direct):
            raise InvariantError("FFT autocorrelation differs from direct convolution")
    a.setflags(write=False)
    return CosinePoly(a)


def derivative_values(R: CosinePoly, t: float) -> float:
    """Exact termwise ``R'(t) = -2 sum j a_j sin(j t)``."""
    return float(R.derivative(t)[0])


def finite_difference_derivative(R: CosinePoly, t: float, h: float = 1e-5) -> float:
    """Central-difference estimate of ``R'(t)``, the cross-check for :func:`derivative_values`."""
    vals = R.evaluate(np.array([t + h, t - h]))
    return float((vals[0] - vals[1]) / (2.0 * h))
