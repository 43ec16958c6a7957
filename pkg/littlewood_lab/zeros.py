"""Zeros of signed polynomials and level sets of ``R = |f|**2`` on the circle.

Complete root sets come from a simultaneous Aberth-Ehrlich iteration; the
argument principle and sign-change counts give independent counts that do
not need the roots at all.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Callable, Literal

import numpy as np

from littlewood_lab.errors import (
    CapacityError,
    ContourError,
    ConvergenceError,
    DomainError,
    InvariantError,
)
from littlewood_lab.eval_engine import (
    CosinePoly,
    evaluate_coefficients,
    golden_section_max,
    grid_values,
    modulus_squared,
    next_power_of_two,
    scaled_modulus,
)
from littlewood_lab.poly_core import FeketePoly, SignedPoly, rudin_shapiro, rudin_shapiro_member
from littlewood_lab.report import AuditReport

ROOT_DEGREE_CAP = 1 << 14
ROOT_MAX_ITER = 500
DELTA_CIRCLE_DEFAULT = 1e-8
CLUSTER_RADIUS = 1e-6
GAMMA = math.sin(math.pi / 8) ** 2
ANGLE_TOL = 1e-12

_EPS = float(np.finfo(np.float64).eps)
_STEP_TOL = 1e-14
_CHUNK_ELEMENTS = 1 << 22
_CONTOUR_DEPTH = 24
_REFINE_DEGREE_LIMIT = 1 << 12

Part = Literal["RE", "IM"]


# ---------------------------------------------------------------------------
# Root sets
# ---------------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class RootSet:
    """All complex roots of a polynomial, with multiplicity.

    ``residuals[j]`` is ``|f(z_j)| / max(1, |z_j|)**deg`` from the
    compensated evaluator, independent of the iteration's arithmetic.
    Roots that fell within the cluster radius of each other were replaced
    by their centroid; ``clusters`` lists the merged index groups.
    """

    roots: np.ndarray
    residuals: np.ndarray
    degree: int
    converged: bool
    tol: float
    iterations: int = 0
    clusters: tuple[tuple[int, ...], ...] = field(default=())

    def count_inside(self, rho: float) -> int:
        return int(np.count_nonzero(np.abs(self.roots) < rho))

    def max_residual(self) -> float:
        return float(self.residuals.max()) if self.residuals.size else 0.0


def _cauchy_radius(c: np.ndarray) -> float:
    """Geometric mean of the Cauchy upper and lower root bounds (``c[0] != 0``)."""
    lead, const = abs(c[-1]), abs(c[0])
    upper = 1.0 + float(np.max(np.abs(c[:-1]))) / lead
    lower = 1.0 / (1.0 + float(np.max(np.abs(c[1:]))) / const)
    return math.sqrt(upper * lower)


def _newton_terms(c: np.ndarray, z: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Return ``f/f'`` at *z* and a flag for values already at rounding level.

    Points outside the unit disk go through the reversed polynomial at
    ``w = 1/z``, using ``f/f' = g / (w (d g - w g'))``.
    """
    d = c.size - 1
    ratio = np.empty(z.shape, dtype=np.complex128)
    noisy = np.empty(z.shape, dtype=bool)
    inside = np.abs(z) <= 1.0
    for mask, reverse in ((inside, False), (~inside, True)):
        if not mask.any():
            continue
        w = 1.0 / z[mask] if reverse else z[mask]
        rows = c if reverse else c[::-1]
        aw = np.abs(w)
        p = np.full(w.shape, rows[0], dtype=np.complex128)
        dp = np.zeros(w.shape, dtype=np.complex128)
        ap = np.full(w.shape, abs(rows[0]))
        for cj in rows[1:]:
            dp = dp * w + p
            p = p * w + cj
            ap = ap * aw + abs(cj)
        noisy[mask] = np.abs(p) <= 4.0 * (d + 1) * _EPS * ap
        with np.errstate(divide="ignore", invalid="ignore"):
            if reverse:
                ratio[mask] = p / (w * (d * p - w * dp))
            else:
                ratio[mask] = p / dp
    bad = ~np.isfinite(ratio)
    if bad.any():
        # f' vanished: an exact root stays put, anything else gets nudged.
        ratio[bad] = np.where(noisy[bad], 0.0, 1e-8 * (1.0 + np.abs(z[bad])))
    return ratio, noisy


def _repulsion(z: np.ndarray, idx: np.ndarray) -> np.ndarray:
    """``sum_{j != i} 1 / (z_i - z_j)`` for every active index *i*."""
    out = np.empty(idx.size, dtype=np.complex128)
    rows = max(1, _CHUNK_ELEMENTS // max(1, z.size))
    for start in range(0, idx.size, rows):
        sel = idx[start:start + rows]
        diff = z[sel][:, None] - z[None, :]
        diff[np.arange(sel.size), sel] = np.inf
        with np.errstate(divide="ignore", invalid="ignore"):
            out[start:start + rows] = np.sum(1.0 / diff, axis=1)
    return out


def _aberth(c: np.ndarray, seed: int, max_iter: int) -> tuple[np.ndarray, bool, int]:
    """Aberth-Ehrlich iteration for ``c[0] + ... + c[d] z^d`` with ``c[0] != 0``."""
    d = c.size - 1
    if d == 1:
        return np.array([-c[0] / c[1]], dtype=np.complex128), True, 0
    rng = np.random.Generator(np.random.Philox(seed))
    radius = _cauchy_radius(c)
    angles = 2.0 * np.pi * (np.arange(d) + 0.5 * rng.random(d)) / d + 0.4
    z = radius * np.exp(1j * angles)
    active = np.ones(d, dtype=bool)
    it = 0
    for it in range(1, max_iter + 1):
        idx = np.flatnonzero(active)
        if idx.size == 0:
            break
        za = z[idx]
        ratio, noisy = _newton_terms(c, za)
        s = _repulsion(z, idx)
        with np.errstate(divide="ignore", invalid="ignore"):
            delta = ratio / (1.0 - ratio * s)
        delta = np.where(np.isfinite(delta), delta, ratio)
        z[idx] = za - delta
        scale = np.maximum(1.0, np.abs(za))
        step = np.abs(delta)
        done = (step <= _STEP_TOL * scale) | noisy
        active[idx[done]] = False
    return z, not active.any(), it


def _newton_polish(c: np.ndarray, z: np.ndarray) -> np.ndarray:
    """One compensated Newton step per root, kept only where the residual drops."""
    out = z.copy()
    d = c.size - 1
    if d < 1:
        return out
    inside = np.abs(z) <= 1.0
    for mask, rows in ((inside, c), (~inside, c[::-1])):
        if not mask.any():
            continue
        w = z[mask] if rows is c else 1.0 / z[mask]
        deriv = rows[1:] * np.arange(1, d + 1)
        val = evaluate_coefficients(rows, w)
        slope = evaluate_coefficients(deriv, w)
        with np.errstate(divide="ignore", invalid="ignore"):
            w_new = w - val / slope
        ok = np.isfinite(w_new)
        w_new = np.where(ok, w_new, w)
        better = np.abs(evaluate_coefficients(rows, w_new)) < np.abs(val)
        w_best = np.where(better, w_new, w)
        out[mask] = w_best if rows is c else 1.0 / w_best
    return out


def _merge_clusters(z: np.ndarray, radius: float) -> tuple[np.ndarray, tuple[tuple[int, ...], ...]]:
    """Replace roots closer than *radius* by the centroid of their cluster."""
    parent = np.arange(z.size)

    def find(i: int) -> int:
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    rows = max(1, _CHUNK_ELEMENTS // max(1, z.size))
    for start in range(0, z.size, rows):
        block = z[start:start + rows]
        close = np.abs(block[:, None] - z[None, :]) < radius
        ii, jj = np.nonzero(close)
        for i, j in zip(ii + start, jj):
            if i < j:
                ri, rj = find(int(i)), find(int(j))
                if ri != rj:
                    parent[rj] = ri
    groups: dict[int, list[int]] = {}
    for i in range(z.size):
        groups.setdefault(find(i), []).append(i)
    merged = z.copy()
    clusters = []
    for members in groups.values():
        if len(members) > 1:
            merged[members] = np.mean(z[members])
            clusters.append(tuple(members))
    return merged, tuple(clusters)


def default_root_tol(f: SignedPoly) -> float:
    """``1e-10 * M_2(f)``, i.e. ``1e-10 * 2**(k/2)`` for a Rudin-Shapiro member."""
    return 1e-10 * math.sqrt(f.square_sum())


def find_roots(
    f: SignedPoly,
    tol: float | None = None,
    *,
    degree_cap: int = ROOT_DEGREE_CAP,
    max_iter: int = ROOT_MAX_ITER,
    seed: int = 0,
    cluster_radius: float = CLUSTER_RADIUS,
) -> RootSet:
    """Every root of *f* by simultaneous Aberth-Ehrlich iteration.

    The root at ``z = 0`` (Fekete polynomials) is deflated exactly; the
    start points sit on a circle of radius ``sqrt(upper * lower)`` (Cauchy
    bounds) with angular jitter drawn from ``Philox(seed)``.  Raises
    :class:`ConvergenceError` carrying the partial set when the iteration
    cap is hit or a residual stays above *tol*.
    """
    if f.degree > degree_cap:
        raise CapacityError(f"degree {f.degree} exceeds the root-finder cap {degree_cap}")
    tol = default_root_tol(f) if tol is None else float(tol)
    if tol <= 0:
        raise DomainError("root tolerance must be positive")
    shift = f.low_order_zeros
    deflated = f.as_float()[shift:]
    roots = np.zeros(f.degree, dtype=np.complex128)
    converged, iterations = True, 0
    if deflated.size > 1:
        found, converged, iterations = _aberth(deflated, seed, max_iter)
        roots[shift:] = _newton_polish(deflated, found)
    roots, clusters = _merge_clusters(roots, cluster_radius)
    residuals = scaled_modulus(f.as_float(), roots) if roots.size else np.zeros(0)
    roots.setflags(write=False)
    residuals.setflags(write=False)
    result = RootSet(roots, residuals, f.degree, False, tol, iterations, clusters)
    if not converged:
        raise ConvergenceError(
            f"Aberth iteration did not converge in {max_iter} sweeps (degree {f.degree})", result
        )
    if residuals.size and float(residuals.max()) > tol:
        raise ConvergenceError(
            f"largest root residual {float(residuals.max()):.3e} exceeds tol {tol:.3e}", result
        )
    return RootSet(roots, residuals, f.degree, True, tol, iterations, clusters)


@lru_cache(maxsize=64)
def rudin_shapiro_roots(
    k: int, which: Literal["P", "Q"] = "P", tol: float | None = None
) -> RootSet:
    """Cached :func:`find_roots` for ``P_k`` or ``Q_k``."""
    return find_roots(rudin_shapiro_member(k, which), tol)


# ---------------------------------------------------------------------------
# Classification
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ZeroClassification:
    n: int
    degree: int
    delta_circle: float
    c1: float
    on_circle: int
    annulus: int
    inside: int
    outside: int
    real_zeros: int
    real_locations: tuple[complex, ...] = ()

    @property
    def on_circle_fraction(self) -> float:
        return self.on_circle / self.n

    @property
    def annulus_fraction(self) -> float:
        return self.annulus / self.n


def classify(
    roots: RootSet,
    n: int,
    delta_circle: float = DELTA_CIRCLE_DEFAULT,
    c1: float = 2.0,
) -> ZeroClassification:
    """Count roots on the circle, in the annulus ``1 - c1/n < |z| < 1 + c1/n`` and on the real axis.

    Roots off the circle are also split into inside and outside.
    """
    if not roots.converged:
        raise DomainError("classify needs a converged root set")
    if delta_circle <= 0 or c1 <= 0 or n <= 0:
        raise DomainError("delta_circle, c1 and n must be positive")
    z = roots.roots
    modulus = np.abs(z)
    on = np.abs(modulus - 1.0) <= delta_circle
    inside = (modulus < 1.0) & ~on
    band = c1 / n
    annulus = (modulus > 1.0 - band) & (modulus < 1.0 + band)
    real = np.abs(z.imag) <= delta_circle
    return ZeroClassification(
        n=n,
        degree=roots.degree,
        delta_circle=delta_circle,
        c1=c1,
        on_circle=int(on.sum()),
        annulus=int(annulus.sum()),
        inside=int(inside.sum()),
        outside=int(z.size - on.sum() - inside.sum()),
        real_zeros=int(real.sum()),
        real_locations=tuple(complex(v) for v in z[real]),
    )


def classify_sensitivity(
    roots: RootSet,
    n: int,
    delta_circle: float = DELTA_CIRCLE_DEFAULT,
    c1: float = 2.0,
    factors: tuple[float, ...] = (0.1, 1.0, 10.0),
) -> dict[float, ZeroClassification]:
    """:func:`classify` repeated at ``delta_circle * factor``."""
    return {fac: classify(roots, n, delta_circle * fac, c1) for fac in factors}


def root_labels(roots: RootSet, n: int, delta_circle: float, c1: float) -> list[str]:
    """Per-root class tag for CSV output: on_circle, annulus, inside or outside."""
    labels = []
    band = c1 / n
    for m in np.abs(roots.roots):
        if abs(m - 1.0) <= delta_circle:
            labels.append("on_circle")
        elif 1.0 - band < m < 1.0 + band:
            labels.append("annulus")
        else:
            labels.append("inside" if m < 1.0 else "outside")
    return labels


# ---------------------------------------------------------------------------
# Argument principle
# ---------------------------------------------------------------------------


def _arc_ok(va: np.ndarray, vm: np.ndarray, vb: np.ndarray) -> np.ndarray:
    floor = np.minimum(np.minimum(np.abs(va), np.abs(vm)), np.abs(vb))
    chord = np.abs(vm - 0.5 * (va + vb))
    with np.errstate(divide="ignore", invalid="ignore"):
        first = np.abs(np.angle(vm / va)) < np.pi / 2
        second = np.abs(np.angle(vb / vm)) < np.pi / 2
    return (floor > 0) & (floor >= 10.0 * chord) & first & second


def _winding(h: np.ndarray, radius: float, arcs: int) -> int:
    """Winding number of ``sum h_j e^{ijt}`` around 0 as t runs over [0, 2*pi]."""
    samples = grid_values(h, 2 * arcs)
    step = 2.0 * np.pi / arcs
    ta = np.arange(arcs) * step
    tb = ta + step
    va = samples[0::2]
    vm = samples[1::2]
    vb = np.roll(va, -1)
    total = 0.0
    for _ in range(_CONTOUR_DEPTH):
        ok = _arc_ok(va, vm, vb)
        total += float(np.sum(np.angle(vm[ok] / va[ok]) + np.angle(vb[ok] / vm[ok])))
        if ok.all():
            break
        ta, tb, va, vm, vb = ta[~ok], tb[~ok], va[~ok], vm[~ok], vb[~ok]
        tm = 0.5 * (ta + tb)
        quarter = np.concatenate((0.5 * (ta + tm), 0.5 * (tm + tb)))
        vq = evaluate_coefficients(h, np.exp(1j * quarter))
        ta, tb = np.concatenate((ta, tm)), np.concatenate((tm, tb))
        va, vm, vb = np.concatenate((va, vm)), vq, np.concatenate((vm, vb))
    else:
        raise ContourError(radius, (float(ta[0]), float(tb[0])))
    turns = total / (2.0 * np.pi)
    count = int(round(turns))
    if abs(turns - count) > 0.1:
        raise InvariantError(f"winding {turns:.6f} is not close to an integer")
    return count


def argument_principle_count(f: SignedPoly, rho: float, n_samples: int | None = None) -> int:
    """Number of zeros of *f* in the open disk ``|z| < rho``, counted with multiplicity.

    The contour is sampled by an FFT of the scaled coefficients; arcs whose
    argument increment or midpoint interpolation error is too large are
    bisected with the compensated evaluator.  A contour through or very
    near a zero raises :class:`ContourError`.
    """
    if rho <= 0:
        raise DomainError(f"radius must be positive, got {rho}")
    shift = f.low_order_zeros
    g = f.as_float()[shift:]
    e = g.size - 1
    if e == 0:
        return shift
    arcs = n_samples or next_power_of_two(max(64, 4 * (e + 1)))
    j = np.arange(e + 1, dtype=np.float64)
    if rho <= 1.0:
        return shift + _winding(g * rho**j, rho, arcs)
    # zeros of g outside rho are the zeros of the reversed polynomial inside 1/rho
    outside = _winding(g[::-1] * (1.0 / rho) ** j, rho, arcs)
    return shift + e - outside


# ---------------------------------------------------------------------------
# Sign-change machinery
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class _SignEvents:
    brackets: np.ndarray  # left sample index of a strict sign change between neighbours
    crossings: np.ndarray  # centre (fractional index) of a zero run with a sign change
    tangents: np.ndarray  # centre of a zero run without a sign change


def _sign_events(g: np.ndarray, zero_tol: float, circular: bool) -> _SignEvents:
    n = g.size
    nz = np.flatnonzero(np.abs(g) > zero_tol)
    if nz.size == 0:
        raise DomainError("samples vanish identically at the zero tolerance")
    left, right = nz[:-1], nz[1:]
    if circular:
        left = np.append(left, nz[-1])
        right = np.append(right, nz[0] + n)
    sign = np.sign(g)
    prod = sign[left] * sign[right % n]
    gap = right - left - 1
    centre = 0.5 * (left + right)
    if circular:
        centre = np.mod(centre, n)
    return _SignEvents(
        brackets=left[(gap == 0) & (prod < 0)],
        crossings=centre[(gap > 0) & (prod < 0)],
        tangents=centre[(gap > 0) & (prod > 0)],
    )


def _bisect(
    func: Callable[[np.ndarray], np.ndarray],
    lo: np.ndarray,
    hi: np.ndarray,
    tol: float = ANGLE_TOL,
) -> np.ndarray:
    """Vectorised bisection on brackets where *func* changes sign."""
    a = np.asarray(lo, dtype=np.float64).copy()
    b = np.asarray(hi, dtype=np.float64).copy()
    if a.size == 0:
        return a
    fa = func(a)
    for _ in range(80):
        if float(np.max(b - a)) <= tol:
            break
        m = 0.5 * (a + b)
        fm = func(m)
        same = np.sign(fm) == np.sign(fa)
        exact = fm == 0.0
        a = np.where(same | exact, m, a)
        b = np.where(same & ~exact, b, m)
        fa = np.where(same, fm, fa)
    return 0.5 * (a + b)


def _should_refine(refine: bool | None, size: int) -> bool:
    return size <= _REFINE_DEGREE_LIMIT if refine is None else refine


# ---------------------------------------------------------------------------
# Unimodular zeros of Fekete polynomials
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class UnimodularCount:
    """Sign changes of the real-valued rotation of ``f_p`` on the circle.

    ``count`` is a lower bound for the number of unimodular zeros;
    even-order contacts are listed in ``tangencies`` and are not part of it.
    """

    p: int
    n_grid: int
    count: int
    locations: tuple[float, ...]
    tangencies: tuple[float, ...]

    @property
    def fraction(self) -> float:
        return self.count / (self.p - 1)

    @property
    def with_tangencies(self) -> int:
        return self.count + 2 * len(self.tangencies)


def _rotated_part(fp: FeketePoly) -> Callable[[np.ndarray], np.ndarray]:
    c = fp.poly.as_float()
    support = np.flatnonzero(c)
    freq = support - fp.p / 2.0
    weight = c[support]
    kernel = np.cos if fp.reciprocity == "self" else np.sin

    def g(theta: np.ndarray) -> np.ndarray:
        theta = np.atleast_1d(np.asarray(theta, dtype=np.float64))
        out = np.empty(theta.shape)
        rows = max(1, _CHUNK_ELEMENTS // max(1, freq.size))
        for start in range(0, theta.size, rows):
            block = theta[start:start + rows]
            out[start:start + rows] = kernel(np.outer(block, freq)) @ weight
        return out

    return g


def unimodular_count_reciprocal(
    fp: FeketePoly,
    n_grid: int | None = None,
    *,
    refine: bool | None = None,
    detect_tangency: bool = True,
) -> UnimodularCount:
    """Count sign changes of ``g(t) = e^{-ipt/2} f_p(e^{it})`` (real or imaginary part).

    Reciprocity makes ``g`` purely real (p = 1 mod 4) or purely imaginary
    (p = 3 mod 4), so its sign changes are unimodular zeros of ``f_p``.
    The half-step grid never hits ``t = 0`` or ``t = pi``; the wrap uses
    ``g(t + 2 pi) = -g(t)``.  The count is exact once ``N >= 8p``.
    """
    p = fp.p
    n_grid = n_grid or next_power_of_two(8 * p)
    if n_grid < 4 * p:
        raise DomainError(f"grid size {n_grid} is below 4p = {4 * p}")
    theta = 2.0 * np.pi * (np.arange(n_grid) + 0.5) / n_grid
    values = grid_values(fp.poly.as_float(), n_grid, half_step=True) * np.exp(-0.5j * p * theta)
    g = values.real if fp.reciprocity == "self" else values.imag
    extended = np.append(g, -g[0])
    angles = np.append(theta, theta[0] + 2.0 * np.pi)
    zero_tol = 1e-12 * math.sqrt(p)
    events = _sign_events(extended, zero_tol, circular=False)
    step = 2.0 * np.pi / n_grid

    exact = _rotated_part(fp)
    lo = angles[events.brackets]
    if _should_refine(refine, p):
        located = _bisect(exact, lo, lo + step)
    else:
        located = lo + 0.5 * step
    crossing_angles = theta[0] + events.crossings * step
    locations = np.sort(np.mod(np.concatenate((located, crossing_angles)), 2.0 * np.pi))

    tangencies = list(theta[0] + events.tangents * step)
    if detect_tangency:
        tangencies.extend(_contact_points(exact, extended, angles, zero_tol, math.sqrt(p)))
    return UnimodularCount(
        p=p,
        n_grid=n_grid,
        count=int(events.brackets.size + events.crossings.size),
        locations=tuple(float(t) for t in locations),
        tangencies=_dedupe_angles(tangencies, step),
    )


def _contact_points(
    exact: Callable[[np.ndarray], np.ndarray],
    samples: np.ndarray,
    angles: np.ndarray,
    zero_tol: float,
    scale: float,
) -> list[float]:
    """Local minima of ``|g|`` between same-sign samples that reach zero."""
    pre = np.concatenate(([-samples[-2]], samples))  # g(theta_{-1}) = -g(theta_{N-1})
    mid = pre[1:-1]
    before, after = pre[:-2], pre[2:]
    absm = np.abs(mid)
    candidate = (
        (absm <= np.abs(before))
        & (absm <= np.abs(after))
        & (np.sign(before) == np.sign(mid))
        & (np.sign(after) == np.sign(mid))
        & (absm > zero_tol)
    )
    idx = np.flatnonzero(candidate)
    if idx.size == 0:
        return []
    step = angles[1] - angles[0]
    t, best = golden_section_max(lambda x: -np.abs(exact(x)), angles[idx] - step,
                                 angles[idx] + step)
    touching = -best <= 1e-9 * scale
    return [float(v) for v in t[touching]]


def _dedupe_angles(angles: list[float], step: float) -> tuple[float, ...]:
    if not angles:
        return ()
    wrapped = np.sort(np.mod(np.asarray(angles, dtype=np.float64), 2.0 * np.pi))
    keep = [wrapped[0]]
    for t in wrapped[1:]:
        if t - keep[-1] > step:
            keep.append(t)
    if len(keep) > 1 and keep[0] + 2.0 * np.pi - keep[-1] <= step:
        keep.pop()
    return tuple(float(t) for t in keep)


# ---------------------------------------------------------------------------
# Level crossings of R
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class CrossingReport:
    """Solutions of ``R(t) = eta * n`` in ``[0, 2 pi)``.

    ``count`` is the number of distinct solutions; tangential (even-order)
    contacts are counted in ``tangent`` and never in ``transversal``.
    """

    level: float
    n: int
    n_grid: int
    transversal: int
    tangent: int
    locations: tuple[float, ...]
    tangent_locations: tuple[float, ...]
    method: str = "grid+bisection"

    @property
    def count(self) -> int:
        return self.transversal + self.tangent

    @property
    def with_multiplicity(self) -> int:
        return self.transversal + 2 * self.tangent

    def row(self, k: int) -> tuple[int, float, int, int]:
        return (k, self.level, self.transversal, self.tangent)


def _extremum_contacts(
    R: CosinePoly, values: np.ndarray, slopes: np.ndarray, target: float, zero_tol: float
) -> list[float]:
    """Grid intervals where R' changes sign and the extremum of R touches *target*."""
    n_grid = values.size
    step = 2.0 * np.pi / n_grid
    g = values - target
    nxt = np.roll(g, -1)
    turn = np.sign(slopes) != np.sign(np.roll(slopes, -1))
    same = (np.sign(g) == np.sign(nxt)) & (np.abs(g) > zero_tol) & (np.abs(nxt) > zero_tol)
    idx = np.flatnonzero(turn & same)
    if idx.size == 0:
        return []
    prev = np.roll(g, 1)
    # parabola through three samples estimates the extremum value
    curv = prev[idx] - 2.0 * g[idx] + nxt[idx]
    with np.errstate(divide="ignore", invalid="ignore"):
        offset = np.where(curv != 0, 0.5 * (prev[idx] - nxt[idx]) / curv, 0.0)
    estimate = g[idx] - 0.25 * (prev[idx] - nxt[idx]) * offset
    scale = float(np.max(np.abs(values))) or 1.0
    idx = idx[np.abs(estimate) <= 1e-3 * scale]
    if idx.size == 0:
        return []
    lo = (idx - 1) * step
    hi = (idx + 2) * step
    t, best = golden_section_max(lambda x: -np.abs(R.evaluate(x) - target), lo, hi)
    touching = -best <= 1e-9 * scale
    return [float(v) for v in t[touching]]


def level_crossings(
    R: CosinePoly,
    eta: float,
    n: int,
    n_grid: int | None = None,
    *,
    refine: bool | None = None,
) -> CrossingReport:
    """Solutions of ``R(t) = eta n`` found from sign changes on an N-grid.

    Each strict sign change is refined by bisection to ``1e-12`` rad unless
    *refine* is false (default: refine when ``n <= 4096``).  Contacts show
    up either as zero runs on the grid or as sign changes of ``R'`` whose
    extremum reaches the level.  More than ``2 (n-1)`` solutions counted
    with multiplicity raises :class:`InvariantError`.
    """
    if not 0.0 < eta < 2.0:
        raise DomainError(f"level factor must lie in (0, 2), got {eta}")
    return _crossings_at(R, eta * n, n, n_grid, refine=refine, level=eta)


def _crossings_at(
    R: CosinePoly,
    target: float,
    n: int,
    n_grid: int | None,
    *,
    refine: bool | None,
    level: float,
) -> CrossingReport:
    n_grid = n_grid or next_power_of_two(16 * n)
    if n_grid < 16 * n:
        raise DomainError(f"grid size {n_grid} is below 16n = {16 * n}")
    values = R.grid(n_grid)
    slopes = R.derivative_grid(n_grid)
    g = values - target
    scale = max(1.0, float(np.max(np.abs(values))))
    zero_tol = 1e-12 * scale
    events = _sign_events(g, zero_tol, circular=True)
    step = 2.0 * np.pi / n_grid

    lo = events.brackets * step
    if _should_refine(refine, n):
        located = _bisect(lambda t: R.evaluate(t) - target, lo, lo + step)
    else:
        located = lo + 0.5 * step
    locations = np.sort(np.concatenate((located, events.crossings * step)))
    tangents = list(events.tangents * step)
    tangents.extend(_extremum_contacts(R, values, slopes, target, zero_tol))
    tangent_locations = _dedupe_angles(tangents, step)

    report = CrossingReport(
        level=level,
        n=n,
        n_grid=n_grid,
        transversal=int(locations.size),
        tangent=len(tangent_locations),
        locations=tuple(float(t) for t in locations),
        tangent_locations=tangent_locations,
    )
    cap = 2 * R.trig_degree
    if report.with_multiplicity > cap:
        raise InvariantError(
            f"{report.with_multiplicity} solutions of R = {target:g} exceed the cap 2(n-1) = {cap}"
        )
    return report


def level_crossings_near_n(
    R: CosinePoly, eta: float, n: int, n_grid: int | None = None, *, refine: bool | None = None
) -> CrossingReport:
    """Solutions of ``R(t) = (1 + eta) n`` for a small window ``|eta| < 2**-11``."""
    if abs(eta) >= 2.0**-11:
        raise DomainError(f"window parameter must satisfy |eta| < 2^-11, got {eta}")
    return _crossings_at(R, (1.0 + eta) * n, n, n_grid, refine=refine, level=1.0 + eta)


def crossing_upper_constant(k: int, eta: float, n_grid: int | None = None) -> float:
    """Empirical c in ``#solutions <= c sqrt(eta) n`` (eta <= 1) or ``c sqrt(2 - eta) n``."""
    pair = rudin_shapiro(k)
    report = level_crossings(modulus_squared(pair.p), eta, pair.n, n_grid, refine=False)
    width = math.sqrt(eta) if eta <= 1.0 else math.sqrt(2.0 - eta)
    return report.with_multiplicity / (width * pair.n)


# ---------------------------------------------------------------------------
# Sublevel sets and real-part zeros
# ---------------------------------------------------------------------------


def sublevel_measure(R: CosinePoly, alpha: float, n_grid: int | None = None) -> float:
    """Measure in radians of ``{t : R(t) <= alpha * max R}``.

    Every grid interval contributes the part where the linear interpolant
    lies below the level.
    """
    if not 0.0 < alpha <= 1.0:
        raise DomainError(f"alpha must lie in (0, 1], got {alpha}")
    n_grid = n_grid or next_power_of_two(16 * R.n)
    if n_grid < 16 * R.n:
        raise DomainError(f"grid size {n_grid} is below 16 * length = {16 * R.n}")
    top = R.sup(n_grid)
    g0 = R.grid(n_grid) - alpha * top
    g1 = np.roll(g0, -1)
    step = 2.0 * np.pi / n_grid
    below0, below1 = g0 <= 0, g1 <= 0
    frac = np.zeros(n_grid)
    frac[below0 & below1] = 1.0
    rising = below0 & ~below1
    falling = ~below0 & below1
    frac[rising] = -g0[rising] / (g1[rising] - g0[rising])
    frac[falling] = -g1[falling] / (g0[falling] - g1[falling])
    return float(step * np.sum(frac))


def _part_samples(f: SignedPoly, part: Part, n_grid: int | None) -> tuple[np.ndarray, int]:
    if part not in ("RE", "IM"):
        raise DomainError(f"part must be 'RE' or 'IM', got {part!r}")
    n_grid = n_grid or next_power_of_two(16 * len(f))
    if n_grid < 16 * len(f):
        raise DomainError(f"grid size {n_grid} is below 16 (deg + 1) = {16 * len(f)}")
    values = grid_values(f.as_float(), n_grid)
    return (values.real if part == "RE" else values.imag), n_grid


def realpart_zero_count(f: SignedPoly, part: Part, n_grid: int | None = None) -> int:
    """Sign changes of ``Re f(e^{it})`` or ``Im f(e^{it})`` over one period."""
    g, _ = _part_samples(f, part, n_grid)
    events = _sign_events(g, 1e-12 * f.square_sum(), circular=True)
    return int(events.brackets.size + events.crossings.size)


def realpart_zero_locations(f: SignedPoly, part: Part, n_grid: int | None = None) -> np.ndarray:
    """Bisection-refined angles of the sign changes counted by :func:`realpart_zero_count`."""
    g, n_grid = _part_samples(f, part, n_grid)
    events = _sign_events(g, 1e-12 * f.square_sum(), circular=True)
    step = 2.0 * np.pi / n_grid
    c = f.as_float()
    j = np.arange(c.size, dtype=np.float64)
    kernel = np.cos if part == "RE" else np.sin

    def exact(t: np.ndarray) -> np.ndarray:
        return kernel(np.outer(t, j)) @ c

    lo = events.brackets * step
    located = _bisect(exact, lo, lo + step)
    return np.sort(np.concatenate((located, events.crossings * step)))


# ---------------------------------------------------------------------------
# Audits
# ---------------------------------------------------------------------------

NEAREST_ZERO_ANCHOR = "R'(t0) >= c n^2 implies a zero of f within c4/n of e^{i t0}"
BERNSTEIN_ANCHOR = "|S'(a)| <= 5e sqrt(2n/r) max|S| when S has no zeros within r of a"
ROOT_OF_UNITY_ANCHOR = "max(|P_k(z_j)|^2, |P_k(z_{j+-1})|^2) >= gamma 2^{k+1} = 2 gamma n"
ZERO_DENSITY_ANCHOR = "S has at most e n r ||S|| / |S(t0)| zeros in [t0 - r, t0 + r]"


def implied_nearest_zero_constant(c: float) -> float:
    """Radius constant ``400 e^2 / c^2`` implied by the Bernstein-type inequality."""
    return 400.0 * math.e**2 / c**2


def nearest_zero_audit(
    f: SignedPoly,
    R: CosinePoly,
    c: float,
    roots: RootSet,
    *,
    n: int | None = None,
    n_grid: int | None = None,
    c4: float | None = None,
    k: int | None = None,
) -> AuditReport:
    """Every grid angle with ``R'(t0) >= c n^2`` must have a root within ``c4/n`` of ``e^{i t0}``.

    ``lhs`` is the empirical constant ``max n * dist``; ``rhs`` is the
    calibrated *c4* when given, otherwise :func:`implied_nearest_zero_constant`.
    """
    n = n or len(f)
    params = {"k": k if k is not None else "", "c": c, "n": n}
    if c4 is not None:
        params["c4"] = c4
    if not roots.converged:
        return AuditReport.inconclusive("nearest_zero", NEAREST_ZERO_ANCHOR, params,
                                        "root set not converged")
    n_grid = n_grid or next_power_of_two(16 * R.n)
    slopes = R.derivative_grid(n_grid)
    threshold = c * n * n * (1.0 - 1e-12)
    idx = np.flatnonzero(slopes >= threshold)
    rhs = c4 if c4 is not None else implied_nearest_zero_constant(c)
    if idx.size == 0:
        return AuditReport.upper("nearest_zero", NEAREST_ZERO_ANCHOR, params, 0.0, rhs,
                                 {"witnesses": 0, "empirical_c4": 0.0})
    angles = 2.0 * np.pi * idx / n_grid
    points = np.exp(1j * angles)
    dist = np.empty(points.size)
    rows = max(1, _CHUNK_ELEMENTS // max(1, roots.roots.size))
    for start in range(0, points.size, rows):
        block = points[start:start + rows]
        dist[start:start + rows] = np.min(np.abs(block[:, None] - roots.roots[None, :]), axis=1)
    worst = int(np.argmax(dist))
    lhs = float(n * dist[worst])
    return AuditReport.upper(
        "nearest_zero", NEAREST_ZERO_ANCHOR, params, lhs, rhs,
        {"witnesses": int(idx.size), "empirical_c4": lhs, "worst_angle": float(angles[worst])},
    )


def _sup_abs(S: CosinePoly, n_grid: int | None = None) -> float:
    return max(S.sup(n_grid), -CosinePoly(-S.a).sup(n_grid))


def bernstein_audit(
    S: CosinePoly, a: float, r: float, roots_of_S: RootSet, *, k: int | None = None
) -> AuditReport:
    """Bernstein-type bound at a zero-free point of ``S = |f|^2``.

    *roots_of_S* holds the roots of ``f``; the t-zeros of ``S`` are
    ``arg z - i log|z|`` and ``-arg z + i log|z|`` for every root ``z``.
    The disk of radius *r* about *a* must contain none of them, otherwise
    the report is inconclusive.
    """
    if not 0.0 < r <= 2.0:
        raise DomainError(f"radius must lie in (0, 2], got {r}")
    params = {"k": k if k is not None else "", "a": a, "r": r}
    if not roots_of_S.converged:
        return AuditReport.inconclusive("bernstein", BERNSTEIN_ANCHOR, params,
                                        "root set not converged")
    z = roots_of_S.roots[roots_of_S.roots != 0]
    arg, logmod = np.angle(z), np.log(np.abs(z))
    dx = np.concatenate((arg - a, -arg - a))
    dx = np.mod(dx + np.pi, 2.0 * np.pi) - np.pi
    dy = np.concatenate((-logmod, logmod))
    nearest = float(np.min(np.hypot(dx, dy))) if z.size else math.inf
    if nearest < r:
        return AuditReport.inconclusive("bernstein", BERNSTEIN_ANCHOR, params,
                                        "S has a zero inside the disk", {"nearest_zero": nearest})
    n = S.trig_degree
    slope = abs(float(S.derivative(a)[0]))
    bound = 5.0 * math.e * math.sqrt(2.0 * n / r) * _sup_abs(S) if n else 0.0
    ratio = slope / bound if bound else 0.0
    return AuditReport.upper("bernstein", BERNSTEIN_ANCHOR, params, slope, bound,
                             {"ratio": ratio, "nearest_zero": nearest})


def root_of_unity_floor(k: int) -> AuditReport:
    """Smallest ``max(|P(z_j)|^2, |P(z_{j+-1})|^2) / (2 gamma n)`` over even j."""
    if k < 1:
        raise DomainError(f"generation must be >= 1, got {k}")
    if k > 18:
        raise CapacityError(f"root_of_unity_floor supports k <= 18, got {k}")
    pair = rudin_shapiro(k)
    n = pair.n
    power = np.abs(grid_values(pair.p.as_float(), n)) ** 2
    even = np.arange(0, n, 2)
    up = np.maximum(power[even], power[(even + 1) % n])
    down = np.maximum(power[even], power[(even - 1) % n])
    floor = 2.0 * GAMMA * n
    ratio = float(np.minimum(up, down).min()) / floor
    return AuditReport.lower("root_of_unity_floor", ROOT_OF_UNITY_ANCHOR, {"k": k}, ratio, 1.0,
                             {"min_ratio": ratio, "even_indices": int(even.size)})


def zero_density_audit(
    R: CosinePoly, eta: float, n: int, n_grid: int | None = None, *, k: int | None = None
) -> AuditReport:
    """Zero counts of ``S = R - eta n`` in windows ``[t0 - r, t0 + r]`` against the density bound.

    Windows are centred at ``t0 = 2 pi j / n`` with ``r = 2 pi / n``;
    ``lhs`` is the largest ``count / bound`` and must not exceed 1.
    """
    params = {"k": k if k is not None else "", "eta": eta, "n": n}
    report = level_crossings(R, eta, n, n_grid, refine=None)
    zeros = np.sort(np.concatenate((np.asarray(report.locations),
                                    np.repeat(report.tangent_locations, 2))))
    target = eta * n
    norm = max(R.sup() - target, target + CosinePoly(-R.a).sup())
    r = 2.0 * np.pi / n
    centres = 2.0 * np.pi * np.arange(n) / n
    at_centres = R.evaluate(centres) - target
    usable = np.abs(at_centres) > 1e-12 * max(1.0, norm)
    if not usable.any():
        return AuditReport.inconclusive("zero_density", ZERO_DENSITY_ANCHOR, params,
                                        "S vanishes at every window centre")
    doubled = np.concatenate((zeros - 2.0 * np.pi, zeros, zeros + 2.0 * np.pi))
    c = centres[usable]
    counts = np.searchsorted(doubled, c + r, side="right") - np.searchsorted(doubled, c - r)
    bounds = math.e * R.trig_degree * r * norm / np.abs(at_centres[usable])
    ratios = counts / bounds
    worst = int(np.argmax(ratios))
    return AuditReport.upper(
        "zero_density", ZERO_DENSITY_ANCHOR, params, float(ratios[worst]), 1.0,
        {"windows": int(c.size), "max_count": int(counts.max()),
         "worst_centre": float(c[worst])},
    )


# ---------------------------------------------------------------------------
# Diagnostics
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ArcDiagnostics:
    """Arcs ``[2 pi (j-1)/n, 2 pi j/n)`` meeting ``{R <= gamma n}`` and carrying a steep slope."""

    n: int
    low_arcs: int
    steep_arcs: int
    both: int


def arc_diagnostics(R: CosinePoly, n: int, gamma: float = GAMMA) -> ArcDiagnostics:
    per_arc = 16
    n_grid = n * per_arc
    if n_grid & (n_grid - 1):
        raise DomainError(f"arc diagnostics need n to be a power of two, got {n}")
    values = R.grid(n_grid).reshape(n, per_arc)
    slopes = R.derivative_grid(n_grid).reshape(n, per_arc)
    low = np.any(values <= gamma * n, axis=1)
    steep = np.any(slopes >= gamma * n * n / (2.0 * np.pi), axis=1)
    return ArcDiagnostics(n, int(low.sum()), int(steep.sum()), int((low & steep).sum()))


@dataclass(frozen=True)
class DiskZeroStats:
    """Zeros of ``P_k``, ``Q_k`` and ``P_k Q_k`` inside the open unit disk."""

    k: int
    n: int
    inside_p: int
    inside_q: int
    delta_circle: float

    @property
    def inside_product(self) -> int:
        return self.inside_p + self.inside_q

    def fractions(self) -> dict[str, float]:
        return {
            "P": self.inside_p / self.n,
            "Q": self.inside_q / self.n,
            "PQ": self.inside_product / self.n,
        }


def disk_zero_statistics(k: int, delta_circle: float = DELTA_CIRCLE_DEFAULT) -> DiskZeroStats:
    n = 1 << k
    counts = []
    for which in ("P", "Q"):
        cls = classify(rudin_shapiro_roots(k, which), n, delta_circle)
        counts.append(cls.inside)
    return DiskZeroStats(k, n, counts[0], counts[1], delta_circle)
