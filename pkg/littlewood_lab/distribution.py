"""Value distribution of Rudin-Shapiro polynomials and random Littlewood ensembles."""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Any, Literal

import numpy as np

from littlewood_lab.errors import DomainError, InvariantError
from littlewood_lab.eval_engine import grid_values, next_power_of_two
from littlewood_lab.norms import mahler_quadrature, mq_norm
from littlewood_lab.poly_core import littlewood_from_signs, rudin_shapiro

ALPHA_POINTS = 1024
MAX_CELLS = 64
MIN_SAMPLES = 100
MAHLER_LIMIT = math.exp(-np.euler_gamma / 2.0)

Family = Literal["SAFFARI_CDF", "MONTGOMERY_CELLS"]


@dataclass(frozen=True)
class DiscrepancyReport:
    k: int
    n_grid: int
    sup_dev: float
    family: Family
    cells: str
    detail: dict[str, Any] = field(default_factory=dict)

    def row(self) -> tuple[int, int, str, float]:
        return (self.k, self.n_grid, self.family, self.sup_dev)


@dataclass(frozen=True)
class EnsembleEstimate:
    n: int
    q: float
    samples: int
    mean: float
    std_err: float
    seed: int
    limit: float = float("nan")

    @property
    def z_score(self) -> float:
        """Distance of the mean from the limit in standard errors."""
        if self.std_err == 0.0:
            return 0.0 if self.mean == self.limit else math.inf
        return abs(self.mean - self.limit) / self.std_err

    def row(self) -> tuple[int, float, int, float, float, float, int]:
        return (self.n, self.q, self.samples, self.mean, self.std_err, self.limit, self.seed)


def alpha_grid() -> np.ndarray:
    """``(i + 1) / 1024`` for ``i = 0..1023``; the grid error of every CDF is at most 1/1024."""
    return np.arange(1, ALPHA_POINTS + 1, dtype=np.float64) / ALPHA_POINTS


def _check_grid(k: int, n_grid: int) -> None:
    if n_grid < 16 * (1 << k):
        raise DomainError(f"grid size {n_grid} is below 16 * 2^k = {16 * (1 << k)}")


def _normalized_values(k: int, n_grid: int) -> tuple[np.ndarray, np.ndarray]:
    """``P_k(e^{it}) / sqrt(2^{k+1})`` and the same for ``Q_k`` on the N-grid."""
    pair = rudin_shapiro(k)
    scale = 1.0 / math.sqrt(2.0 * pair.n)
    return (
        grid_values(pair.p.as_float(), n_grid) * scale,
        grid_values(pair.q.as_float(), n_grid) * scale,
    )


def _unit_power(w: np.ndarray) -> np.ndarray:
    power = w.real**2 + w.imag**2
    top = float(power.max())
    if top > 1.0 + 1e-9:
        raise InvariantError(f"normalized |P|^2 reached {top:.12g} > 1")
    return np.minimum(power, 1.0)


def empirical_cdf(power: np.ndarray, alphas: np.ndarray) -> np.ndarray:
    """Fraction of samples with value ``<= alpha`` for every alpha."""
    ordered = np.sort(power)
    return np.searchsorted(ordered, alphas, side="right") / ordered.size


def saffari_discrepancy(k: int, n_grid: int | None = None) -> DiscrepancyReport:
    """Largest gap between the empirical CDF of ``|P_k|^2 / 2^{k+1}`` and the uniform CDF.

    The CDF is read on the 1024-point alpha grid; the reported value is the
    larger of the P and Q discrepancies.
    """
    n_grid = n_grid or next_power_of_two(16 * (1 << k))
    _check_grid(k, n_grid)
    alphas = alpha_grid()
    wp, wq = _normalized_values(k, n_grid)
    devs = {}
    for name, w in (("P", wp), ("Q", wq)):
        cdf = empirical_cdf(_unit_power(w), alphas)
        devs[name] = float(np.max(np.abs(cdf - alphas)))
    return DiscrepancyReport(
        k=k,
        n_grid=n_grid,
        sup_dev=max(devs.values()),
        family="SAFFARI_CDF",
        cells=f"alpha grid of {ALPHA_POINTS} points",
        detail={"sup_dev_p": devs["P"], "sup_dev_q": devs["Q"], "grid_error": 1.0 / ALPHA_POINTS},
    )


def _cell_fractions(w: np.ndarray, angular: int, radial: int) -> np.ndarray:
    """Fractions of samples in equal-area polar cells (ring ``i`` spans radii ``sqrt(i/M_r)``)."""
    power = _unit_power(w)
    ring = np.minimum((power * radial).astype(np.int64), radial - 1)
    theta = np.mod(np.angle(w), 2.0 * np.pi)
    sector = np.minimum((theta / (2.0 * np.pi) * angular).astype(np.int64), angular - 1)
    counts = np.bincount(ring * angular + sector, minlength=radial * angular)
    return counts.reshape(radial, angular) / w.size


def montgomery_discrepancy(
    k: int, n_grid: int | None = None, cells: tuple[int, int] = (16, 16)
) -> DiscrepancyReport:
    """Largest gap between cell occupancy of ``P_k / sqrt(2^{k+1})`` and ``area / pi``.

    *cells* is ``(angular, radial)``; every cell has area ``pi / (M_a M_r)``.
    The radial marginal, which must match the Saffari CDF at ``alpha = i / M_r``,
    is kept in ``detail``.
    """
    angular, radial = cells
    if not (1 <= angular <= MAX_CELLS and 1 <= radial <= MAX_CELLS):
        raise DomainError(f"cell grid {angular}x{radial} exceeds {MAX_CELLS}x{MAX_CELLS}")
    n_grid = n_grid or next_power_of_two(16 * (1 << k))
    _check_grid(k, n_grid)
    limit = 1.0 / (angular * radial)
    wp, wq = _normalized_values(k, n_grid)
    devs = {}
    marginals = {}
    for name, w in (("P", wp), ("Q", wq)):
        frac = _cell_fractions(w, angular, radial)
        devs[name] = float(np.max(np.abs(frac - limit)))
        marginals[name] = np.cumsum(frac.sum(axis=1)).tolist()
    return DiscrepancyReport(
        k=k,
        n_grid=n_grid,
        sup_dev=max(devs.values()),
        family="MONTGOMERY_CELLS",
        cells=f"{angular}x{radial} equal-area polar cells",
        detail={
            "sup_dev_p": devs["P"],
            "sup_dev_q": devs["Q"],
            "radial_cdf_p": marginals["P"],
            "radial_cdf_q": marginals["Q"],
        },
    )


# ---------------------------------------------------------------------------
# Random Littlewood ensembles
# ---------------------------------------------------------------------------


def moment_limit(q: float) -> float:
    """Limit of ``E M_q(f)^q / n^{q/2}`` over random Littlewood polynomials.

    ``q = 0`` selects the Mahler limit ``e^{-gamma/2}``.
    """
    return MAHLER_LIMIT if q == 0 else math.gamma(1.0 + q / 2.0)


def norm_limit(q: float) -> float:
    """Limit of ``E M_q(f) / n^{1/2}``."""
    return MAHLER_LIMIT if q == 0 else math.gamma(1.0 + q / 2.0) ** (1.0 / q)


def sample_rng(seed: int, index: int) -> np.random.Generator:
    """Independent Philox stream for sample *index*."""
    return np.random.Generator(np.random.Philox(np.random.SeedSequence(seed, spawn_key=(index,))))


def _sample_norm(n: int, q: float, seed: int, index: int) -> float:
    """``M_q(f) / n^{1/2}`` for the *index*-th random sign vector."""
    signs = sample_rng(seed, index).integers(0, 2, size=n) * 2 - 1
    f = littlewood_from_signs(signs)
    if q == 0:
        value = mahler_quadrature(f, next_power_of_two(64 * n), estimate_error=False).value
    else:
        value = mq_norm(f, q, next_power_of_two(8 * n), estimate_error=False).value
    return value / math.sqrt(n)


def _draw(n: int, q: float, samples: int, seed: int, threads: int) -> np.ndarray:
    if samples < MIN_SAMPLES:
        raise DomainError(f"ensemble needs at least {MIN_SAMPLES} samples, got {samples}")
    if n < 1:
        raise DomainError(f"polynomial length must be positive, got {n}")
    if q < 0:
        raise DomainError(f"exponent must be >= 0, got {q}")
    indices = range(samples)
    if threads <= 1:
        values = [_sample_norm(n, q, seed, i) for i in indices]
    else:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            values = list(pool.map(lambda i: _sample_norm(n, q, seed, i), indices))
    return np.asarray(values, dtype=np.float64)


def _estimate(values: np.ndarray, n: int, q: float, seed: int, limit: float) -> EnsembleEstimate:
    return EnsembleEstimate(
        n=n,
        q=q,
        samples=int(values.size),
        mean=float(np.mean(values)),
        std_err=float(np.std(values, ddof=1) / math.sqrt(values.size)),
        seed=seed,
        limit=limit,
    )


def ensemble_mean(n: int, q: float, samples: int, seed: int, threads: int = 1) -> EnsembleEstimate:
    """Mean of ``M_q(f)^q / n^{q/2}`` over seeded random Littlewood polynomials of length *n*.

    ``q = 0`` selects the Mahler variant ``M_0(f) / n^{1/2}``.  Samples are
    reduced in index order, so the result does not depend on *threads*.
    """
    norms = _draw(n, q, samples, seed, threads)
    values = norms if q == 0 else norms**q
    return _estimate(values, n, q, seed, moment_limit(q))


def ensemble_norm_mean(
    n: int, q: float, samples: int, seed: int, threads: int = 1
) -> EnsembleEstimate:
    """Mean of ``M_q(f) / n^{1/2}``; tends to ``Gamma(1 + q/2)^{1/q}``."""
    return _estimate(_draw(n, q, samples, seed, threads), n, q, seed, norm_limit(q))
