"""Autocorrelation profiles of the Rudin-Shapiro polynomials and their growth."""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from littlewood_lab.errors import DomainError
from littlewood_lab.eval_engine import modulus_squared
from littlewood_lab.poly_core import K_MAX_DEFAULT, rudin_shapiro

UPPER_EXPONENT = 0.8190
LOWER_EXPONENT = 0.73
# Constant/exponent pair of the earlier, incompletely justified upper bound;
# reported as a reference line only.
CLAIMED_CONSTANT = 3.2134
CLAIMED_EXPONENT = 0.7303
CSV_COLUMNS = ("k", "n", "max_abs", "argmax_j", "l2")


@dataclass(frozen=True)
class AutocorrProfile:
    k: int
    n: int
    max_abs: int
    argmax_j: int
    l2: int
    sum_all: int

    def row(self) -> tuple[int, int, int, int, int]:
        return (self.k, self.n, self.max_abs, self.argmax_j, self.l2)


@dataclass(frozen=True)
class PowerLawFit:
    slope: float
    intercept: float
    half_width: float
    residual: float
    points: int


def profile_from_coefficients(k: int, a: np.ndarray) -> AutocorrProfile:
    """Build a profile from integer autocorrelations ``a_0..a_{n-1}``."""
    tail = np.abs(a[1:])
    if tail.size:
        argmax = int(np.argmax(tail)) + 1
        max_abs = int(tail[argmax - 1])
    else:
        argmax, max_abs = 0, 0
    return AutocorrProfile(
        k=k,
        n=int(a.size),
        max_abs=max_abs,
        argmax_j=argmax,
        l2=int(np.dot(a[1:], a[1:])),
        sum_all=int(a[0] + 2 * np.sum(a[1:])),
    )


def autocorr_profile(k: int, k_max: int = K_MAX_DEFAULT) -> AutocorrProfile:
    """Profile of ``|P_k(e^{it})|**2``: max |a_j| (j >= 1), its first index and sum a_j**2."""
    pair = rudin_shapiro(k, k_max=k_max)
    return profile_from_coefficients(k, modulus_squared(pair.p).a)


def autocorr_profiles(
    ks: Iterable[int], threads: int = 1, k_max: int = K_MAX_DEFAULT
) -> list[AutocorrProfile]:
    """Profiles for several generations; order follows *ks* for any thread count."""
    ks = list(ks)
    if threads <= 1:
        return [autocorr_profile(k, k_max) for k in ks]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(lambda k: autocorr_profile(k, k_max), ks))


def fit_power_law(ns: Sequence[float], values: Sequence[float]) -> PowerLawFit:
    """Unweighted least squares of ``log(values)`` against ``log(ns)``.

    ``half_width`` is twice the slope's standard error (zero for an exact fit
    or two points); ``residual`` is the RMS of the log residuals.
    """
    x = np.log(np.asarray(ns, dtype=np.float64))
    y = np.log(np.asarray(values, dtype=np.float64))
    if x.size < 2 or np.ptp(x) == 0.0:
        raise DomainError("power-law fit needs at least two distinct abscissae")
    design = np.vstack([x, np.ones_like(x)]).T
    (slope, intercept), *_ = np.linalg.lstsq(design, y, rcond=None)
    resid = y - (slope * x + intercept)
    rms = float(np.sqrt(np.mean(resid**2)))
    half = 0.0
    if x.size > 2:
        sigma2 = float(np.sum(resid**2)) / (x.size - 2)
        half = 2.0 * math.sqrt(sigma2 / float(np.sum((x - x.mean()) ** 2)))
    return PowerLawFit(float(slope), float(intercept), half, rms, int(x.size))


def growth_exponent(k_range: range | Sequence[int], threads: int = 1) -> PowerLawFit:
    """Fitted exponent of ``max_abs`` against ``n = 2**k`` over an inclusive k range."""
    ks = list(k_range)
    if len(ks) < 5:
        raise DomainError(f"growth_exponent needs at least 5 generations, got {len(ks)}")
    profiles = autocorr_profiles(ks, threads=threads)
    return fit_power_law([p.n for p in profiles], [p.max_abs for p in profiles])


def calibrate_constant(
    profiles: Iterable[AutocorrProfile], exponent: float = UPPER_EXPONENT
) -> float:
    """``C = max max_abs / n**exponent`` over the calibration profiles."""
    ratios = [p.max_abs / p.n**exponent for p in profiles if p.k >= 1]
    if not ratios:
        raise DomainError("no calibration profiles with k >= 1")
    return max(ratios)
