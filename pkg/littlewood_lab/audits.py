"""Audit registry: auto-discovers every ``audit_*`` function in this module.

Each audit takes a :class:`RunConfig` and a :class:`Calibration` and
returns a list of :class:`AuditReport`; the registry key is the function
name without its prefix.
"""

from __future__ import annotations

import inspect
import math
import re
import sys
from typing import Any, Callable

import numpy as np

from littlewood_lab.autocorr import (
    CLAIMED_CONSTANT,
    CLAIMED_EXPONENT,
    UPPER_EXPONENT,
    AutocorrProfile,
    autocorr_profiles,
    calibrate_constant,
    fit_power_law,
)
from littlewood_lab.config import Calibration, RunConfig
from littlewood_lab.distribution import (
    MAHLER_LIMIT,
    alpha_grid,
    ensemble_mean,
    montgomery_discrepancy,
    saffari_discrepancy,
)
from littlewood_lab.errors import ContourError, DomainError, InvariantError, LabError
from littlewood_lab.eval_engine import (
    autocorrelation_direct,
    autocorrelation_fft,
    grid_values,
    modulus_squared,
)
from littlewood_lab.norms import (
    m4_fourth_power_exact,
    m4_fourth_power_quadrature,
    m4_ratio,
    mahler_jensen,
    mahler_quadrature,
    mq_norm,
)
from littlewood_lab.poly_core import (
    check_fekete_reciprocity,
    fekete,
    rudin_shapiro,
    rudin_shapiro_member,
    substitute_negative,
)
from littlewood_lab.report import AuditReport
from littlewood_lab.zeros import (
    GAMMA,
    NEAREST_ZERO_ANCHOR,
    RootSet,
    ZeroClassification,
    arc_diagnostics,
    argument_principle_count,
    bernstein_audit,
    classify,
    classify_sensitivity,
    crossing_upper_constant,
    disk_zero_statistics,
    level_crossings,
    level_crossings_near_n,
    nearest_zero_audit,
    realpart_zero_count,
    root_of_unity_floor,
    rudin_shapiro_roots,
    sublevel_measure,
    unimodular_count_reciprocal,
    zero_density_audit,
)

AuditFunc = Callable[[RunConfig, Calibration], list[AuditReport]]

_PREFIX = "audit_"
ROOT_K_MAX = 12
KAPPA_REFERENCE = 0.5007
UNCALIBRATED = "constant not calibrated"

# Pilot ranges for the frozen constants; each lies below the generations it is audited on.
AUTOCORR_PILOT_K = 10
ANNULUS_PILOT_KS = (6, 7)
ANNULUS_SLACK = 0.5
NEAREST_PILOT_KS = (5, 7)
NEAREST_SLACK = 1.1


def _params(**kwargs: Any) -> dict[str, Any]:
    return {k: v for k, v in kwargs.items() if v is not None}


# ── Norm identities ──────────────────────────────────────────────────────


def audit_parallelogram(cfg: RunConfig, cal: Calibration) -> list[AuditReport]:
    """``|P_k|^2 + |Q_k|^2 = 2n`` on the grid, to ``1e-6 * 2n``."""
    anchor = "|P_k|^2 + |Q_k|^2 = 2^{k+1} = 2n"
    out = []
    for k in cfg.ks(hi=14):
        pair = rudin_shapiro(k)
        n_grid = cfg.grid_for(pair.n)
        total = (np.abs(grid_values(pair.p.as_float(), n_grid)) ** 2
                 + np.abs(grid_values(pair.q.as_float(), n_grid)) ** 2)
        dev = float(np.max(np.abs(total - 2 * pair.n)))
        out.append(AuditReport.upper("parallelogram", anchor, _params(k=k, n_grid=n_grid),
                                     dev, 1e-6 * 2 * pair.n))
    return out


def audit_parseval(cfg: RunConfig, cal: Calibration) -> list[AuditReport]:
    """Relative error of the quadrature ``M_2(P_k)`` against ``2^{k/2}``."""
    anchor = "M_2(P_k) = 2^{k/2}"
    out = []
    for k in cfg.ks(hi=18):
        pair = rudin_shapiro(k)
        value = mq_norm(pair.p, 2.0, cfg.grid_for(pair.n), estimate_error=False).value
        rel = abs(value - 2.0 ** (k / 2)) / 2.0 ** (k / 2)
        out.append(AuditReport.upper("parseval", anchor, _params(k=k), rel, cfg.quadrature_tol))
    return out


def audit_mirror(cfg: RunConfig, cal: Calibration) -> list[AuditReport]:
    """``||Q_k(-z)| - |P_k(z)||`` on the grid stays below ``1e-8 * 2^{k/2}`` for ``k <= 14``."""
    anchor = "|Q_k(-z)| = |P_k(z)| on |z| = 1"
    out = []
    for k in cfg.ks(hi=14):
        pair = rudin_shapiro(k)
        n_grid = cfg.grid_for(pair.n)
        p = np.abs(grid_values(pair.p.as_float(), n_grid))
        q = np.abs(grid_values(substitute_negative(pair.q).as_float(), n_grid))
        dev = float(np.max(np.abs(q - p)))
        out.append(AuditReport.upper("mirror", anchor, _params(k=k, n_grid=n_grid),
                                     dev, 1e-8 * 2.0 ** (k / 2)))
    return out


def audit_m4(cfg: RunConfig, cal: Calibration) -> list[AuditReport]:
    """``|m4_ratio(k) - 1| <= 2^{1-k}``.

    For ``k <= 6`` the grid quadrature must also reproduce the integer value.
    """
    anchor = "M_4(P_k) ~ (4^{k+1}/3)^{1/4}"
    out = []
    for k in cfg.ks(lo=2, hi=18):
        ratio = m4_ratio(k)
        detail = {"ratio": ratio}
        if k <= 6:
            p = rudin_shapiro(k).p
            exact = m4_fourth_power_exact(p)
            quad = m4_fourth_power_quadrature(p)
            detail["quadrature"] = quad
            out.append(AuditReport.upper("m4_oracle", anchor, _params(k=k),
                                         abs(round(quad) - exact), 0, {"exact": exact}))
        out.append(AuditReport.upper("m4", anchor, _params(k=k), abs(ratio - 1.0),
                                     2.0 ** (1 - k), detail))
    return out


# ── Autocorrelations ─────────────────────────────────────────────────────


def audit_autocorr_oracle(cfg: RunConfig, cal: Calibration) -> list[AuditReport]:
    """FFT autocorrelations equal the direct convolution exactly for ``k <= 10``."""
    anchor = "a_j = sum_m c_m c_{m+j}"
    out = []
    for k in cfg.ks(hi=10):
        p = rudin_shapiro(k).p
        mismatches = int(np.count_nonzero(autocorrelation_fft(p) != autocorrelation_direct(p)))
        out.append(AuditReport.upper("autocorr_oracle", anchor, _params(k=k), mismatches, 0))
    return out


def audit_autocorr_growth(cfg: RunConfig, cal: Calibration) -> list[AuditReport]:
    """Fitted exponent of ``max |a_j|`` over ``k = 8..18`` lies in ``[0.70, 0.85]``."""
    anchor = "C n^{0.73} <= max_j |a_j| <= C n^{0.8190}"
    ks = cfg.ks(lo=8, hi=18)
    params = _params(k=f"{ks[0]}..{ks[-1]}" if ks else None)
    if len(ks) < 5:
        return [AuditReport.inconclusive("autocorr_growth", anchor, params,
                                         "fewer than 5 generations in k_range")]
    profiles = autocorr_profiles(ks, threads=cfg.threads)
    fit = fit_power_law([p.n for p in profiles], [p.max_abs for p in profiles])
    out = [AuditReport.within(
        "autocorr_growth", anchor, params, fit.slope, 0.70, 0.85,
        {"half_width": fit.half_width, "residual": fit.residual,
         "reference_constant": CLAIMED_CONSTANT, "reference_exponent": CLAIMED_EXPONENT},
    )]
    out.append(_autocorr_constant_report(anchor, profiles, cal))
    return out


def _autocorr_constant_report(anchor: str, profiles: list[AutocorrProfile],
                              cal: Calibration) -> AuditReport:
    """``max_abs / n^{0.8190}`` above the calibration range against the frozen ``C``."""
    # five generations from k >= 8 always reach past the pilot range
    checked = [p for p in profiles if p.k > AUTOCORR_PILOT_K]
    params = _params(k=f"{checked[0].k}..{checked[-1].k}")
    if cal.autocorr_constant is None:
        return AuditReport.inconclusive("autocorr_constant", anchor, params, UNCALIBRATED)
    ratios = [p.max_abs / p.n**UPPER_EXPONENT for p in checked]
    return AuditReport.upper("autocorr_constant", anchor, params, max(ratios),
                             cal.autocorr_constant,
                             {"ratios": ratios, "pilot_k_max": AUTOCORR_PILOT_K})


# ── Zeros ────────────────────────────────────────────────────────────────


def audit_fekete_reciprocity(cfg: RunConfig, cal: Calibration) -> list[AuditReport]:
    """Coefficientwise reciprocity of each Fekete polynomial."""
    anchor = "z^p f_p(1/z) = (-1|p) f_p(z)"
    return [
        AuditReport.upper("fekete_reciprocity", anchor, _params(p=p),
                          0 if check_fekete_reciprocity(fekete(p)) else 1, 0)
        for p in cfg.primes
    ]


def audit_fekete_unimodular(cfg: RunConfig, cal: Calibration) -> list[AuditReport]:
    """Sign-change fraction of each Fekete polynomial in ``[0.49, 0.52]``; mean near 0.5007."""
    anchor = "f_p has ~ kappa_0 p zeros on the unit circle, 0.500668 < kappa_0 < 0.500813"
    out = []
    fractions = []
    for p in cfg.primes:
        result = unimodular_count_reciprocal(fekete(p), refine=False, detect_tangency=False)
        fractions.append(result.fraction)
        out.append(AuditReport.within("fekete_unimodular", anchor, _params(p=p), result.fraction,
                                      0.49, 0.52, {"count": result.count}))
    if len(fractions) >= 2 and min(cfg.primes) >= 1000:
        mean = float(np.mean(fractions))
        out.append(AuditReport.upper("fekete_unimodular_mean", anchor,
                                     _params(primes=list(cfg.primes)),
                                     abs(mean - KAPPA_REFERENCE), 0.005, {"mean": mean}))
    return out


def roots_for(cfg: RunConfig, k: int, which: str) -> RootSet:
    """Cached roots of ``P_k`` or ``Q_k`` at ``root_tol * M_2``."""
    return rudin_shapiro_roots(k, which, cfg.root_tol * math.sqrt(1 << k))


def _classifications(cfg: RunConfig, k: int, which: str, cal: Calibration) -> ZeroClassification:
    roots = roots_for(cfg, k, which)
    return classify(roots, 1 << k, cfg.delta_circle, cfg.c1)


def audit_real_zeros(cfg: RunConfig, cal: Calibration) -> list[AuditReport]:
    """``P_k`` and ``Q_k`` have exactly one real zero."""
    anchor = "P_k and Q_k have exactly one real zero"
    out = []
    for k in cfg.ks(lo=1, hi=ROOT_K_MAX):
        for which in ("P", "Q"):
            cls = _classifications(cfg, k, which, cal)
            out.append(AuditReport.upper(
                "real_zeros", anchor, _params(k=k, member=which), abs(cls.real_zeros - 1), 0,
                {"real_zeros": cls.real_zeros,
                 "locations": [[z.real, z.imag] for z in cls.real_locations]},
            ))
    return out


def audit_on_circle_decay(cfg: RunConfig, cal: Calibration) -> list[AuditReport]:
    """``on_circle(k)/n`` does not grow with k beyond one count of noise."""
    anchor = "P_k has o(n) zeros on the unit circle"
    ks = cfg.ks(lo=6, hi=ROOT_K_MAX)
    out = []
    previous = None
    for k in ks:
        roots = roots_for(cfg, k, "P")
        sens = classify_sensitivity(roots, 1 << k, cfg.delta_circle, cfg.c1)
        frac = sens[1.0].on_circle_fraction
        if previous is not None:
            out.append(AuditReport.upper(
                "on_circle_decay", anchor, _params(k=k), frac, previous + 1.0 / (1 << k),
                {"on_circle": sens[1.0].on_circle,
                 "sensitivity": {str(f): c.on_circle for f, c in sens.items()}},
            ))
        previous = frac
    return out


def audit_annulus_scaling(cfg: RunConfig, cal: Calibration) -> list[AuditReport]:
    """Annulus counts roughly double per generation and ``count/n`` stays within a factor 2."""
    anchor = "P_k has at least c_2 n zeros in 1 - c_1/n < |z| < 1 + c_1/n"
    ks = cfg.ks(lo=8, hi=11)
    counts = {k: _classifications(cfg, k, "P", cal).annulus for k in ks}
    out = []
    for k in ks[1:]:
        ratio = counts[k] / counts[k - 1] if counts[k - 1] else math.inf
        out.append(AuditReport.within("annulus_scaling", anchor, _params(k=k, c1=cfg.c1),
                                      ratio, 1.6, 2.4, {"count": counts[k]}))
    if ks:
        c2 = [counts[k] / (1 << k) for k in ks]
        spread = max(c2) / min(c2) if min(c2) > 0 else math.inf
        out.append(AuditReport.upper("annulus_c2_stability", anchor, _params(c1=cfg.c1),
                                     spread, 2.0, {"c2": c2}))
        if cal.c2 is None:
            out.append(AuditReport.inconclusive("annulus_c2", anchor, _params(c1=cfg.c1),
                                                UNCALIBRATED))
        else:
            out.append(AuditReport.lower("annulus_c2", anchor, _params(c1=cfg.c1), min(c2),
                                         cal.c2, {"pilot_k": list(ANNULUS_PILOT_KS)}))
    return out


def audit_cross_oracle(cfg: RunConfig, cal: Calibration) -> list[AuditReport]:
    """Argument-principle band counts match the root finder; Jensen matches quadrature."""
    anchor = "M_0(f) = |a_n| prod max(1, |z_j|)"
    out = []
    for k in cfg.ks(lo=1, hi=10):
        for which in ("P", "Q"):
            roots = roots_for(cfg, k, which)
            f = rudin_shapiro(k).p if which == "P" else rudin_shapiro(k).q
            for rho in (0.9, 1.1):
                params = _params(k=k, member=which, rho=rho)
                try:
                    counted = argument_principle_count(f, rho)
                except ContourError as exc:
                    out.append(AuditReport.inconclusive("argument_principle", anchor, params,
                                                        str(exc)))
                    continue
                out.append(AuditReport.upper("argument_principle", anchor, params,
                                             abs(counted - roots.count_inside(rho)), 0))
            jensen = mahler_jensen(roots, f.leading).value
            quad = mahler_quadrature(f, 1 << 20, estimate_error=False).value
            out.append(AuditReport.upper("mahler_routes", anchor, _params(k=k, member=which),
                                         abs(jensen - quad) / jensen, 1e-6,
                                         {"jensen": jensen, "quadrature": quad}))
    return out


def audit_sublevel(cfg: RunConfig, cal: Calibration) -> list[AuditReport]:
    """Sublevel measure of ``R_k`` against ``(sqrt(alpha)/e) (zeros/n)``, in radians.

    The ``fraction of 2 pi`` reading is reported alongside in ``detail``.
    """
    anchor = "|{t : R_k(t) <= alpha max R_k}| >= (sqrt(alpha)/e) (zeros/n)"
    out = []
    for k in cfg.ks(lo=1, hi=ROOT_K_MAX):
        n = 1 << k
        zeros_on = _classifications(cfg, k, "P", cal).on_circle
        R = modulus_squared(rudin_shapiro(k).p)
        for alpha in cfg.alphas:
            measure = sublevel_measure(R, alpha, cfg.grid_for(n))
            bound = math.sqrt(alpha) / math.e * zeros_on / n
            out.append(AuditReport.lower(
                "sublevel", anchor, _params(k=k, alpha=alpha), measure, bound,
                {"fraction_reading_holds": measure / (2 * math.pi) >= bound,
                 "on_circle": zeros_on},
            ))
    return out


def audit_realpart_zeros(cfg: RunConfig, cal: Calibration) -> list[AuditReport]:
    """Re and Im of ``P_k`` and ``Q_k`` have at least ``c n`` zeros.

    One report per function: ``count/n`` stays within a factor 2 over k = 8..14.
    """
    anchor = "Re and Im of P_k(e^{it}), Q_k(e^{it}) have at least c n zeros"
    ks = cfg.ks(lo=8, hi=14)
    if not ks:
        return []
    out = []
    for which in ("P", "Q"):
        for part in ("RE", "IM"):
            ratios = [realpart_zero_count(rudin_shapiro_member(k, which), part,
                                          cfg.grid_for(1 << k)) / (1 << k) for k in ks]
            spread = max(ratios) / min(ratios) if min(ratios) > 0 else math.inf
            out.append(AuditReport.upper(
                "realpart_zeros", anchor,
                _params(k=f"{ks[0]}..{ks[-1]}", member=which, part=part),
                spread, 2.0, {"c": ratios},
            ))
    return out


def _rs_crossings(k: int, eta: float, cfg: RunConfig):
    pair = rudin_shapiro(k)
    R = modulus_squared(pair.p, verify=False)
    return level_crossings(R, eta, pair.n, cfg.grid_for(pair.n), refine=False)


def audit_crossings(cfg: RunConfig, cal: Calibration) -> list[AuditReport]:
    """Crossing counts of ``R_k = eta n`` against the lower bounds on both sides of the range.

    Exceeding the cap ``2(n-1)`` is reported as a failed ``crossing_cap``.
    """
    anchor = "R_k(t) = eta n has at least (1-eps) eta n/2 distinct solutions"
    out = []
    eps = 0.1
    upper_eta = 2.0 - GAMMA / 2
    for k in cfg.ks(lo=12, hi=16):
        n = 1 << k
        for eta in (*cfg.etas, upper_eta):
            params = _params(k=k, eta=eta)
            try:
                report = _rs_crossings(k, eta, cfg)
            except InvariantError as exc:
                out.append(AuditReport.upper("crossing_cap", anchor, params, 1, 0,
                                             {"error": str(exc)}))
                continue
            width = eta if eta < 1 else 2.0 - eta
            out.append(AuditReport.lower(
                "crossings", anchor, params, report.count, (1 - eps) * width * n / 2,
                {"tangent": report.tangent,
                 "upper_constant": report.with_multiplicity / (math.sqrt(min(eta, 2 - eta)) * n)},
            ))
    return out


def audit_crossing_growth(cfg: RunConfig, cal: Calibration) -> list[AuditReport]:
    """Distinct solutions of ``R_k = n`` grow at least like ``n^{0.36}`` over k = 10..18."""
    anchor = "R_k(t) = n has at least A n^{0.36} distinct solutions"
    ks = cfg.ks(lo=10, hi=18)
    params = _params(k=f"{ks[0]}..{ks[-1]}" if ks else None)
    if len(ks) < 3:
        return [AuditReport.inconclusive("crossing_growth", anchor, params,
                                         "fewer than 3 generations in k_range")]
    counts = []
    window = []
    for k in ks:
        pair = rudin_shapiro(k)
        R = modulus_squared(pair.p, verify=False)
        counts.append(level_crossings(R, 1.0, pair.n, cfg.grid_for(pair.n), refine=False).count)
        window.append(level_crossings_near_n(R, 2.0**-12, pair.n, cfg.grid_for(pair.n),
                                             refine=False).count)
    fit = fit_power_law([1 << k for k in ks], counts)
    return [AuditReport.lower("crossing_growth", anchor, params, fit.slope, 0.36,
                              {"counts": counts, "window_counts": window,
                               "half_width": fit.half_width})]


def audit_nearest_zero(cfg: RunConfig, cal: Calibration) -> list[AuditReport]:
    """Grid angles with ``R_k' >= c n^2`` have a zero of ``P_k`` within ``c4/n``, k = 8..12."""
    ks = cfg.ks(lo=8, hi=ROOT_K_MAX)
    if cal.c4 is None:
        return [AuditReport.inconclusive("nearest_zero", NEAREST_ZERO_ANCHOR,
                                         _params(k=k, c=cal.nearest_zero_c), UNCALIBRATED)
                for k in ks]
    return _nearest_zero_reports(cfg, cal, ks)


def _nearest_zero_reports(cfg: RunConfig, cal: Calibration, ks: list[int]) -> list[AuditReport]:
    return [
        nearest_zero_audit(rudin_shapiro(k).p, modulus_squared(rudin_shapiro(k).p),
                           cal.nearest_zero_c, roots_for(cfg, k, "P"), c4=cal.c4, k=k)
        for k in ks
    ]


def audit_bernstein(cfg: RunConfig, cal: Calibration) -> list[AuditReport]:
    """Bernstein-type inequality for ``S = R_k`` at its steepest grid angle, ``r = 1/(2n)``."""
    out = []
    for k in cfg.ks(lo=1, hi=ROOT_K_MAX):
        n = 1 << k
        R = modulus_squared(rudin_shapiro(k).p)
        n_grid = cfg.grid_for(n)
        a = 2.0 * np.pi * int(np.argmax(np.abs(R.derivative_grid(n_grid)))) / n_grid
        out.append(bernstein_audit(R, a, 1.0 / (2 * n), roots_for(cfg, k, "P"), k=k))
    return out


def audit_root_of_unity_floor(cfg: RunConfig, cal: Calibration) -> list[AuditReport]:
    """``|P_k|^2`` at adjacent roots of unity is never small at both: floor ``2 gamma n``."""
    return [root_of_unity_floor(k) for k in cfg.ks(lo=1, hi=18)]


def audit_zero_density(cfg: RunConfig, cal: Calibration) -> list[AuditReport]:
    """Zeros of ``|P_k|^2 - eta n`` per arc of length ``1/n`` stay bounded."""
    out = []
    for k in cfg.ks(lo=2, hi=ROOT_K_MAX):
        pair = rudin_shapiro(k)
        R = modulus_squared(pair.p)
        for eta in cfg.etas:
            out.append(zero_density_audit(R, eta, pair.n, cfg.grid_for(pair.n), k=k))
    return out


# ── Distribution ─────────────────────────────────────────────────────────


def _convergence_pair(cfg: RunConfig) -> tuple[int, int] | None:
    ks = cfg.ks(lo=10, hi=18)
    if len(ks) < 2:
        return None
    return ks[0], ks[-1]


def audit_saffari(cfg: RunConfig, cal: Calibration) -> list[AuditReport]:
    """CDF discrepancy shrinks from k=10 to k=18; the k=1 arcsine CDF is reproduced."""
    anchor = "|{t : alpha <= |P_k|^2/2^{k+1} <= beta}| -> 2 pi (beta - alpha)"
    alphas = alpha_grid()
    expected = float(np.max(np.abs(2.0 / np.pi * np.arcsin(np.sqrt(alphas)) - alphas)))
    k1 = saffari_discrepancy(1, 1 << 14)
    out = [AuditReport.upper("saffari_k1", anchor, _params(k=1), abs(k1.sup_dev - expected), 1e-3,
                             {"sup_dev": k1.sup_dev, "closed_form": expected})]
    pair = _convergence_pair(cfg)
    if pair is None:
        return out
    lo, hi = pair
    d_lo = saffari_discrepancy(lo, cfg.grid_for(1 << lo)).sup_dev
    d_hi = saffari_discrepancy(hi, cfg.grid_for(1 << hi)).sup_dev
    out.append(AuditReport.upper("saffari_convergence", anchor, _params(k=f"{lo}..{hi}"),
                                 d_hi, d_lo, {"sup_dev_lo": d_lo, "sup_dev_hi": d_hi}))
    if hi == 18 and cal.saffari_threshold_k18 is None:
        out.append(AuditReport.inconclusive("saffari_threshold", anchor, _params(k=18),
                                            UNCALIBRATED))
    elif hi == 18:
        out.append(AuditReport.upper("saffari_threshold", anchor, _params(k=18), d_hi,
                                     cal.saffari_threshold_k18))
    return out


def audit_montgomery(cfg: RunConfig, cal: Calibration) -> list[AuditReport]:
    """Polar-cell discrepancy shrinks between the ends of ``k = 10..18``."""
    anchor = "|{t : P_k(e^{it})/sqrt(2^{k+1}) in E}| -> 2 area(E)"
    pair = _convergence_pair(cfg)
    if pair is None:
        return []
    lo, hi = pair
    d_lo = montgomery_discrepancy(lo, cfg.grid_for(1 << lo)).sup_dev
    d_hi = montgomery_discrepancy(hi, cfg.grid_for(1 << hi)).sup_dev
    return [AuditReport.upper("montgomery_convergence", anchor, _params(k=f"{lo}..{hi}"),
                              d_hi, d_lo, {"sup_dev_lo": d_lo, "sup_dev_hi": d_hi})]


def audit_ensemble(cfg: RunConfig, cal: Calibration) -> list[AuditReport]:
    """Random Littlewood averages against their limits.

    Parseval holds exactly, q = 4 tends to ``Gamma(3) = 2`` and the Mahler
    variant to ``e^{-gamma/2}``.
    """
    anchor = "E M_q(f)^q / n^{q/2} -> Gamma(1 + q/2)"
    n, samples, seed = cfg.ensemble_n, cfg.samples, cfg.seed
    q2 = ensemble_mean(n, 2.0, samples, seed, cfg.threads)
    q4 = ensemble_mean(n, 4.0, samples, seed, cfg.threads)
    m0 = ensemble_mean(n, 0.0, samples, seed, cfg.threads)
    return [
        AuditReport.upper("ensemble_q2", anchor, _params(n=n, q=2), abs(q2.mean - 1.0), 1e-12),
        AuditReport.upper("ensemble_q4", anchor, _params(n=n, q=4), abs(q4.mean - 2.0),
                          3.0 * q4.std_err, {"mean": q4.mean, "std_err": q4.std_err,
                                             "finite_n_mean": 2.0 - 1.0 / n}),
        AuditReport.upper("ensemble_mahler", anchor, _params(n=n, q=0),
                          abs(m0.mean - MAHLER_LIMIT), 0.03, {"mean": m0.mean}),
    ]


# ── Registry ─────────────────────────────────────────────────────────────


def discover_audits() -> dict[str, AuditFunc]:
    """Return ``{name: function}`` for every ``audit_*`` function, in source order."""
    module = sys.modules[__name__]
    found = []
    for name, obj in inspect.getmembers(module, inspect.isfunction):
        if name.startswith(_PREFIX) and obj.__module__ == __name__:
            found.append((inspect.getsourcelines(obj)[1], name[len(_PREFIX):], obj))
    return {name: func for _, name, func in sorted(found)}


AUDITS: dict[str, AuditFunc] = discover_audits()


def get_audit_descriptions() -> str:
    """One line per audit: name and the first paragraph of its docstring."""
    lines = []
    for name, func in AUDITS.items():
        doc = inspect.getdoc(func) or ""
        first = re.split(r"\n\s*\n", doc)[0].replace("\n", " ").strip()
        lines.append(f"{name:<26} {first}")
    return "\n".join(lines)


def run_audits(
    cfg: RunConfig,
    cal: Calibration,
    names: list[str] | None = None,
    on_report: Callable[[AuditReport], None] | None = None,
) -> list[AuditReport]:
    """Run the selected audits (all by default) in registry order.

    A lab error inside one audit becomes an inconclusive report; unknown
    names raise :class:`DomainError`.
    """
    selected = names or list(AUDITS)
    unknown = [n for n in selected if n not in AUDITS]
    if unknown:
        raise DomainError(f"unknown audit(s): {', '.join(unknown)}")
    reports: list[AuditReport] = []
    for name in selected:
        try:
            produced = AUDITS[name](cfg, cal)
        except LabError as exc:
            produced = [AuditReport.inconclusive(name, "", {}, f"{type(exc).__name__}: {exc}")]
        for report in produced:
            reports.append(report)
            if on_report is not None:
                on_report(report)
    return reports


# ── Calibration and diagnostics ──────────────────────────────────────────


def calibrate(cfg: RunConfig, cal: Calibration) -> Calibration:
    """Fill the empirical constants from pilot generations below the audited ones.

    ``C`` comes from ``k = 1..10`` and is audited above ``k = 10``; ``c2`` and
    ``c4`` come from small generations with slack, so the audits over
    ``k = 8..12`` compare against values they did not produce.  The Saffari
    threshold is a regression value and needs ``k = 18`` in ``cfg.k_range``.
    """
    updates: dict[str, Any] = {"c1": cfg.c1, "delta_circle": cfg.delta_circle}
    lo, hi = ANNULUS_PILOT_KS
    updates["c2"] = ANNULUS_SLACK * min(
        _classifications(cfg, k, "P", cal).annulus / (1 << k) for k in range(lo, hi + 1))
    updates["autocorr_constant"] = calibrate_constant(
        autocorr_profiles(range(1, AUTOCORR_PILOT_K + 1), threads=cfg.threads))
    if cfg.k_range[1] >= 18:
        updates["saffari_threshold_k18"] = 1.05 * saffari_discrepancy(
            18, cfg.grid_for(1 << 18)).sup_dev
    lo, hi = NEAREST_PILOT_KS
    pilot = _nearest_zero_reports(cfg, cal, list(range(lo, hi + 1)))
    c4 = [r.detail["empirical_c4"] for r in pilot if r.status != "inconclusive"]
    if c4:
        updates["c4"] = NEAREST_SLACK * max(c4)
    return Calibration(**{**cal.to_dict(), **updates})


def diagnostics(cfg: RunConfig) -> dict[str, Any]:
    """Reported-only statistics: disk zeros, annulus arcs and crossing upper constants."""
    disk = []
    arcs = []
    for k in cfg.ks(lo=1, hi=ROOT_K_MAX):
        stats = disk_zero_statistics(k, cfg.delta_circle)
        disk.append({"k": k, "inside_p": stats.inside_p, "inside_q": stats.inside_q,
                     "inside_pq": stats.inside_product, "fractions": stats.fractions()})
        diag = arc_diagnostics(modulus_squared(rudin_shapiro(k).p), 1 << k)
        arcs.append({"k": k, "low_arcs": diag.low_arcs, "steep_arcs": diag.steep_arcs,
                     "both": diag.both})
    upper = [
        {"k": k, "eta": eta, "c": crossing_upper_constant(k, eta)}
        for k in cfg.ks(lo=8, hi=14)
        for eta in cfg.etas
    ]
    return {"disk_zeros": disk, "annulus_arcs": arcs, "crossing_upper_constants": upper}
