"""Entry-point for the littlewood-lab CLI."""

from __future__ import annotations

import argparse
import math
import signal
import sys
import time
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Callable, NoReturn, Sequence

from littlewood_lab.config import (
    Calibration,
    RunConfig,
    config_hash,
    find_config_file,
    load_calibration,
    load_config,
    parse_k_range,
    save_calibration,
)
from littlewood_lab.errors import ConvergenceError, LabError
from littlewood_lab.logging import NullLogger, RunLogger, list_runs, replay_run
from littlewood_lab.report import (
    AUDIT_COLUMNS,
    AuditReport,
    bundle,
    tally,
    write_csv,
    write_json,
)

_BOLD = "\033[1m"
_DIM = "\033[2m"
_CYAN = "\033[36m"
_GREEN = "\033[32m"
_YELLOW = "\033[33m"
_RED = "\033[31m"
_RESET = "\033[0m"

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_AUDIT_FAILED = 2

ROOT_COLUMNS = ("k", "member", "re", "im", "modulus", "residual", "class")
ZERO_SUMMARY_COLUMNS = (
    "k", "member", "n", "on_circle", "annulus", "inside", "outside", "real_zeros",
    "on_circle_fraction", "annulus_fraction",
)
UNIMODULAR_COLUMNS = ("p", "count", "tangencies", "fraction")
CROSSING_COLUMNS = ("k", "eta", "count_transversal", "count_tangent")
DIST_COLUMNS = ("k", "N", "family", "sup_dev")
ENSEMBLE_COLUMNS = ("n", "q", "samples", "mean", "std_err", "limit", "seed")
BUILD_COLUMNS = ("family", "index", "member", "length", "value_at_one", "square_sum",
                 "reciprocity_ok")
NORM_COLUMNS = ("k", "member", "m2", "m4", "m_inf", "mahler", "mahler_doubling_delta",
                "saffari_m4_ratio")
M4_COLUMNS = ("k", "fourth_power", "ratio")


def _supports_colour() -> bool:
    """Return True if stderr is a terminal that likely supports ANSI colours."""
    if not hasattr(sys.stderr, "isatty"):
        return False
    return sys.stderr.isatty()


def _c(code: str, text: str) -> str:
    """Wrap *text* with an ANSI escape *code* if colours are supported."""
    if _supports_colour():
        return f"{code}{text}{_RESET}"
    return text


_STATUS_STYLE = {"pass": _GREEN, "fail": _RED, "inconclusive": _YELLOW}


class _Parser(argparse.ArgumentParser):
    """Usage errors exit with 1; exit code 2 means a failed audit."""

    def error(self, message: str) -> NoReturn:
        self.print_usage(sys.stderr)
        self.exit(EXIT_ERROR, f"{self.prog}: error: {message}\n")


# ── Run context ──────────────────────────────────────────────────────────


@dataclass
class _Run:
    args: argparse.Namespace
    cfg: RunConfig
    cal: Calibration
    chash: str
    logger: RunLogger | NullLogger

    @property
    def out(self) -> Path:
        return Path(self.cfg.out)

    def csv(self, name: str, columns: Sequence[str], rows: list[Sequence[Any]]) -> Path:
        path = write_csv(self.out / name, columns, rows, self.chash)
        self.logger.log_artifact(path, rows=len(rows))
        print(_c(_DIM, f"wrote {path} ({len(rows)} rows)"), file=sys.stderr)
        return path

    def json(self, name: str, payload: dict[str, Any]) -> Path:
        path = write_json(self.out / name, payload, self.chash)
        self.logger.log_artifact(path)
        print(_c(_DIM, f"wrote {path}"), file=sys.stderr)
        return path

    def report(self, r: AuditReport) -> None:
        self.logger.log_audit(r.name, r.status, r.lhs, r.rhs, r.margin)
        label = _c(_STATUS_STYLE[r.status], r.status.upper().ljust(12))
        params = " ".join(f"{k}={v}" for k, v in r.params.items())
        print(f"{label} {_c(_BOLD, r.name)} {params}  margin={r.margin:.3e}", file=sys.stderr)
        if self.args.verbose and r.detail:
            print(_c(_DIM, f"             {r.detail}"), file=sys.stderr)


CommandResult = list[AuditReport] | None


# ── Subcommands ──────────────────────────────────────────────────────────


def _cmd_build(run: _Run) -> CommandResult:
    from littlewood_lab.poly_core import check_fekete_reciprocity, fekete, rudin_shapiro

    rows: list[Sequence[Any]] = []
    for k in run.cfg.ks():
        pair = rudin_shapiro(k, run.cfg.k_max)
        for member, f in (("P", pair.p), ("Q", pair.q)):
            rows.append(("rudin_shapiro", k, member, len(f), int(f.coeffs.sum(dtype=int)),
                         f.square_sum(), ""))
    for p in run.cfg.primes:
        fp = fekete(p)
        ok = check_fekete_reciprocity(fp)
        rows.append(("fekete", p, fp.reciprocity, len(fp.poly),
                     int(fp.poly.coeffs.sum(dtype=int)), fp.poly.square_sum(), ok))
    run.csv("build.csv", BUILD_COLUMNS, rows)
    return None


def _cmd_norms(run: _Run) -> CommandResult:
    from littlewood_lab.norms import (
        INFINITY,
        m4_fourth_power_exact,
        m4_ratio,
        mahler_quadrature,
        mq_norm,
        saffari_mq_ratio,
    )
    from littlewood_lab.poly_core import rudin_shapiro

    rows: list[Sequence[Any]] = []
    m4_rows: list[Sequence[Any]] = []
    for k in run.cfg.ks():
        pair = rudin_shapiro(k, run.cfg.k_max)
        n_grid = run.cfg.grid_for(pair.n)
        ratios = saffari_mq_ratio(k, 4.0, n_grid)
        for idx, (member, f) in enumerate((("P", pair.p), ("Q", pair.q))):
            mahler = mahler_quadrature(f, n_grid)
            rows.append((
                k, member,
                mq_norm(f, 2.0, n_grid, estimate_error=False).value,
                mq_norm(f, 4.0, n_grid, estimate_error=False).value,
                mq_norm(f, INFINITY, n_grid, estimate_error=False).value,
                mahler.value, mahler.doubling_delta, ratios[idx],
            ))
        m4_rows.append((k, m4_fourth_power_exact(pair.p), m4_ratio(k)))
    run.csv("norms.csv", NORM_COLUMNS, rows)
    run.csv("m4.csv", M4_COLUMNS, m4_rows)
    return None


def _cmd_autocorr(run: _Run) -> CommandResult:
    from littlewood_lab.autocorr import (
        CLAIMED_CONSTANT,
        CLAIMED_EXPONENT,
        CSV_COLUMNS,
        autocorr_profiles,
        fit_power_law,
    )

    profiles = autocorr_profiles(run.cfg.ks(), threads=run.cfg.threads, k_max=run.cfg.k_max)
    run.csv("autocorr.csv", CSV_COLUMNS, [p.row() for p in profiles])
    usable = [p for p in profiles if p.max_abs > 0]
    if len({p.n for p in usable}) >= 2:
        fit = fit_power_law([p.n for p in usable], [p.max_abs for p in usable])
        run.json("autocorr_fit.json", {
            "slope": fit.slope, "intercept": fit.intercept, "half_width": fit.half_width,
            "residual": fit.residual, "points": fit.points,
            "reference_constant": CLAIMED_CONSTANT, "reference_exponent": CLAIMED_EXPONENT,
        })
        print(f"fitted exponent: {fit.slope:.4f} +- {fit.half_width:.4f}")
    return None


def _fekete_zeros(run: _Run, primes: Sequence[int]) -> None:
    from littlewood_lab.poly_core import fekete
    from littlewood_lab.zeros import find_roots, root_labels, unimodular_count_reciprocal

    counts: list[Sequence[Any]] = []
    roots_rows: list[Sequence[Any]] = []
    for p in primes:
        fp = fekete(p)
        uc = unimodular_count_reciprocal(fp)
        counts.append((p, uc.count, len(uc.tangencies), uc.fraction))
        print(f"p={p}: {uc.count} sign changes on the circle, fraction {uc.fraction:.4f}")
        if fp.poly.degree > run.cfg.root_degree_cap:
            continue
        tol = run.cfg.root_tol * math.sqrt(fp.poly.square_sum())
        try:
            roots = find_roots(fp.poly, tol, degree_cap=run.cfg.root_degree_cap,
                               seed=run.cfg.seed)
        except ConvergenceError as exc:
            roots = exc.partial
            run.logger.log_error(str(exc))
            print(_c(_YELLOW, f"p={p}: {exc}; writing unconverged roots"), file=sys.stderr)
        labels = root_labels(roots, p, run.cfg.delta_circle, run.cfg.c1)
        for z, res, label in zip(roots.roots, roots.residuals, labels):
            roots_rows.append((p, "F", z.real, z.imag, abs(z), res, label))
    run.csv("unimodular.csv", UNIMODULAR_COLUMNS, counts)
    if roots_rows:
        run.csv("roots.csv", ROOT_COLUMNS, roots_rows)


def _cmd_zeros(run: _Run) -> CommandResult:
    if run.args.fekete is not None:
        _fekete_zeros(run, run.args.fekete or run.cfg.primes)
        return None

    from littlewood_lab.audits import roots_for
    from littlewood_lab.zeros import classify, root_labels

    roots_rows: list[Sequence[Any]] = []
    summary: list[Sequence[Any]] = []
    for k in run.cfg.ks():
        n = 1 << k
        for member in ("P", "Q"):
            roots = roots_for(run.cfg, k, member)
            labels = root_labels(roots, n, run.cfg.delta_circle, run.cfg.c1)
            for z, res, label in zip(roots.roots, roots.residuals, labels):
                roots_rows.append((k, member, z.real, z.imag, abs(z), res, label))
            cls = classify(roots, n, run.cfg.delta_circle, run.cfg.c1)
            summary.append((k, member, n, cls.on_circle, cls.annulus, cls.inside, cls.outside,
                            cls.real_zeros, cls.on_circle_fraction, cls.annulus_fraction))
    run.csv("roots.csv", ROOT_COLUMNS, roots_rows)
    run.csv("zero_summary.csv", ZERO_SUMMARY_COLUMNS, summary)
    return None


def _cmd_crossings(run: _Run) -> CommandResult:
    from littlewood_lab.eval_engine import modulus_squared
    from littlewood_lab.poly_core import rudin_shapiro
    from littlewood_lab.zeros import level_crossings

    rows: list[Sequence[Any]] = []
    for k in run.cfg.ks(lo=1):
        pair = rudin_shapiro(k, run.cfg.k_max)
        R = modulus_squared(pair.p, verify=False)
        for eta in run.cfg.etas:
            report = level_crossings(R, eta, pair.n, run.cfg.grid_for(pair.n))
            rows.append((k, eta, report.transversal, report.tangent))
    run.csv("crossings.csv", CROSSING_COLUMNS, rows)
    return None


def _cmd_dist(run: _Run) -> CommandResult:
    from littlewood_lab.distribution import montgomery_discrepancy, saffari_discrepancy

    rows: list[Sequence[Any]] = []
    cells: dict[str, Any] = {}
    for k in run.cfg.ks(lo=1):
        n_grid = run.cfg.grid_for(1 << k)
        for report in (saffari_discrepancy(k, n_grid), montgomery_discrepancy(k, n_grid)):
            rows.append(report.row())
            cells.setdefault(str(k), {})[report.family] = {"cells": report.cells,
                                                           **report.detail}
    run.csv("dist.csv", DIST_COLUMNS, rows)
    run.json("dist_cells.json", {"generations": cells})
    return None


def _cmd_ensemble(run: _Run) -> CommandResult:
    from littlewood_lab.distribution import ensemble_mean, ensemble_norm_mean

    n = run.args.n or run.cfg.ensemble_n
    qs = run.args.q or [0.0, 2.0, 4.0]
    moments, norms = [], []
    for q in qs:
        est = ensemble_mean(n, q, run.cfg.samples, run.cfg.seed, run.cfg.threads)
        moments.append(est.row())
        print(f"q={q:g}: mean {est.mean:.6f} +- {est.std_err:.6f} (limit {est.limit:.6f})")
        if q > 0:
            norms.append(ensemble_norm_mean(n, q, run.cfg.samples, run.cfg.seed,
                                            run.cfg.threads).row())
    run.csv("ensemble.csv", ENSEMBLE_COLUMNS, moments)
    if norms:
        run.csv("ensemble_norms.csv", ENSEMBLE_COLUMNS, norms)
    return None


def _cmd_audit(run: _Run) -> CommandResult:
    from littlewood_lab import audits

    if run.args.list:
        print(audits.get_audit_descriptions())
        return None
    if run.args.calibrate:
        cal = audits.calibrate(run.cfg, run.cal)
        target = run.cfg.calibration or str(run.out / "calibration.json")
        path = save_calibration(target, cal)
        run.logger.log_artifact(path)
        print(f"calibration written to {path}")
        return None
    reports = audits.run_audits(run.cfg, run.cal, run.args.name, on_report=run.report)
    run.csv("audits.csv", AUDIT_COLUMNS, [r.row() for r in reports])
    return reports


def _cmd_report(run: _Run) -> CommandResult:
    from littlewood_lab import audits

    reports = audits.run_audits(run.cfg, run.cal, on_report=run.report)
    run.csv("audits.csv", AUDIT_COLUMNS, [r.row() for r in reports])
    run.json("report.json", {**bundle(reports), "diagnostics": audits.diagnostics(run.cfg),
                             "config": run.cfg.to_dict(), "calibration": run.cal.to_dict()})
    return reports


def _cmd_plot(run: _Run) -> CommandResult:
    from littlewood_lab.plotdata import emit_plotdata

    for path in emit_plotdata(run.out, run.args.dest, previews=not run.args.no_preview):
        run.logger.log_artifact(path)
        print(path)
    return None


_COMMANDS: dict[str, Callable[[_Run], CommandResult]] = {
    "build": _cmd_build,
    "norms": _cmd_norms,
    "autocorr": _cmd_autocorr,
    "zeros": _cmd_zeros,
    "crossings": _cmd_crossings,
    "dist": _cmd_dist,
    "ensemble": _cmd_ensemble,
    "audit": _cmd_audit,
    "report": _cmd_report,
    "plot": _cmd_plot,
}


# ── Run log inspection ───────────────────────────────────────────────────


def _list_runs(out: str) -> None:
    """Print a table of recent runs."""
    runs = list_runs(out)
    if not runs:
        print("No runs found.")
        return

    print(f"{'ID':<26}  {'Command':<10}  {'Failures':>8}  {'Duration':>8}  {'Status'}")
    print("-" * 72)
    for r in runs:
        elapsed = r["elapsed_s"]
        dur = f"{elapsed:.1f}s" if isinstance(elapsed, (int, float)) else "?"
        print(f"{r['id']:<26}  {r['command']!s:<10}  {r['failures']:>8}  {dur:>8}  {r['status']}")


def _replay_run(run_id: str, out: str) -> int:
    """Replay a run log to stderr."""
    try:
        events = replay_run(run_id, out)
    except FileNotFoundError:
        print(f"Run not found: {run_id}", file=sys.stderr)
        return EXIT_ERROR

    for evt in events:
        kind = evt.get("event", "?")
        ts = evt.get("timestamp", "")
        if kind == "start":
            print(f"[{ts}] START  {evt.get('command')}  argv={evt.get('argv')}"
                  f"  config={evt.get('config_hash')}", file=sys.stderr)
        elif kind == "audit":
            print(f"[{ts}] AUDIT  {evt.get('name')}: {evt.get('status')}"
                  f"  margin={evt.get('margin')}", file=sys.stderr)
        elif kind == "artifact":
            print(f"[{ts}] FILE   {evt.get('path')}", file=sys.stderr)
        elif kind == "error":
            print(f"[{ts}] ERROR  {evt.get('message')}", file=sys.stderr)
        elif kind == "done":
            print(f"[{ts}] DONE   exit={evt.get('exit_code')}  elapsed={evt.get('elapsed_s')}s"
                  f"  tallies={evt.get('tallies')}", file=sys.stderr)
        else:
            print(f"[{ts}] {kind}  {evt}", file=sys.stderr)
    return EXIT_OK


# ── Argument parsing ─────────────────────────────────────────────────────


def _common_options() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--k", type=int, default=None, help="Single generation index.")
    common.add_argument("--k-range", type=str, default=None, metavar="A..B",
                        help="Inclusive generation range (default from config: 1..12).")
    common.add_argument("--prime", type=int, action="append", default=None,
                        help="Fekete prime; repeat for several.")
    common.add_argument("--eta", type=float, action="append", default=None,
                        help="Level factor in (0, 2); repeat for several.")
    common.add_argument("--alpha", type=float, action="append", default=None,
                        help="Sublevel fraction in (0, 1]; repeat for several.")
    common.add_argument("--grid-factor", type=int, default=None,
                        help="Grid points per coefficient (>= 16).")
    common.add_argument("--seed", type=int, default=None, help="Seed for random ensembles.")
    common.add_argument("--threads", type=int, default=None, help="Worker threads.")
    common.add_argument("--config", type=str, default=None, metavar="PATH",
                        help="Config file (default: nearest .littlewood-lab.conf).")
    common.add_argument("--out", type=str, default=None, help="Output directory.")
    common.add_argument("--no-log", action="store_true", help="Disable the JSONL run log.")
    common.add_argument("--verbose", "-v", action="store_true",
                        help="Print audit details.")
    return common


def _build_parser() -> argparse.ArgumentParser:
    parser = _Parser(
        prog="littlewood-lab",
        description="Numerical audits of Rudin-Shapiro, Fekete and random Littlewood polynomials.",
    )
    parser.add_argument("--list-runs", action="store_true", help="List recent runs and exit.")
    parser.add_argument("--replay", type=str, metavar="RUN_ID", default=None,
                        help="Replay a run log to stderr.")
    parser.add_argument("--runs-out", type=str, default="results", metavar="DIR",
                        help="Output directory holding runs/ for --list-runs and --replay.")
    common = _common_options()
    sub = parser.add_subparsers(dest="command", metavar="COMMAND")

    sub.add_parser("build", parents=[common], help="Build Rudin-Shapiro and Fekete polynomials.")
    sub.add_parser("norms", parents=[common], help="M_q norms, Mahler measure and M_4 ratios.")
    sub.add_parser("autocorr", parents=[common], help="Autocorrelation profiles and growth fit.")

    zeros = sub.add_parser("zeros", parents=[common], help="Roots and their classification.")
    zeros.add_argument("--fekete", type=int, nargs="*", default=None, metavar="P",
                       help="Count unimodular zeros of Fekete polynomials "
                            "(default: config primes).")

    sub.add_parser("crossings", parents=[common], help="Level crossings of |P_k|^2 = eta n.")
    sub.add_parser("dist", parents=[common], help="Saffari and Montgomery discrepancies.")

    ens = sub.add_parser("ensemble", parents=[common], help="Random Littlewood ensembles.")
    ens.add_argument("--n", type=int, default=None, help="Polynomial length.")
    ens.add_argument("--q", type=float, action="append", default=None,
                     help="Exponent (0 = Mahler); repeat for several.")
    ens.add_argument("--samples", type=int, default=None, help="Number of samples (>= 100).")

    audit = sub.add_parser("audit", parents=[common], help="Run registered audits.")
    audit.add_argument("--name", action="append", default=None,
                       help="Audit to run; repeat for several (default: all).")
    audit.add_argument("--list", action="store_true", help="List audits and exit.")
    audit.add_argument("--calibrate", action="store_true",
                       help="Fill the empirical constants and write a calibration file.")

    report = sub.add_parser("report", parents=[common], help="Every audit in one JSON report.")
    report.add_argument("--k-max", type=int, default=None,
                        help="Run generations 1..K_MAX.")

    plot = sub.add_parser("plot", parents=[common], help="Figure data and previews.")
    plot.add_argument("--dest", type=str, default=None, help="Directory for plot files.")
    plot.add_argument("--no-preview", action="store_true", help="Skip the PNG previews.")
    return parser


def _resolve_config(args: argparse.Namespace) -> RunConfig:
    path = args.config or find_config_file()
    cfg = load_config(path)
    k_range = None
    if args.k is not None:
        k_range = (args.k, args.k)
    elif args.k_range:
        k_range = parse_k_range(args.k_range)
    if getattr(args, "k_max", None) is not None:
        k_range = (1, args.k_max)
    return cfg.replace(
        k_range=k_range,
        primes=tuple(args.prime) if args.prime else None,
        etas=tuple(args.eta) if args.eta else None,
        alphas=tuple(args.alpha) if args.alpha else None,
        grid_factor=args.grid_factor,
        seed=args.seed,
        threads=args.threads,
        out=args.out,
        samples=getattr(args, "samples", None),
    )


def run_command(argv: Sequence[str] | None = None) -> int:
    """Parse *argv*, run one subcommand and return its exit code."""
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else EXIT_ERROR

    if args.list_runs:
        _list_runs(args.runs_out)
        return EXIT_OK
    if args.replay:
        return _replay_run(args.replay, args.runs_out)
    if args.command is None:
        parser.print_help(sys.stderr)
        return EXIT_ERROR

    try:
        cfg = _resolve_config(args)
        cal = load_calibration(cfg.calibration)
    except (LabError, OSError) as exc:
        print(_c(_RED, f"error: {exc}"), file=sys.stderr)
        return EXIT_ERROR

    chash = config_hash(cfg)
    logger: RunLogger | NullLogger = NullLogger() if args.no_log else RunLogger(cfg.out)
    start = time.monotonic()
    with logger:
        logger.log_start(args.command, argv, chash)
        run = _Run(args, cfg, cal, chash, logger)
        tallies = None
        try:
            reports = _COMMANDS[args.command](run)
        except (LabError, OSError) as exc:
            logger.log_error(f"{type(exc).__name__}: {exc}")
            logger.log_done(EXIT_ERROR, time.monotonic() - start)
            print(_c(_RED, f"error: {exc}"), file=sys.stderr)
            return EXIT_ERROR
        code = EXIT_OK
        if reports is not None:
            tallies = tally(reports)
            summary = "  ".join(f"{k}={v}" for k, v in tallies.items())
            print(_c(_BOLD, summary), file=sys.stderr)
            if tallies["fail"]:
                code = EXIT_AUDIT_FAILED
        logger.log_done(code, time.monotonic() - start, tallies)
    if logger.path is not None:
        print(_c(_CYAN, f"run log: {logger.path}"), file=sys.stderr)
    return code


def main() -> None:
    signal.signal(signal.SIGINT, signal.default_int_handler)
    try:
        sys.exit(run_command())
    except KeyboardInterrupt:
        print("\nInterrupted.", file=sys.stderr)
        sys.exit(130)


if __name__ == "__main__":
    main()
