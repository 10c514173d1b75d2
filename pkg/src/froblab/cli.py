"""``froblab`` command-line driver.

Every subcommand builds an :class:`~froblab.config.ExperimentConfig`
(JSON file from ``--config`` overlaid with flags), runs it and writes the
report. Exit status: 0 on success, 2 on a validation error, 3 when
``verify`` finds a failing check.
"""

from __future__ import annotations

import argparse
import sys
import time

import numpy as np

from . import __version__
from .averages import (C0, FamilySpec, InadmissibleFamily, _map_primes, count_T_fgp,
                       li_half, lt_average, michel_envelope, michel_table,
                       onepar_st_average, resolve_workers, st_average)
from .charsums import weil_audit
from .config import ConfigError, ExperimentConfig, load_config_file, merge
from .curves import UNIT, class_table
from .polynomials import (ONE_PARAMETER, TWO_PARAMETER, PolynomialParseError, eval_mod,
                          parse_polynomial)
from .report import PRIME_COLUMNS, RunReport, emit_csv, emit_json, detail_csv, summary_csv
from .satotate import AngleInterval, FULL, IntervalError
from .vertical import (angle_sample_vertical, count_in_interval, count_Rp, interval_discrepancy,
                       katz_envelope, katz_sum, lt_upper_envelope, population_size,
                       st_vertical_envelope)

EXIT_OK, EXIT_INVALID, EXIT_VERIFY = 0, 2, 3


def _summary(cfg: ExperimentConfig, target, average, main, ratio, envelope, ok, wall_ms):
    return {"command": cfg.command, "f": cfg.f, "g": cfg.g, "A": cfg.A, "B": cfg.B,
            "x": cfg.x, "target": target, "empirical_average": average,
            "main_term": main, "ratio": ratio, "envelope": envelope,
            "threshold_ok": ok, "wall_time_ms": wall_ms if cfg.timing else 0}


def _interval_text(cfg: ExperimentConfig) -> str:
    return f"[{cfg.alpha},{cfg.beta}]"


def _elapsed_us(start: int, timing: bool) -> int:
    return (time.perf_counter_ns() - start) // 1000 if timing else 0


# -- averages over families ------------------------------------------------

def _run_average(cfg: ExperimentConfig) -> RunReport:
    f, g = cfg.polynomials
    c = cfg.constants
    workers = resolve_workers(cfg.workers)
    if cfg.command == "lt-avg":
        spec = FamilySpec(f, g, cfg.A, cfg.B, TWO_PARAMETER)
        rep = lt_average(spec, cfg.t, cfg.x, workers, eps=c["epsilon"], timing=cfg.timing)
        target = str(cfg.t)
    elif cfg.command == "st-avg":
        spec = FamilySpec(f, g, cfg.A, cfg.B, TWO_PARAMETER)
        rep = st_average(spec, AngleInterval(*cfg.interval), cfg.x, workers,
                         eps=c["epsilon"], timing=cfg.timing)
        target = _interval_text(cfg)
    else:
        spec = FamilySpec(f, g, cfg.A, None, ONE_PARAMETER)
        rep = onepar_st_average(spec, AngleInterval(*cfg.interval), cfg.x, workers,
                                eps=c["epsilon"], c=c["st_poly"], timing=cfg.timing)
        target = _interval_text(cfg)
    rows = [[r.p, r.count, r.class_count, r.max_trace, r.elapsed_us] for r in rep.primes]
    extra = {"total": rep.total, "normaliser": spec.normaliser,
             "improper_primes": rep.improper_primes}
    if rep.normalized is not None:
        extra["average_over_li_half"] = rep.normalized
    summary = _summary(cfg, target, rep.empirical_average, rep.main_term, rep.ratio,
                       rep.envelope, rep.threshold_ok, rep.wall_time_ms)
    return RunReport(summary, PRIME_COLUMNS, rows, extra, rep.threshold_flags)


# -- vertical statistics ---------------------------------------------------

def _vertical_lt_prime(p: int, t: int, c: float, timing: bool):
    start = time.perf_counter_ns()
    table = class_table(p)
    keep = (table.kind == UNIT) & ~table.singular
    rec = count_Rp(p, t, c)
    n_classes = int((keep & (table.trace == t)).sum())
    max_t = int(np.abs(table.trace[keep]).max())
    return [p, rec.count, n_classes, max_t, _elapsed_us(start, timing), rec.envelope]


def _run_vertical_lt(cfg: ExperimentConfig) -> RunReport:
    start = time.perf_counter()
    c = cfg.constants["lt_upper"]
    primes = cfg.prime_list()
    rows = _map_primes(_vertical_lt_prime, [(p, cfg.t, c, cfg.timing) for p in primes],
                       resolve_workers(cfg.workers))
    average = sum(r[1] / r[0] ** 2 for r in rows)
    main = C0 * li_half(cfg.x) if cfg.t == 0 and cfg.x >= 3 and cfg.primes is None else None
    envelope = sum(lt_upper_envelope(p, c) / p**2 for p in primes)
    flags = {"count<=lt_upper*p^(3/2)*log(p)": all(r[1] <= r[5] for r in rows)}
    flags["ok"] = flags["count<=lt_upper*p^(3/2)*log(p)"]
    wall = int((time.perf_counter() - start) * 1000)
    summary = _summary(cfg, str(cfg.t), average, main, average / main if main else None,
                       envelope, flags["ok"], wall)
    return RunReport(summary, PRIME_COLUMNS + ("envelope",), rows,
                     {"population": "nonsingular unit pairs, (p-1)(p-2) per prime"}, flags)


def _vertical_st_prime(p: int, alpha: float, beta: float, n_max: int, c: dict, timing: bool):
    start = time.perf_counter_ns()
    table = class_table(p)
    keep = (table.kind == UNIT) & ~table.singular
    sample = angle_sample_vertical(p)
    count = count_in_interval(sample, alpha, beta)
    in_range = keep & (table.angle >= alpha) & (table.angle <= beta)
    interval = AngleInterval(alpha, beta)
    expected = interval.measure * population_size(p)
    disc = interval_discrepancy(sample)
    katz = max(abs(katz_sum(p, n)) / katz_envelope(p, n, c["katz"]) for n in range(1, n_max + 1))
    return [p, count, int(in_range.sum()), int(np.abs(table.trace[keep]).max()),
            _elapsed_us(start, timing), expected, disc, st_vertical_envelope(p, c["st_vertical"]),
            katz]


def _run_vertical_st(cfg: ExperimentConfig) -> RunReport:
    start = time.perf_counter()
    alpha, beta = cfg.interval
    primes = cfg.prime_list()
    rows = _map_primes(_vertical_st_prime,
                       [(p, alpha, beta, cfg.n, cfg.constants, cfg.timing) for p in primes],
                       resolve_workers(cfg.workers))
    pop = sum(population_size(p) for p in primes)
    measure = AngleInterval(alpha, beta).measure
    average = sum(r[1] for r in rows) / pop if pop else None
    envelope = sum(r[7] for r in rows) / pop if pop else None
    flags = {"discrepancy<=st_vertical*p^(7/4)": all(r[6] <= r[7] for r in rows),
             "|katz_sum|<=katz*n/sqrt(p)": all(r[8] <= 1.0 for r in rows)}
    flags["ok"] = all(flags.values())
    wall = int((time.perf_counter() - start) * 1000)
    summary = _summary(cfg, _interval_text(cfg), average, measure,
                       average / measure if average is not None else None,
                       envelope, flags["ok"], wall)
    columns = PRIME_COLUMNS + ("expected", "discrepancy", "envelope", "katz_max_ratio")
    return RunReport(summary, columns, rows, {"katz_n_max": cfg.n}, flags)


# -- audits ----------------------------------------------------------------

def _run_charsum_audit(cfg: ExperimentConfig) -> RunReport:
    start = time.perf_counter()
    polys = [h for h in (cfg.f, cfg.g) if h is not None]
    parsed = [parse_polynomial(h) for h in dict.fromkeys(polys)]
    rows = []
    for p in cfg.prime_list():
        t0 = time.perf_counter_ns()
        audit = weil_audit(parsed, [p], extra=int(cfg.constants["weil_extra"]))
        elapsed = _elapsed_us(t0, cfg.timing)
        for row in audit:
            count = 0 if row.skipped else (p - 2) * p
            rows.append([p, count, None, None, elapsed, row.polynomial, row.degree,
                         row.skipped, None if row.skipped else row.max_ratio, row.bound_ratio])
    checked = [r for r in rows if not r[7]]
    worst = max((r[8] for r in checked), default=None)
    worst_rel = max((r[8] / r[9] for r in checked), default=None)
    flags = {"|S|<=(deg+weil_extra)*sqrt(p)": all(r[8] <= r[9] + 1e-9 for r in checked)}
    flags["ok"] = flags["|S|<=(deg+weil_extra)*sqrt(p)"]
    wall = int((time.perf_counter() - start) * 1000)
    summary = _summary(cfg, "weil", worst, None, worst_rel, None, flags["ok"], wall)
    columns = PRIME_COLUMNS + ("polynomial", "degree", "skipped", "max_ratio", "bound_ratio")
    extra = {"empirical_average": "max |S|/sqrt(p) over checked rows",
             "ratio": "max of max_ratio/bound_ratio",
             "skipped_rows": sum(1 for r in rows if r[7])}
    return RunReport(summary, columns, rows, extra, flags)


def _michel_prime(f, g, p: int, n_max: int, A, alpha, beta, c: dict, timing: bool):
    start = time.perf_counter_ns()
    table = class_table(p)
    residues = np.arange(p, dtype=np.int64)
    idx = table.class_index(eval_mod(f, residues, p), eval_mod(g, residues, p))
    nonsing = ~table.singular[idx]
    worst = 0.0
    for n in range(1, n_max + 1):
        vals = np.abs(michel_table(f, g, p, n))
        worst = max(worst, float(vals.max()) / michel_envelope(p, n, c["michel"]))
    row = [p, int(nonsing.sum()), int(np.unique(idx[nonsing]).size),
           int(np.abs(table.trace[idx[nonsing]]).max()) if nonsing.any() else None, 0, worst]
    if A is not None:
        interval = AngleInterval(alpha, beta) if alpha is not None else FULL
        rec = count_T_fgp(f, g, p, A, interval, c["st_poly"])
        row += [rec.count, rec.discrepancy, rec.envelope]
    row[4] = _elapsed_us(start, timing)
    return row


def _run_michel(cfg: ExperimentConfig) -> RunReport:
    start = time.perf_counter()
    f, g = cfg.polynomials
    alpha, beta = cfg.interval if cfg.alpha is not None else (None, None)
    rows = _map_primes(_michel_prime,
                       [(f, g, p, cfg.n, cfg.A, alpha, beta, cfg.constants, cfg.timing)
                        for p in cfg.prime_list()],
                       resolve_workers(cfg.workers))
    worst = max((r[5] for r in rows), default=None)
    flags = {"|michel_sum|<=michel*n/sqrt(p)": all(r[5] <= 1.0 for r in rows)}
    columns = PRIME_COLUMNS + ("michel_max_ratio",)
    if cfg.A is not None:
        flags["discrepancy<=st_poly*A^(1/2)*p^(1/4)"] = all(r[7] <= r[8] for r in rows)
        columns += ("interval_count", "discrepancy", "envelope")
    flags["ok"] = all(flags.values())
    wall = int((time.perf_counter() - start) * 1000)
    target = f"n<={cfg.n}" + (f" {_interval_text(cfg)}" if cfg.alpha is not None else "")
    summary = _summary(cfg, target, worst, None, None, 1.0, flags["ok"], wall)
    extra = {"empirical_average": "max over p, n, m of |michel_sum| / (michel*n/sqrt(p))",
             "count": "nonsingular fibers a in F_p"}
    return RunReport(summary, columns, rows, extra, flags)


def _run_verify(cfg: ExperimentConfig, log=None) -> RunReport:
    from .verify import all_passed, run_checks
    start = time.perf_counter()
    results = run_checks(cfg.level, log=log)
    rows = [[r.name, r.status, r.observed, r.bound, r.elapsed_ms if cfg.timing else 0]
            for r in results]
    ok = all_passed(results)
    passed = sum(r.passed for r in results)
    wall = int((time.perf_counter() - start) * 1000)
    summary = _summary(cfg, cfg.level, passed / len(results), None, None, None, ok, wall)
    extra = {"checks": len(results), "passed": passed,
             "findings": [r.name for r in results if not r.passed and not r.gating],
             "failures": [r.name for r in results if not r.passed and r.gating]}
    return RunReport(summary, ("check", "status", "observed", "bound", "elapsed_ms"), rows,
                     extra, {"ok": ok}, ok=ok)


def run(cfg: ExperimentConfig, log=None) -> RunReport:
    """Execute a validated config and return the report (nothing is written)."""
    if cfg.command in ("lt-avg", "st-avg", "onepar-st"):
        return _run_average(cfg)
    if cfg.command == "vertical-lt":
        return _run_vertical_lt(cfg)
    if cfg.command == "vertical-st":
        return _run_vertical_st(cfg)
    if cfg.command == "charsum-audit":
        return _run_charsum_audit(cfg)
    if cfg.command == "michel":
        return _run_michel(cfg)
    return _run_verify(cfg, log=log)


# -- argument parsing ------------------------------------------------------

def _constant_pair(text: str):
    key, sep, value = text.partition("=")
    if not sep:
        raise argparse.ArgumentTypeError("expected KEY=VALUE")
    try:
        return key.strip(), float(value)
    except ValueError:
        raise argparse.ArgumentTypeError(f"constant {key}: not a number")


def _prime_list(text: str):
    try:
        return [int(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError("expected a comma-separated list of integers")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="froblab", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"froblab {__version__}")
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="JSON config file; flags override its fields")
    common.add_argument("--output", "-o", help="summary CSV path (detail and sidecar go alongside)")
    common.add_argument("--format", choices=("csv", "json"))
    common.add_argument("--workers", type=int, help="worker processes (else FROBLAB_WORKERS)")
    common.add_argument("--no-timing", dest="timing", action="store_const", const=False,
                        help="write timing columns as 0 for byte-stable output")
    common.add_argument("--constant", action="append", type=_constant_pair, default=None,
                        metavar="KEY=VALUE", help="override an envelope constant")

    def family(p, one_parameter=False):
        p.add_argument("--f", help='polynomial, "c0,c1,..." or "T^3+2*T-1"')
        p.add_argument("--g", help="polynomial, same formats as --f")
        p.add_argument("--A", type=int)
        if not one_parameter:
            p.add_argument("--B", type=int)

    def interval(p):
        p.add_argument("--alpha", help="left endpoint, e.g. 0 or pi/3")
        p.add_argument("--beta", help="right endpoint, e.g. 2*pi/3")

    def primes(p):
        p.add_argument("--primes", type=_prime_list, help="explicit prime list, e.g. 101,211")

    sub = parser.add_subparsers(dest="command", required=True, metavar="COMMAND")
    p = sub.add_parser("lt-avg", parents=[common], help="Lang-Trotter average, two parameters")
    family(p)
    p.add_argument("--x", type=int)
    p.add_argument("--t", type=int)
    p = sub.add_parser("st-avg", parents=[common], help="Sato-Tate average, two parameters")
    family(p)
    p.add_argument("--x", type=int)
    interval(p)
    p = sub.add_parser("onepar-st", parents=[common], help="Sato-Tate average, one parameter")
    family(p, one_parameter=True)
    p.add_argument("--x", type=int)
    interval(p)
    p = sub.add_parser("vertical-lt", parents=[common], help="sum of #R_p(t)/p^2 over p <= x")
    p.add_argument("--x", type=int)
    p.add_argument("--t", type=int)
    p = sub.add_parser("vertical-st", parents=[common], help="angle counts over all curves mod p")
    p.add_argument("--x", type=int)
    primes(p)
    interval(p)
    p.add_argument("--n", type=int, help="largest Chebyshev degree for Katz sums")
    p = sub.add_parser("charsum-audit", parents=[common], help="Weil bound audit")
    p.add_argument("--f", help="first polynomial to audit")
    p.add_argument("--g", help="second polynomial to audit")
    p.add_argument("--x", type=int)
    primes(p)
    p = sub.add_parser("michel", parents=[common], help="Michel sums for E_{f(a),g(a)}")
    family(p, one_parameter=True)
    p.add_argument("--x", type=int)
    primes(p)
    interval(p)
    p.add_argument("--n", type=int, help="largest Chebyshev degree")
    p = sub.add_parser("verify", parents=[common], help="run the invariant suite")
    p.add_argument("--level", choices=("quick", "full"))
    return parser


def config_from_args(args: argparse.Namespace) -> ExperimentConfig:
    flags = {k: v for k, v in vars(args).items() if k not in ("config", "constant")}
    if args.constant:
        flags["constants"] = dict(args.constant)
    file_data = load_config_file(args.config) if args.config else None
    if file_data and file_data.get("command") not in (None, args.command):
        raise ConfigError(f"config: file is for {file_data['command']!r}, "
                          f"subcommand is {args.command!r}")
    return merge(file_data, flags)


def _print_check(res) -> None:
    print(f"{res.status:7s} {res.name}: {res.observed} (bound {res.bound})",
          file=sys.stderr, flush=True)


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = config_from_args(args)
        report = run(cfg, log=_print_check if cfg.command == "verify" else None)
        if cfg.output:
            writer = emit_json if cfg.format == "json" else emit_csv
            for path in writer(report, cfg, cfg.output):
                print(f"wrote {path}", file=sys.stderr)
        else:
            sys.stdout.write(summary_csv(report))
            sys.stdout.write("\n")
            sys.stdout.write(detail_csv(report))
    except (ConfigError, PolynomialParseError, InadmissibleFamily, IntervalError) as exc:
        print(f"froblab: error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except (ValueError, OSError) as exc:
        print(f"froblab: error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    if cfg.command == "verify" and not report.ok:
        return EXIT_VERIFY
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
