"""Invariant suite behind ``froblab verify``.

Every check compares a fast path against an independent oracle (point
enumeration, brute-force class counts, all-interval maximisation, ...)
or against a calibrated envelope. Checks return :class:`CheckResult`;
non-gating results are findings that are reported but never fail a run.
"""

from __future__ import annotations

import bisect
import time
from dataclasses import dataclass
from math import isclose, pi, sin, sqrt

import numpy as np

from . import constants
from .arith import (build_character_table, characters_of_order_dividing, sieve_primes)
from .averages import (AngleInterval, FamilySpec, li_half, lt_average, lt_total_per_curve,
                       michel_table, count_T_fgp, st_average, st_total_per_curve,
                       C0, onepar_st_average, onepar_total_per_curve)
from .charsums import (count_Zs_characters, count_Zs_loop, incomplete_sum,
                       incomplete_sum_envelope, second_moment_Zrs, second_moment_envelope,
                       weil_audit)
from .curves import class_table, enumerate_classes, orbit
from .polynomials import ONE_PARAMETER, is_proper_power_mod_p, parse_polynomial
from .satotate import chebyshev_u, mu_ST
from .vertical import (angle_sample_vertical, count_Rp, interval_discrepancy, katz_envelope,
                       katz_sum, st_vertical_envelope, trace_distribution, vertical_lt_sum)


@dataclass
class CheckResult:
    name: str
    passed: bool
    observed: str
    bound: str
    elapsed_ms: int = 0
    gating: bool = True

    @property
    def status(self) -> str:
        if self.passed:
            return "PASS"
        return "FAIL" if self.gating else "FINDING"


_REGISTRY: list[tuple[str, object]] = []


def check(name: str):
    def register(func):
        _REGISTRY.append((name, func))
        return func
    return register


def _primes(lo: int, hi: int) -> list[int]:
    return [p for p in sieve_primes(max(hi, 5)).tolist() if p >= lo]


# -- oracles ---------------------------------------------------------------

def enumerated_traces(p: int) -> np.ndarray:
    """``t[a, b] = p + 1 - #E_{a,b}(F_p)`` by counting ``(x, y)`` solutions.

    ``#{y : y^2 = v}`` is tabulated by squaring every ``y``; singular
    entries are left in place (callers mask them).
    """
    y = np.arange(p, dtype=np.int64)
    roots = np.bincount(y * y % p, minlength=p)
    x = np.arange(p, dtype=np.int64)
    cube = x**3 % p
    t = np.empty((p, p), dtype=np.int64)
    for a in range(p):
        rhs = (cube[:, None] + a * x[:, None] + np.arange(p)[None, :]) % p
        t[a] = p - roots[rhs].sum(axis=0)
    return t


def singular_mask(p: int) -> np.ndarray:
    a = np.arange(p, dtype=np.int64)
    return (4 * a[:, None] ** 3 + 27 * a[None, :] ** 2) % p == 0


def brute_discrepancy(angles, total: float | None = None) -> float:
    """Maximise over every interval with endpoints in {0, pi, sample angles}.

    Each endpoint may be closed or open, which realises the one-sided
    limits the supremum can approach.
    """
    angles = sorted(float(a) for a in angles)
    n = len(angles)
    total = float(n if total is None else total)
    ends = sorted(set(angles) | {0.0, pi})
    best = 0.0
    for i, lo in enumerate(ends):
        for hi in ends[i:]:
            mass = total * ((hi - lo) / pi - (sin(2 * hi) - sin(2 * lo)) / (2 * pi))
            variants = [(True, True)] if lo == hi else [
                (True, True), (True, False), (False, True), (False, False)]
            for closed_lo, closed_hi in variants:
                left = bisect.bisect_left(angles, lo) if closed_lo else bisect.bisect_right(angles, lo)
                right = bisect.bisect_right(angles, hi) if closed_hi else bisect.bisect_left(angles, hi)
                best = max(best, abs(max(right - left, 0) - mass))
    return best


# -- checks ----------------------------------------------------------------

@check("orthogonality over f-th power characters")
def _orth_powers(level):
    worst = 0.0
    for p in _primes(5, 50 if level == "full" else 13):
        table = build_character_table(p)
        units = np.arange(1, p)
        for f in range(1, p):
            if (p - 1) % f:
                continue
            fth = set(pow(int(w), f, p) for w in units)
            total = sum(table.values(j, units) for j in characters_of_order_dividing(p, f)) / f
            expect = np.array([1.0 if int(v) in fth else 0.0 for v in units])
            worst = max(worst, float(np.abs(total - expect).max()))
    return worst <= 1e-9, f"{worst:.3g}", "1e-9"


@check("orthogonality between pairs of characters")
def _orth_pairs(level):
    worst = 0.0
    for p in _primes(5, 31 if level == "full" else 11):
        table = build_character_table(p)
        units = np.arange(1, p)
        vals = np.array([table.values(j, units) for j in range(p - 1)])
        gram = vals @ vals.conj().T / (p - 1)
        worst = max(worst, float(np.abs(gram - np.eye(p - 1)).max()))
    return worst <= 1e-9, f"{worst:.3g}", "1e-9"


@check("discrete log round trip")
def _dlog(level):
    for p in _primes(5, 1000 if level == "full" else 100):
        table = build_character_table(p)
        k = np.arange(p - 1)
        if not np.array_equal(table.dlog[table.powers[k]], k):
            return False, f"p={p}", "exact"
    return True, "all", "exact"


@check("trace equals point enumeration")
def _trace_enum(level):
    for p in _primes(5, 31 if level == "full" else 13):
        table = class_table(p)
        grid = np.arange(p)
        fast = table.trace[table.class_index(grid[:, None], grid[None, :])]
        sing = singular_mask(p)
        if not np.array_equal(fast[~sing], enumerated_traces(p)[~sing]):
            return False, f"mismatch at p={p}", "exact"
    return True, "all fibers", "exact"


@check("Hasse bound")
def _hasse(level):
    worst = 0.0
    for p in _primes(5, 199 if level == "full" else 50):
        table = class_table(p)
        t = table.trace[~table.singular]
        worst = max(worst, float(np.abs(t).max() / (2 * sqrt(p))))
    return worst <= 1.0, f"max |t|/2sqrt(p) = {worst:.6f}", "1"


@check("class-wise R_p(t) equals brute force")
def _rp_brute(level):
    for p in _primes(5, 47 if level == "full" else 13):
        t = enumerated_traces(p)[1:, 1:]
        ok = ~singular_mask(p)[1:, 1:]
        brute = dict(zip(*np.unique(t[ok], return_counts=True)))
        fast = trace_distribution(p)
        if {int(k): int(v) for k, v in brute.items()} != fast:
            return False, f"p={p}", "exact"
        if count_Rp(p, 2 * p).count != 0:
            return False, f"p={p} beyond Hasse", "0"
    return True, "all t", "exact"


@check("partition, divisibility and twist symmetry of R_p(t)")
def _rp_partition(level):
    for p in _primes(5, 97 if level == "full" else 31):
        dist = trace_distribution(p)
        if sum(dist.values()) != (p - 1) * (p - 2):
            return False, f"sum at p={p}", "(p-1)(p-2)"
        if any(v % ((p - 1) // 2) for v in dist.values()):
            return False, f"divisibility at p={p}", "(p-1)/2 | count"
        if any(dist.get(-t, 0) != v for t, v in dist.items()):
            return False, f"symmetry at p={p}", "R(t) = R(-t)"
    return True, "all", "exact"


@check("orbit sizes, class members share a trace, twists negate it")
def _orbits(level):
    for p in _primes(5, 31 if level == "full" else 13):
        traces = enumerated_traces(p)
        sing = singular_mask(p)
        d = next(v for v in range(2, p) if pow(v, (p - 1) // 2, p) == p - 1)
        classes = enumerate_classes(p, "unit")
        for cls in classes:
            if cls.orbit_size != (p - 1) // 2:
                return False, f"orbit size at p={p}", "(p-1)/2"
            for a, b in orbit(p, *cls.representative):
                if traces[a, b] != cls.trace:
                    return False, f"trace not constant on class at p={p}", "exact"
        for a in range(p):
            for b in range(p):
                if not sing[a, b] and traces[d * d * a % p, d**3 * b % p] != -traces[a, b]:
                    return False, f"twist at p={p}", "t -> -t"
        n_all = len(enumerate_classes(p, "all"))
        if n_all != 2 * p + {1: 6, 5: 2, 7: 4, 11: 0}[p % 12]:
            return False, f"{n_all} classes at p={p}", "2p + 6, 2, 4, 0 by p mod 12"
    return True, "all", "exact"


@check("per-prime and per-curve totals agree")
def _dual(level):
    x, A = (200, 10) if level == "full" else (60, 3)
    pairs = [("T", "T"), ("T^2+1", "T^3+T+1")]
    interval = AngleInterval(pi / 3, 2 * pi / 3)
    for fs, gs in pairs:
        f, g = parse_polynomial(fs), parse_polynomial(gs)
        spec = FamilySpec(f, g, A, A)
        for t in (0, 1, -1, 2, -2):
            if lt_average(spec, t, x, timing=False).total != lt_total_per_curve(f, g, A, A, t, x):
                return False, f"LT {fs},{gs},t={t}", "exact"
        if st_average(spec, interval, x, timing=False).total != \
                st_total_per_curve(f, g, A, A, interval, x):
            return False, f"ST {fs},{gs}", "exact"
        one = FamilySpec(f, g, A, mode=ONE_PARAMETER)
        if onepar_st_average(one, interval, x, timing=False).total != \
                onepar_total_per_curve(f, g, A, interval, x):
            return False, f"one-parameter {fs},{gs}", "exact"
    return True, "exact", "exact"


@check("Z_s count: loop equals character identity")
def _zs(level):
    for p in _primes(5, 50 if level == "full" else 13):
        for gs in ("T", "T^2+1", "T^3+2"):
            g = parse_polynomial(gs)
            for s in (1, 2):
                for B in (0, 5, p):
                    if count_Zs_loop(g, s, B, p) != count_Zs_characters(g, s, B, p):
                        return False, f"p={p} g={gs} s={s} B={B}", "exact"
    return True, "exact", "exact"


WEIL_BATTERY = ("T", "2*T+1", "T^2+1", "T^2+T+3", "3*T^2+1", "T^3+T+1", "T^3+2",
                "T^4+T+1", "T^4+3*T^2+T+5")


@check("Weil envelope for complete twisted sums")
def _weil(level):
    polys = [parse_polynomial(s) for s in WEIL_BATTERY]
    rows = weil_audit(polys, _primes(5, 100 if level == "full" else 23))
    worst = max((r.max_ratio / r.bound_ratio for r in rows if not r.skipped), default=0.0)
    skipped = sum(r.skipped for r in rows)
    return all(r.ok for r in rows), f"max |S|/((deg+1)sqrt p) = {worst:.4f}; {skipped} skipped", "1"


@check("incomplete character sums")
def _incomplete(level):
    polys = [parse_polynomial(s) for s in WEIL_BATTERY]
    worst = 0.0
    for p in _primes(5, 50 if level == "full" else 13):
        for h in polys:
            if is_proper_power_mod_p(h, p):
                continue
            for j in range(1, p - 1):
                for L in range(-p, p + 1, 1 if level == "full" else 5):
                    for M in (1, 2, p // 3, p // 2, p - 1, p):
                        v = abs(incomplete_sum(h, j, L, M, p))
                        worst = max(worst, v / incomplete_sum_envelope(M, p))
    return worst <= 1.0, f"max ratio {worst:.4f}", "1"


@check("second moment of Z_rs")
def _moment_gating(level):
    f, g = parse_polynomial("T^2+1"), parse_polynomial("T^3+T+1")
    worst = max(second_moment_Zrs(f, g, 1, 10, 10, p) / second_moment_envelope(10, 10, p)
                for p in _primes(7, 31))
    return worst <= 1.0, f"max ratio {worst:.4f} (7 <= p <= 31)", "1"


@check("second moment of Z_rs at p = 5")
def _moment_finding(level):
    f, g = parse_polynomial("T^2+1"), parse_polynomial("T^3+T+1")
    ratio = second_moment_Zrs(f, g, 1, 10, 10, 5) / second_moment_envelope(10, 10, 5)
    return ratio <= 1.0, f"ratio {ratio:.4f}", "1", False


@check("Katz sums")
def _katz(level):
    worst = 0.0
    for p in _primes(5, 199 if level == "full" else 50):
        if not isclose(katz_sum(p, 0), (p - 2) / (p - 1), rel_tol=1e-12):
            return False, f"normalisation at p={p}", "(p-2)/(p-1)"
        for n in range(1, 11):
            worst = max(worst, abs(katz_sum(p, n)) / katz_envelope(p, n))
    return worst <= 1.0, f"max ratio {worst:.4f}", "1"


@check("vertical Sato-Tate discrepancy")
def _st_vertical(level):
    ratios = []
    for p in ((101, 211, 499) if level == "full" else (101,)):
        ratios.append(interval_discrepancy(angle_sample_vertical(p)) / st_vertical_envelope(p))
    return max(ratios) <= 1.0, f"max ratio {max(ratios):.4f}", "1"


@check("one-parameter discrepancy")
def _st_poly(level):
    worst = 0.0
    for fs, gs in (("T", "T"), ("T", "T^2")):
        for A in ((100, 200) if level == "full" else (100,)):
            rec = count_T_fgp(parse_polynomial(fs), parse_polynomial(gs), 499, A)
            worst = max(worst, rec.discrepancy / rec.envelope)
    return worst <= 1.0, f"max ratio {worst:.4f}", "1"


@check("Michel sums")
def _michel(level):
    f = g = parse_polynomial("T")
    worst = 0.0
    for p in _primes(5, 199 if level == "full" else 50):
        for n in range(1, 11):
            worst = max(worst, float(np.abs(michel_table(f, g, p, n)).max()) * sqrt(p) / (
                constants.MICHEL * n))
    return worst <= 1.0, f"max ratio {worst:.4f}", "1"


@check("discrepancy sweep equals all-interval maximum")
def _sweep(level):
    rng = np.random.default_rng(20240601)
    trials = 40 if level == "full" else 8
    for i in range(trials):
        size = int(rng.integers(1, 200 if level == "full" else 40))
        if i % 3 == 0:
            angles = np.round(rng.uniform(0, pi, size), 1)  # forces ties
        else:
            angles = rng.uniform(0, pi, size)
        total = None if i % 2 else size * 1.3
        fast = interval_discrepancy(np.sort(angles), total)
        slow = brute_discrepancy(angles, total)
        if not isclose(fast, slow, rel_tol=1e-9, abs_tol=1e-9):
            return False, f"{fast} vs {slow}", "exact"
    return True, f"{trials} samples", "exact"


@check("Sato-Tate measure additivity and Chebyshev recurrence")
def _measure(level):
    rng = np.random.default_rng(7)
    for _ in range(200):
        a, b, c = np.sort(rng.uniform(0, pi, 3))
        if not a < b < c:
            continue
        if abs(mu_ST(a, c) - mu_ST(a, b) - mu_ST(b, c)) > 1e-12:
            return False, "additivity", "1e-12"
    psi = rng.uniform(0.05, pi - 0.05, 200)
    for n in range(12):
        direct = np.sin((n + 1) * psi) / np.sin(psi)
        if np.abs(chebyshev_u(n, np.cos(psi)) - direct).max() > 1e-9:
            return False, f"U_{n}", "1e-9"
    return True, "ok", "1e-12 / 1e-9"


@check("Lang-Trotter upper envelope")
def _lt_upper(level):
    worst = 0.0
    for p in _primes(5, 199 if level == "full" else 50):
        for t in range(-3, 4):
            rec = count_Rp(p, t)
            worst = max(worst, rec.count / rec.envelope)
    return worst <= 1.0, f"max ratio {worst:.4f}", "1"


# -- statistical reproductions (reported, not gating) ---------------------

def statistical_checks() -> list[CheckResult]:
    out = []
    start = time.perf_counter()
    ratio = vertical_lt_sum(3000, 0) / (C0 * li_half(3000))
    out.append(CheckResult("vertical Lang-Trotter mean, x = 3000", 0.8 <= ratio <= 1.25,
                           f"ratio {ratio:.4f}", "[0.8, 1.25]",
                           int((time.perf_counter() - start) * 1000), gating=False))
    start = time.perf_counter()
    spec = FamilySpec(parse_polynomial("T^2+1"), parse_polynomial("T^3+T+1"), 200, 200)
    rep = st_average(spec, AngleInterval(pi / 3, 2 * pi / 3), 1000, timing=False)
    out.append(CheckResult("Sato-Tate average, x = 1000, A = B = 200", 0.85 <= rep.ratio <= 1.15,
                           f"ratio {rep.ratio:.4f}", "[0.85, 1.15]",
                           int((time.perf_counter() - start) * 1000), gating=False))
    return out


def run_checks(level: str = "full", statistics: bool = True, log=None) -> list[CheckResult]:
    if level not in ("quick", "full"):
        raise ValueError("level must be 'quick' or 'full'")
    results = []
    for name, func in _REGISTRY:
        start = time.perf_counter()
        passed, observed, bound, *rest = func(level)
        gating = rest[0] if rest else True
        res = CheckResult(name, bool(passed), str(observed), str(bound),
                          int((time.perf_counter() - start) * 1000), gating)
        results.append(res)
        if log:
            log(res)
    if statistics and level == "full":
        for res in statistical_checks():
            results.append(res)
            if log:
                log(res)
    return results


def all_passed(results) -> bool:
    return all(r.passed or not r.gating for r in results)
