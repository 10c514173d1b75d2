"""Averages over the families ``E_{f(a), g(b)}`` and ``E_{f(a), g(a)}``.

Two strategies compute the same integer totals:

* per curve: for every ``(a, b)`` walk the primes and count those with the
  requested trace or angle (the definition, used as an oracle);
* per prime: histogram ``f(a) mod p`` and ``g(b) mod p``, fold the
  histograms onto isomorphism classes and add up the classes whose trace
  or angle qualifies. Cost per prime is ``O(p log p)`` plus the range
  lengths, independent of ``A * B``.
"""

from __future__ import annotations

import os
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from math import log, pi, sqrt

import numpy as np
from scipy import integrate

from . import constants
from .arith import check_prime, legendre_table, prime_pi, sieve_primes
from .curves import (angle_class_mask, class_table, class_weights, residue_counts,
                     sato_tate_angles, trace_class_mask)
from .polynomials import (ONE_PARAMETER, TWO_PARAMETER, IntegerPolynomial,
                          discriminant_polynomial, eval_mod, family_is_admissible,
                          format_polynomial, is_proper_power_mod_p)
from .satotate import FULL, AngleInterval, chebyshev_u
from .vertical import interval_discrepancy

C0 = pi / 3


class InadmissibleFamily(ValueError):
    pass


def li_half(x: float) -> float:
    """``integral_2^x dz / (2 sqrt(z) log z)``.

    Computed as ``(1/2) integral_{sqrt 2}^{sqrt x} dw / log w`` (substitute
    ``z = w^2``), whose integrand is smooth on the whole range.
    """
    if x < 2:
        raise ValueError("li_half needs x >= 2")
    if x == 2:
        return 0.0
    value, err = integrate.quad(lambda w: 1.0 / log(w), sqrt(2.0), sqrt(x),
                                epsabs=1e-11, epsrel=1e-12, limit=200)
    return 0.5 * value


# -- single curves ---------------------------------------------------------

def _curve_trace(p: int, a: int, b: int) -> int | None:
    if (4 * a**3 + 27 * b**2) % p == 0:
        return None
    table = legendre_table(p)
    x = np.arange(p, dtype=np.int64)
    return -int(table[(x * x % p * x + a % p * x + b % p) % p].sum())


def curve_traces(a: int, b: int, x: int) -> dict[int, int]:
    """``{p: t_p}`` over primes ``5 <= p <= x`` of good reduction."""
    if 4 * a**3 + 27 * b**2 == 0 or x < 5:
        return {}
    out = {}
    for p in sieve_primes(x):
        t = _curve_trace(p, a, b)
        if t is not None:
            out[p] = t
    return out


def pi_LT_single(a: int, b: int, t: int, x: int) -> int:
    """Primes ``5 <= p <= x``, ``p`` not dividing ``4a^3 + 27b^2``, with trace `t`."""
    return sum(1 for tp in curve_traces(a, b, x).values() if tp == t)


def pi_ST_single(a: int, b: int, interval: AngleInterval, x: int) -> int:
    """Primes ``5 <= p <= x`` of good reduction with angle in `interval` (closed)."""
    if 4 * a**3 + 27 * b**2 == 0:
        return 0
    traces = curve_traces(a, b, x)
    return sum(1 for p, tp in traces.items()
               if interval.contains(sato_tate_angles(p, tp)))


# -- family specs and reports ---------------------------------------------

@dataclass(frozen=True)
class FamilySpec:
    f: IntegerPolynomial
    g: IntegerPolynomial
    A: int
    B: int | None = None
    mode: str = TWO_PARAMETER

    def check(self) -> None:
        verdict = family_is_admissible(self.f, self.g, self.mode)
        if not verdict:
            raise InadmissibleFamily(f"inadmissible family: {verdict.reason}")
        if self.A < 0 or (self.mode == TWO_PARAMETER and (self.B is None or self.B < 0)):
            raise ValueError("ranges A, B must be nonnegative integers")

    @property
    def normaliser(self) -> int:
        if self.mode == ONE_PARAMETER:
            return 2 * self.A if self.A > 0 else 1
        if self.A > 0 and self.B > 0:
            return 4 * self.A * self.B
        return (2 * self.A + 1) * (2 * self.B + 1)


@dataclass(frozen=True)
class PrimeRow:
    p: int
    count: int
    class_count: int
    max_trace: int
    elapsed_us: int
    improper: bool = False


@dataclass
class ExperimentReport:
    command: str
    family: FamilySpec
    x: int
    target: object
    total: int
    empirical_average: float
    main_term: float | None
    ratio: float | None
    envelope: float | None
    threshold_flags: dict
    normalized: float | None = None
    primes: list[PrimeRow] = field(default_factory=list)
    wall_time_ms: int = 0
    improper_primes: list[int] = field(default_factory=list)

    @property
    def threshold_ok(self) -> bool:
        return bool(self.threshold_flags.get("ok", False))


# -- thresholds and envelopes -----------------------------------------------

def lt_thresholds(A: int, B: int, x: float, eps: float = constants.EPSILON) -> dict:
    big = max(A * sqrt(B), sqrt(A) * B)
    flags = {"max(AB^1/2,A^1/2B)>=x^(5/4+eps)": big >= x ** (1.25 + eps),
             "min(A,B)>=x^(1/2+eps)": min(A, B) >= x ** (0.5 + eps)}
    flags["ok"] = all(flags.values())
    return flags


def st_thresholds(A: int, B: int, x: float, eps: float = constants.EPSILON) -> dict:
    big = max(A * sqrt(B), sqrt(A) * B)
    flags = {"max(AB^1/2,A^1/2B)>=x^(1+eps)": big >= x ** (1.0 + eps),
             "min(A,B)>=x^(1/2+eps)": min(A, B) >= x ** (0.5 + eps)}
    flags["ok"] = all(flags.values())
    return flags


def onepar_thresholds(A: int, x: float, eps: float = constants.EPSILON) -> dict:
    flags = {"A>=x^(1/2+eps)": A >= x ** (0.5 + eps)}
    flags["ok"] = all(flags.values())
    return flags


@dataclass(frozen=True)
class ErrorEnvelope:
    full: float
    simplified: float
    terms: tuple[float, ...]


def error_envelope(theta: float, U: float, V: float, z: float) -> ErrorEnvelope:
    """The seven-term bound for ``|M_p(S, A, B) - 4AB #S / (p-1)^2|``.

    ``U = max(A, B)``, ``V = min(A, B)``, ``z = p`` and ``#S <= p^{2-theta}``.
    The simplified form drops ``UV/z`` and ``U``, which are dominated when
    ``theta <= 1/2``; hence ``simplified <= full <= 2 * simplified``.
    """
    if not 0.0 <= theta <= 0.5:
        raise ValueError("theta must lie in [0, 1/2]")
    if not (U >= V >= 1 and z >= 2):
        raise ValueError("need U >= V >= 1 and z >= 2")
    terms = (
        U * V * z ** (-0.5 - theta / 2),
        U * sqrt(V) * z ** (-theta / 2),
        U * V / z,
        U * z ** (0.5 - theta),
        U,
        V * z ** (0.5 - theta / 2),
        sqrt(V) * z ** (1 - theta / 2),
    )
    full = sum(terms)
    simplified = full - terms[2] - terms[4]
    assert simplified <= full <= 2 * simplified + 1e-9 * full
    return ErrorEnvelope(full, simplified, terms)


def _family_envelope(theta: float, A: int, B: int, primes, normaliser: int) -> float | None:
    U, V = max(A, B), min(A, B)
    if V < 1:
        return None
    return sum(error_envelope(theta, U, V, p).full for p in primes) / normaliser


# -- per-prime engine ------------------------------------------------------

def resolve_workers(workers: int | None = None) -> int:
    if workers:
        return max(1, int(workers))
    env = os.environ.get("FROBLAB_WORKERS")
    if env:
        return max(1, int(env))
    return os.cpu_count() or 1


def _map_primes(func, args_list, workers: int):
    """Apply `func` to every argument tuple; results come back in input order."""
    if workers <= 1 or len(args_list) < 2:
        return [func(*args) for args in args_list]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(func, *zip(*args_list), chunksize=max(1, len(args_list) // (4 * workers))))


def _two_param_prime(f, g, A, B, p, kind, target):
    start = time.perf_counter_ns()
    table = class_table(p)
    w = class_weights(table, residue_counts(f, A, p), residue_counts(g, B, p))
    if kind == "lt":
        mask = trace_class_mask(p, target)
    else:
        mask = angle_class_mask(p, target[0], target[1])
    count = int(w[mask].sum())
    improper = (bool(f.reduce(p)) and is_proper_power_mod_p(f, p)) or \
               (bool(g.reduce(p)) and is_proper_power_mod_p(g, p))
    max_t = int(np.abs(table.trace[~table.singular]).max())
    elapsed = (time.perf_counter_ns() - start) // 1000
    return PrimeRow(p, count, int(mask.sum()), max_t, int(elapsed), bool(improper))


def _one_param_prime(f, g, A, p, target):
    start = time.perf_counter_ns()
    table = class_table(p)
    residues = np.arange(p, dtype=np.int64)
    mult = residue_counts(IntegerPolynomial([0, 1]), A, p)
    idx = table.class_index(eval_mod(f, residues, p), eval_mod(g, residues, p))
    mask = angle_class_mask(p, target[0], target[1])
    count = int(mult[mask[idx]].sum())
    max_t = int(np.abs(table.trace[~table.singular]).max())
    elapsed = (time.perf_counter_ns() - start) // 1000
    return PrimeRow(p, count, int(np.unique(idx[mask[idx]]).size), max_t, int(elapsed))


def _primes_upto(x: int) -> list[int]:
    return sieve_primes(x).tolist() if x >= 5 else []


def _strip_timing(rows, keep: bool):
    if keep:
        return rows
    return [PrimeRow(r.p, r.count, r.class_count, r.max_trace, 0, r.improper) for r in rows]


def lt_average(spec: FamilySpec, t: int, x: int, workers: int | None = 1,
               eps: float = constants.EPSILON, timing: bool = True) -> ExperimentReport:
    """Average of ``Pi^LT_{f(a), g(b)}(t; x)`` over ``|a| <= A``, ``|b| <= B``."""
    spec.check()
    if spec.mode != TWO_PARAMETER:
        raise ValueError("lt_average needs a two-parameter family")
    start = time.perf_counter()
    primes = _primes_upto(x)
    rows = _map_primes(_two_param_prime,
                       [(spec.f, spec.g, spec.A, spec.B, p, "lt", t) for p in primes],
                       resolve_workers(workers))
    total = sum(r.count for r in rows)
    avg = total / spec.normaliser
    lh = li_half(x) if x >= 2 else 0.0
    main = C0 * lh if t == 0 and lh > 0 else None
    report = ExperimentReport(
        command="lt-avg", family=spec, x=x, target=t, total=total,
        empirical_average=avg, main_term=main,
        ratio=avg / main if main else None,
        envelope=_family_envelope(0.5, spec.A, spec.B, primes, spec.normaliser),
        threshold_flags=lt_thresholds(spec.A, spec.B, x, eps),
        normalized=avg / lh if lh > 0 else None,
        primes=_strip_timing(rows, timing),
        improper_primes=[r.p for r in rows if r.improper],
    )
    report.wall_time_ms = int((time.perf_counter() - start) * 1000) if timing else 0
    return report


def st_main_term(interval: AngleInterval, x: int) -> float:
    """``mu_ST * (pi(x) - 2)``: primes 2 and 3 never take part."""
    return interval.measure * max(prime_pi(x) - 2, 0)


def st_average(spec: FamilySpec, interval: AngleInterval, x: int, workers: int | None = 1,
               eps: float = constants.EPSILON, timing: bool = True) -> ExperimentReport:
    """Average of ``Pi^ST_{f(a), g(b)}(alpha, beta; x)`` over the two-parameter box."""
    spec.check()
    if spec.mode != TWO_PARAMETER:
        raise ValueError("st_average needs a two-parameter family")
    start = time.perf_counter()
    primes = _primes_upto(x)
    target = (interval.alpha, interval.beta)
    rows = _map_primes(_two_param_prime,
                       [(spec.f, spec.g, spec.A, spec.B, p, "st", target) for p in primes],
                       resolve_workers(workers))
    total = sum(r.count for r in rows)
    avg = total / spec.normaliser
    main = st_main_term(interval, x)
    report = ExperimentReport(
        command="st-avg", family=spec, x=x, target=interval, total=total,
        empirical_average=avg, main_term=main,
        ratio=avg / main if main > 0 else None,
        envelope=_family_envelope(0.0, spec.A, spec.B, primes, spec.normaliser),
        threshold_flags=st_thresholds(spec.A, spec.B, x, eps),
        primes=_strip_timing(rows, timing),
        improper_primes=[r.p for r in rows if r.improper],
    )
    report.wall_time_ms = int((time.perf_counter() - start) * 1000) if timing else 0
    return report


def onepar_st_average(spec: FamilySpec, interval: AngleInterval, x: int,
                      workers: int | None = 1, eps: float = constants.EPSILON,
                      c: float = constants.ST_POLY, timing: bool = True) -> ExperimentReport:
    """Average of ``Pi^ST_{f(a), g(a)}(alpha, beta; x)`` over ``|a| <= A``."""
    spec.check()
    if spec.mode != ONE_PARAMETER:
        raise ValueError("onepar_st_average needs a one-parameter family")
    start = time.perf_counter()
    primes = _primes_upto(x)
    target = (interval.alpha, interval.beta)
    rows = _map_primes(_one_param_prime,
                       [(spec.f, spec.g, spec.A, p, target) for p in primes],
                       resolve_workers(workers))
    total = sum(r.count for r in rows)
    avg = total / spec.normaliser
    main = st_main_term(interval, x)
    env = sum(c * sqrt(spec.A) * p**0.25 for p in primes) / spec.normaliser if spec.A else None
    report = ExperimentReport(
        command="onepar-st", family=spec, x=x, target=interval, total=total,
        empirical_average=avg, main_term=main,
        ratio=avg / main if main > 0 else None,
        envelope=env,
        threshold_flags=onepar_thresholds(spec.A, x, eps),
        primes=_strip_timing(rows, timing),
    )
    report.wall_time_ms = int((time.perf_counter() - start) * 1000) if timing else 0
    return report


# -- per-curve oracles -----------------------------------------------------

def lt_total_per_curve(f, g, A: int, B: int, t: int, x: int) -> int:
    fa = {a: f(a) for a in range(-A, A + 1)}
    gb = {b: g(b) for b in range(-B, B + 1)}
    return sum(pi_LT_single(fa[a], gb[b], t, x) for a in fa for b in gb)


def st_total_per_curve(f, g, A: int, B: int, interval: AngleInterval, x: int) -> int:
    fa = {a: f(a) for a in range(-A, A + 1)}
    gb = {b: g(b) for b in range(-B, B + 1)}
    return sum(pi_ST_single(fa[a], gb[b], interval, x) for a in fa for b in gb)


def onepar_total_per_curve(f, g, A: int, interval: AngleInterval, x: int) -> int:
    return sum(pi_ST_single(f(a), g(a), interval, x) for a in range(-A, A + 1))


# -- one-parameter statistics at a fixed prime ------------------------------

def _onepar_traces(f, g, p: int, a_values) -> tuple[np.ndarray, np.ndarray]:
    """Traces and singular flags of ``E_{f(a), g(a)}`` mod `p`."""
    table = class_table(p)
    a_values = np.asarray(a_values, dtype=np.int64)
    idx = table.class_index(eval_mod(f, a_values, p), eval_mod(g, a_values, p))
    return table.trace[idx], table.singular[idx]


def _require_nondegenerate(f, g, p: int) -> None:
    if not discriminant_polynomial(f, g).reduce(p):
        raise ValueError(f"4f^3 + 27g^2 vanishes identically modulo {p}")


def michel_table(f, g, p: int, n: int) -> np.ndarray:
    """``(1/p) sum_a U_n(cos psi_a) e(ma/p)`` for every ``m`` in ``0..p-1``."""
    p = check_prime(p)
    _require_nondegenerate(f, g, p)
    if n < 1:
        raise ValueError("n must be >= 1")
    tr, sing = _onepar_traces(f, g, p, np.arange(p))
    values = np.where(sing, 0.0, chebyshev_u(n, tr / (2.0 * sqrt(p))))
    return np.fft.ifft(values)


def michel_sum(f, g, p: int, n: int, m: int) -> complex:
    """``(1/p) sum over a in F_p (nonsingular) of U_n(cos psi_a) e(ma/p)``."""
    p = check_prime(p)
    _require_nondegenerate(f, g, p)
    if n < 1:
        raise ValueError("n must be >= 1")
    a = np.arange(p)
    tr, sing = _onepar_traces(f, g, p, a)
    u = np.where(sing, 0.0, chebyshev_u(n, tr / (2.0 * sqrt(p))))
    return complex((u * np.exp(2j * np.pi * (m * a % p) / p)).sum() / p)


def michel_incomplete(f, g, p: int, n: int, A: int) -> float:
    """``(1/p) sum_{|a| <= A} U_n(cos psi_a)`` over nonsingular ``a``."""
    p = check_prime(p)
    _require_nondegenerate(f, g, p)
    tr, sing = _onepar_traces(f, g, p, np.arange(-A, A + 1))
    u = np.where(sing, 0.0, chebyshev_u(n, tr / (2.0 * sqrt(p))))
    return float(u.sum() / p)


def michel_envelope(p: int, n: int, c: float = constants.MICHEL) -> float:
    return c * n / sqrt(p)


@dataclass(frozen=True)
class OneParamCount:
    p: int
    A: int
    interval: AngleInterval
    count: int
    singular: int
    expected: float
    deviation: float
    discrepancy: float
    envelope: float

    @property
    def within_envelope(self) -> bool:
        return self.discrepancy <= self.envelope


def onepar_angles(f, g, p: int, A: int) -> np.ndarray:
    """Sorted angles of ``E_{f(a), g(a)}`` mod `p` over nonsingular ``|a| <= A``."""
    tr, sing = _onepar_traces(f, g, p, np.arange(-A, A + 1))
    return np.sort(sato_tate_angles(p, tr[~sing]))


def count_T_fgp(f, g, p: int, A: int, interval: AngleInterval = FULL,
                c: float = constants.ST_POLY) -> OneParamCount:
    """``#T_{f,g,p}(A; alpha, beta)`` with the discrepancy against ``2 mu_ST A``."""
    p = check_prime(p)
    if not 1 <= A < p / 2:
        raise ValueError("need a positive integer A < p/2")
    if discriminant_polynomial(f, g).is_zero():
        raise InadmissibleFamily("4f^3 + 27g^2 vanishes identically")
    angles = onepar_angles(f, g, p, A)
    count = int(interval.contains(angles).sum())
    expected = 2 * interval.measure * A
    disc = interval_discrepancy(angles, total=2 * A) if angles.size else 2.0 * A
    return OneParamCount(
        p=p, A=A, interval=interval, count=count,
        singular=2 * A + 1 - angles.size, expected=expected,
        deviation=abs(count - expected), discrepancy=disc,
        envelope=c * sqrt(A) * p**0.25,
    )


def describe_family(spec: FamilySpec) -> tuple[str, str]:
    return format_polynomial(spec.f), format_polynomial(spec.g)
