"""Multiplicative character sums and the sextic/quartic counting sets.

``Z_s(B; p)`` collects pairs ``(u, b)`` with ``s u^6 = g(b)``; the triple
set ``Z_{r,s}(A, B; p)`` adds ``a`` with ``r u^4 = f(a)``. Counts are
computed directly and, for ``Z_s``, a second time through the sum of the
characters whose ``gcd(p-1, 6)``-th power is principal.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import log, sqrt

import numpy as np

from . import constants
from .arith import (build_character_table, characters_of_order_dividing,
                    check_prime, sextic_degree)
from .curves import residue_counts
from .polynomials import IntegerPolynomial, eval_mod, is_proper_power_mod_p


@dataclass(frozen=True)
class TwistedSumResult:
    p: int
    j: int
    m: int
    value: complex
    modulus_bound: float
    degree: int

    @property
    def ratio(self) -> float:
        """``|value| / sqrt(p)``."""
        return abs(self.value) / sqrt(self.p)

    @property
    def within_bound(self) -> bool:
        return abs(self.value) <= self.modulus_bound


def weil_bound(h: IntegerPolynomial, p: int, extra: int = constants.WEIL_EXTRA) -> float:
    return (h.degree + extra) * sqrt(p)


def _character_exponents(h: IntegerPolynomial, j: int, p: int, points) -> np.ndarray:
    table = build_character_table(p)
    return table.exponent(j, eval_mod(h, np.asarray(points, dtype=np.int64), p))


def complete_twisted_sum(h: IntegerPolynomial, j: int, m: int, p: int) -> TwistedSumResult:
    """``sum_{u=1}^{p} chi_j(h(u)) exp(2 pi i m u / p)`` by direct summation."""
    p = check_prime(p)
    if j % (p - 1) == 0:
        raise ValueError("the principal character is excluded (no Weil bound)")
    if not h.reduce(p):
        raise ValueError("h vanishes identically modulo p")
    u = np.arange(1, p + 1, dtype=np.int64)
    e = _character_exponents(h, j, p, u)
    keep = e >= 0
    phase = e[keep] / (p - 1) + (m * u[keep] % p) / p
    value = complex(np.exp(2j * np.pi * phase).sum())
    return TwistedSumResult(p, j % (p - 1), m % p, value, weil_bound(h, p), h.degree)


def twisted_sum_table(h: IntegerPolynomial, p: int) -> np.ndarray:
    """All sums at once: entry ``[j, m]`` for ``0 <= j < p-1``, ``0 <= m < p``.

    Row ``j`` is a discrete Fourier transform over ``u`` of ``chi_j(h(u))``.
    """
    p = check_prime(p)
    table = build_character_table(p)
    v = eval_mod(h, np.arange(p, dtype=np.int64), p)
    d = table.dlog[v]
    j = np.arange(p - 1)[:, None]
    chi = np.exp(2j * np.pi * ((j * d[None, :]) % (p - 1)) / (p - 1))
    chi[:, v == 0] = 0.0
    # sum_u x_u e^{+2 pi i m u/p} = p * ifft(x)[m]
    return np.fft.ifft(chi, axis=1) * p


def incomplete_sum(h: IntegerPolynomial, j: int, L: int, M: int, p: int) -> complex:
    """``sum_{n=L+1}^{L+M} chi_j(h(n))``."""
    p = check_prime(p)
    if j % (p - 1) == 0:
        raise ValueError("the principal character is excluded")
    if M < 1:
        raise ValueError("M must be positive")
    n = np.arange(L + 1, L + M + 1, dtype=np.int64)
    e = _character_exponents(h, j, p, n)
    e = e[e >= 0]
    return complex(np.exp(2j * np.pi * e / (p - 1)).sum())


def incomplete_sum_envelope(M: int, p: int, c: float = constants.INCOMPLETE_SUM) -> float:
    return c * (M / p + 1) * sqrt(p) * log(p)


@dataclass(frozen=True)
class ZCounts:
    p: int
    s: int
    A: int | None
    B: int
    count: int
    r: int | None = None

    @property
    def trivial_bound(self) -> int:
        return (self.p - 1) * (2 * self.B + 1)


def _unit(v: int, p: int, name: str) -> int:
    v %= p
    if v == 0:
        raise ValueError(f"{name} must be a unit modulo p")
    return v


def count_Zs_loop(g: IntegerPolynomial, s: int, B: int, p: int) -> int:
    u = np.arange(1, p, dtype=np.int64)
    lhs = s * (u**2 % p) ** 3 % p
    total = 0
    for start in range(-B, B + 1, 4096):
        b = np.arange(start, min(start + 4096, B + 1), dtype=np.int64)
        rhs = eval_mod(g, b, p)
        total += int((lhs[:, None] == rhs[None, :]).sum())
    return total


def count_Zs_characters(g: IntegerPolynomial, s: int, B: int, p: int) -> int:
    """``sum_{|b|<=B} sum_{chi^{d_p} = 1} chi(s^{-1} g(b))`` rounded to an integer."""
    table = build_character_table(p)
    n = p - 1
    sbar = pow(s, -1, p)
    b = np.arange(-B, B + 1, dtype=np.int64)
    v = sbar * eval_mod(g, b, p) % p
    counts = np.bincount(v, minlength=p)
    total = 0j
    for j in characters_of_order_dividing(p, sextic_degree(p)):
        e = (j * table.dlog[1:]) % n
        total += (counts[1:] * np.exp(2j * np.pi * e / n)).sum()
    value = round(total.real)
    assert abs(total - value) < 1e-6 * max(1, abs(value)), total
    return int(value)


def count_Zs(g: IntegerPolynomial, s: int, B: int, p: int) -> ZCounts:
    """``#Z_s(B; p)`` by direct loop, confirmed by the character identity."""
    p = check_prime(p)
    s = _unit(s, p, "s")
    direct = count_Zs_loop(g, s, B, p)
    via_chars = count_Zs_characters(g, s, B, p)
    if direct != via_chars:
        raise AssertionError(f"Z_s count mismatch: loop {direct} vs characters {via_chars}")
    return ZCounts(p, s, None, B, direct)


def _power_residues(p: int):
    u = np.arange(1, p, dtype=np.int64)
    u2 = u * u % p
    u4 = u2 * u2 % p
    return u4, u4 * u2 % p


def count_Zrs(f: IntegerPolynomial, g: IntegerPolynomial, r: int, s: int,
              A: int, B: int, p: int) -> ZCounts:
    """``#{(u, a, b) : r u^4 = f(a), s u^6 = g(b), |a| <= A, |b| <= B}``."""
    p = check_prime(p)
    r = _unit(r, p, "r")
    s = _unit(s, p, "s")
    u4, u6 = _power_residues(p)
    fc = residue_counts(f, A, p)
    gc = residue_counts(g, B, p)
    count = int((fc[r * u4 % p] * gc[s * u6 % p]).sum())
    return ZCounts(p, s, A, B, count, r=r)


def zrs_profile(f: IntegerPolynomial, g: IntegerPolynomial, s: int,
                A: int, B: int, p: int) -> np.ndarray:
    """``#Z_{r,s}(A, B; p)`` for ``r = 1..p-1`` (index ``r - 1``)."""
    u4, u6 = _power_residues(p)
    fc = residue_counts(f, A, p)
    gc = residue_counts(g, B, p)
    r = np.arange(1, p, dtype=np.int64)
    return fc[(r[:, None] * u4[None, :]) % p] @ gc[s * u6 % p]


def second_moment_Zrs(f: IntegerPolynomial, g: IntegerPolynomial, s: int,
                      A: int, B: int, p: int, centering: str = "statement") -> float:
    """``sum_{r != 0} |#Z_{r,s} - centre|^2``.

    ``centering="statement"`` uses ``2A #Z_s(B;p) / (p-1)``;
    ``centering="proof"`` uses ``4AB / (p-1)``.
    """
    p = check_prime(p)
    s = _unit(s, p, "s")
    profile = zrs_profile(f, g, s, A, B, p)
    if centering == "statement":
        centre = 2 * A * count_Zs_loop(g, s, B, p) / (p - 1)
    elif centering == "proof":
        centre = 4 * A * B / (p - 1)
    else:
        raise ValueError("centering must be 'statement' or 'proof'")
    return float(((profile - centre) ** 2).sum())


def second_moment_envelope(A: int, B: int, p: int, c: float = constants.ZRS_MOMENT) -> float:
    return c * (A / p + 1) ** 2 * (B / p + 1) * B * p * log(p) ** 2


@dataclass(frozen=True)
class WeilAuditRow:
    p: int
    polynomial: str
    degree: int
    skipped: bool
    max_ratio: float
    bound_ratio: float

    @property
    def ok(self) -> bool:
        return self.skipped or self.max_ratio <= self.bound_ratio + 1e-9


def weil_audit(polys, primes, extra: int = constants.WEIL_EXTRA) -> list[WeilAuditRow]:
    """Max of ``|sum| / sqrt(p)`` over nonprincipal ``j`` and all ``m``.

    Primes where ``h`` is a proper power mod ``p`` are recorded as skipped.
    """
    rows = []
    for p in primes:
        for h in polys:
            if not h.reduce(p) or is_proper_power_mod_p(h, p):
                rows.append(WeilAuditRow(p, str(h), h.degree, True, float("nan"),
                                         h.degree + extra))
                continue
            table = twisted_sum_table(h, p)
            ratio = float(np.abs(table[1:]).max() / sqrt(p))
            rows.append(WeilAuditRow(p, str(h), h.degree, False, ratio, h.degree + extra))
    return rows
