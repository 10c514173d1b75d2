"""Traces of Frobenius, Sato-Tate angles and isomorphism classes over F_p.

Curves are the short Weierstrass models ``Y^2 = X^3 + aX + b``. Over F_p
(p > 3) the pairs ``(a, b)`` and ``(r u^4, s u^6)`` give isomorphic curves
for every unit ``u``, so the trace of Frobenius is a class function. Writing
units as powers of a primitive root turns the action into the translation
``(i, j) -> (i + 4k, j + 6k)`` on exponents, which gives every pair a class
index in O(1) and lets one row of traces serve many classes at once.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache
from math import gcd, isqrt, sqrt, acos

import numpy as np

from .arith import build_character_table, check_prime, legendre_table
from .polynomials import IntegerPolynomial, eval_mod


class SingularCurveError(ValueError):
    pass


@dataclass(frozen=True)
class CurveFiber:
    p: int
    a: int
    b: int
    discriminant: int

    @property
    def singular(self) -> bool:
        return self.discriminant == 0


def make_fiber(p: int, a: int, b: int) -> CurveFiber:
    """Reduce ``(a, b)`` modulo `p` and attach ``4a^3 + 27b^2 mod p``."""
    p = check_prime(p)
    a %= p
    b %= p
    return CurveFiber(p, a, b, (4 * a**3 + 27 * b**2) % p)


@dataclass(frozen=True)
class TraceRecord:
    """Trace and Sato-Tate angle; singular fibers carry ``t=None, psi=0``."""

    p: int
    t: int | None
    psi: float
    singular: bool = False


def hasse_bound_ok(p: int, t: int) -> bool:
    return t * t <= 4 * p


def sato_tate_angle(p: int, t: int) -> float:
    """The angle ``psi`` in ``[0, pi]`` with ``t = 2 sqrt(p) cos(psi)``."""
    if not hasse_bound_ok(p, t):
        raise ValueError(f"|t| = {abs(t)} exceeds the Hasse bound 2*sqrt({p})")
    c = t / (2.0 * sqrt(p))
    return acos(min(1.0, max(-1.0, c)))


def sato_tate_angles(p: int, t) -> np.ndarray:
    """Vectorised :func:`sato_tate_angle` (no Hasse check)."""
    c = np.asarray(t, dtype=float) / (2.0 * sqrt(p))
    return np.arccos(np.clip(c, -1.0, 1.0))


def _trace_from_table(p: int, a: int, b: int, table: np.ndarray) -> int:
    x = np.arange(p, dtype=np.int64)
    return -int(table[(x * x % p * x + a * x + b) % p].sum())


def trace_of_frobenius(fiber: CurveFiber) -> TraceRecord:
    """``t = p + 1 - #E(F_p) = -sum_x ((x^3 + ax + b) / p)``."""
    p = fiber.p
    if fiber.singular:
        return TraceRecord(p, None, 0.0, singular=True)
    t = _trace_from_table(p, fiber.a, fiber.b, legendre_table(p))
    return TraceRecord(p, t, sato_tate_angle(p, t))


def trace(p: int, a: int, b: int) -> int:
    """Trace of Frobenius of ``E_{a,b}`` mod `p`; raises on singular input."""
    rec = trace_of_frobenius(make_fiber(p, a, b))
    if rec.singular:
        raise SingularCurveError(f"E_({a},{b}) is singular modulo {p}")
    return rec.t


def row_traces(p: int, a: int) -> np.ndarray:
    """Traces of ``E_{a,s}`` for every ``s`` in F_p (singular entries included).

    ``t(a, s) = -sum_c H[c] L[c + s]`` with ``H`` the value histogram of
    ``x^3 + ax``; the correlation is done by FFT and rounded. The values
    are integers of size at most ``p``, far inside double precision.
    """
    table = legendre_table(p).astype(float)
    x = np.arange(p, dtype=np.int64)
    hist = np.bincount((x * x % p * x + a * x) % p, minlength=p).astype(float)
    corr = np.fft.irfft(np.conj(np.fft.rfft(hist)) * np.fft.rfft(table), n=p)
    out = np.rint(-corr).astype(np.int64)
    assert np.abs(out + corr).max() < 1e-6
    return out


def is_isomorphic(p: int, first: tuple[int, int], second: tuple[int, int]) -> bool:
    """Whether ``a = r u^4`` and ``b = s u^6`` for some unit ``u``."""
    p = check_prime(p)
    (a, b), (r, s) = first, second
    if make_fiber(p, a, b).singular or make_fiber(p, r, s).singular:
        raise SingularCurveError("isomorphism test needs nonsingular curves")
    a, b, r, s = a % p, b % p, r % p, s % p
    for u in range(1, p):
        u2 = u * u % p
        u4 = u2 * u2 % p
        if a == r * u4 % p and b == s * u4 * u2 % p:
            return True
    return False


UNIT = "unit"
AXIS_B = "axis-b"  # pairs (0, s), s != 0
AXIS_A = "axis-a"  # pairs (r, 0), r != 0
ORIGIN = "origin"


@dataclass(frozen=True)
class ClassTable:
    """All isomorphism classes of pairs in F_p x F_p, with one trace each.

    Class indices: ``i0 * g0 + j0`` for unit pairs (``i0 < d4``,
    ``j0 < g0``), then ``(0, s)`` classes, then ``(r, 0)`` classes, then the
    single class ``(0, 0)``. Representatives stored here are the
    exponent-canonical members ``(g^i0, g^j0)``, not the lexicographic ones.
    """

    p: int
    d4: int
    g0: int
    e6: int
    rep_a: np.ndarray = field(repr=False)
    rep_b: np.ndarray = field(repr=False)
    orbit_size: np.ndarray = field(repr=False)
    trace: np.ndarray = field(repr=False)
    singular: np.ndarray = field(repr=False)
    kind: np.ndarray = field(repr=False)
    # per-residue helpers for class_index
    _unit_base: np.ndarray = field(repr=False)
    _unit_shift: np.ndarray = field(repr=False)
    _jmod: np.ndarray = field(repr=False)
    _jmod6: np.ndarray = field(repr=False)

    @property
    def n_unit(self) -> int:
        return self.d4 * self.g0

    def __len__(self) -> int:
        return len(self.trace)

    @property
    def angle(self) -> np.ndarray:
        return np.where(self.singular, 0.0, sato_tate_angles(self.p, self.trace))

    def class_index(self, a, b) -> np.ndarray:
        """Class index of each pair ``(a, b)``; broadcasts like numpy."""
        p = self.p
        a = np.asarray(a, dtype=np.int64) % p
        b = np.asarray(b, dtype=np.int64) % p
        unit = self._unit_base[a] + (self._jmod[b] - self._unit_shift[a]) % self.g0
        nu = self.n_unit
        out = np.where(a == 0, nu + self._jmod6[b], unit)
        out = np.where(b == 0, nu + self.e6 + self._amod4(a), out)
        return np.where((a == 0) & (b == 0), len(self) - 1, out)

    def _amod4(self, a):
        return self._unit_base[a] // self.g0


@lru_cache(maxsize=16)
def class_table(p: int) -> ClassTable:
    p = check_prime(p)
    ct = build_character_table(p)
    n = p - 1
    d4 = gcd(4, n)
    n4 = n // d4
    g0 = gcd(6 * n4, n)
    e6 = gcd(6, n)
    inv = pow(4 // d4, -1, n4) if n4 > 1 else 0

    dlog = ct.dlog
    i = dlog.copy()
    i0 = i % d4
    k = ((i - i0) // d4 * inv) % max(n4, 1)
    unit_base = i0 * g0
    unit_shift = (6 * k) % g0
    jmod = dlog % g0
    jmod6 = dlog % e6

    powers = ct.powers
    rows = {0: row_traces(p, 0)}
    for r_exp in range(d4):
        rows[int(powers[r_exp])] = row_traces(p, int(powers[r_exp]))

    rep_a, rep_b, size, kind = [], [], [], []
    for i_0 in range(d4):
        for j_0 in range(g0):
            rep_a.append(powers[i_0])
            rep_b.append(powers[j_0])
            size.append(n // 2)
            kind.append(UNIT)
    for j in range(e6):
        rep_a.append(0)
        rep_b.append(powers[j])
        size.append(n // e6)
        kind.append(AXIS_B)
    for i_ in range(d4):
        rep_a.append(powers[i_])
        rep_b.append(0)
        size.append(n // d4)
        kind.append(AXIS_A)
    rep_a.append(0)
    rep_b.append(0)
    size.append(1)
    kind.append(ORIGIN)

    rep_a = np.array(rep_a, dtype=np.int64)
    rep_b = np.array(rep_b, dtype=np.int64)
    trace = np.array([rows[int(a)][int(b)] for a, b in zip(rep_a, rep_b)], dtype=np.int64)
    singular = (4 * rep_a**3 + 27 * rep_b**2) % p == 0
    trace[singular] = 0
    # residue 0 never reaches the unit branch; keep it harmless
    unit_base[0] = 0
    unit_shift[0] = 0
    for arr in (rep_a, rep_b, trace, singular, unit_base, unit_shift, jmod, jmod6):
        arr.flags.writeable = False
    return ClassTable(
        p=p, d4=d4, g0=g0, e6=e6,
        rep_a=rep_a, rep_b=rep_b,
        orbit_size=np.array(size, dtype=np.int64),
        trace=trace, singular=singular, kind=np.array(kind),
        _unit_base=unit_base, _unit_shift=unit_shift, _jmod=jmod, _jmod6=jmod6,
    )


@dataclass(frozen=True)
class IsomorphismClass:
    p: int
    representative: tuple[int, int]
    orbit_size: int
    trace: int


def orbit(p: int, a: int, b: int) -> set[tuple[int, int]]:
    """``{(a u^4, b u^6) : u in F_p^*}``."""
    u = np.arange(1, p, dtype=np.int64)
    u2 = u * u % p
    u4 = u2 * u2 % p
    u6 = u4 * u2 % p
    return set(zip((a * u4 % p).tolist(), (b * u6 % p).tolist()))


def enumerate_classes(p: int, domain: str = "all") -> list[IsomorphismClass]:
    """Nonsingular isomorphism classes, sorted by lexicographic representative.

    ``domain="all"`` covers every nonsingular pair, ``domain="unit"`` only
    pairs with ``a b != 0``.
    """
    if domain not in ("all", "unit"):
        raise ValueError("domain must be 'all' or 'unit'")
    table = class_table(p)
    out = []
    for idx in range(len(table)):
        if table.singular[idx] or (domain == "unit" and table.kind[idx] != UNIT):
            continue
        members = orbit(p, int(table.rep_a[idx]), int(table.rep_b[idx]))
        assert len(members) == table.orbit_size[idx]
        out.append(IsomorphismClass(p, min(members), len(members), int(table.trace[idx])))
    out.sort(key=lambda c: c.representative)
    return out


def residue_counts(h: IntegerPolynomial, A: int, p: int) -> np.ndarray:
    """``counts[v] = #{|a| <= A : h(a) = v mod p}`` without touching every `a`.

    ``h(a) mod p`` depends only on ``a mod p``, so each residue class of
    ``[-A, A]`` contributes its multiplicity.
    """
    A = int(A)
    values = eval_mod(h, np.arange(p, dtype=np.int64), p)
    lo = -A
    length = 2 * A + 1
    full, extra = divmod(length, p)
    mult = np.full(p, full, dtype=np.int64)
    if extra:
        start = lo % p
        idx = (start + np.arange(extra)) % p
        mult[idx] += 1
    return np.bincount(values, weights=mult, minlength=p).astype(np.int64)


def class_weights(table: ClassTable, fcount: np.ndarray, gcount: np.ndarray) -> np.ndarray:
    """``W[c] = sum over (r, s) in class c of fcount[r] * gcount[s]``.

    For unit classes this is a cyclic correlation over the exponent
    residue ``j mod g0``, done with integer ``np.correlate`` (exact).
    """
    p = table.p
    g0, d4, e6 = table.g0, table.d4, table.e6
    fcount = np.asarray(fcount, dtype=np.int64)
    gcount = np.asarray(gcount, dtype=np.int64)
    units = np.arange(1, p)
    gt = np.bincount(table._jmod[units], weights=gcount[units], minlength=g0).astype(np.int64)
    i0 = table._amod4(units)
    shift = table._unit_shift[units]
    w = np.zeros(len(table), dtype=np.int64)
    g2 = np.concatenate([gt, gt])
    for i_0 in range(d4):
        sel = i0 == i_0
        ft = np.bincount(shift[sel], weights=fcount[units][sel], minlength=g0).astype(np.int64)
        w[i_0 * g0:(i_0 + 1) * g0] = np.correlate(g2, ft, mode="valid")[:g0]
    nu = d4 * g0
    w[nu:nu + e6] = fcount[0] * np.bincount(table._jmod6[units], weights=gcount[units],
                                            minlength=e6).astype(np.int64)
    w[nu + e6:nu + e6 + d4] = gcount[0] * np.bincount(i0, weights=fcount[units],
                                                      minlength=d4).astype(np.int64)
    w[-1] = fcount[0] * gcount[0]
    return w


def m_p_count(f: IntegerPolynomial, g: IntegerPolynomial, S, A: int, B: int, p: int) -> int:
    """Number of ``(a, b)``, ``|a| <= A``, ``|b| <= B``, with ``(f(a), g(b)) mod p`` in `S`.

    `S` is a callable ``S(r, s) -> bool array`` evaluated on residue
    arrays, a boolean ``(p, p)`` mask, or a boolean mask over the class
    indices of :func:`class_table` (for isomorphism-closed sets).
    """
    p = check_prime(p)
    fc = residue_counts(f, A, p)
    gc = residue_counts(g, B, p)
    if callable(S):
        r = np.flatnonzero(fc)
        s = np.flatnonzero(gc)
        mask = np.asarray(S(r[:, None], s[None, :]), dtype=bool)
        mask = np.broadcast_to(mask, (len(r), len(s)))
        return int((fc[r][:, None] * gc[s][None, :] * mask).sum())
    S = np.asarray(S, dtype=bool)
    if S.shape == (p, p):
        return int((np.outer(fc, gc) * S).sum())
    table = class_table(p)
    if S.shape != (len(table),):
        raise ValueError("S must be a predicate, a (p, p) mask or a class mask")
    return int(class_weights(table, fc, gc)[S].sum())


def trace_class_mask(p: int, t: int, domain: str = "all") -> np.ndarray:
    """Class mask of nonsingular classes with trace `t`."""
    table = class_table(p)
    mask = (~table.singular) & (table.trace == t)
    if domain == "unit":
        mask &= table.kind == UNIT
    return mask


def angle_class_mask(p: int, alpha: float, beta: float, domain: str = "all") -> np.ndarray:
    """Class mask of nonsingular classes with ``alpha <= psi <= beta``."""
    table = class_table(p)
    psi = table.angle
    mask = (~table.singular) & (psi >= alpha) & (psi <= beta)
    if domain == "unit":
        mask &= table.kind == UNIT
    return mask


def max_abs_trace(p: int) -> int:
    table = class_table(p)
    return int(np.abs(table.trace[~table.singular]).max())


def hasse_floor(p: int) -> int:
    """``floor(2 sqrt(p))``."""
    return isqrt(4 * p)
