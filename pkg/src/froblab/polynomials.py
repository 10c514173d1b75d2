"""Integer polynomials in one variable ``T`` and the power tests on them."""

from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction
from math import gcd

import numpy as np

from .arith import check_prime


class PolynomialParseError(ValueError):
    pass


@dataclass(frozen=True)
class IntegerPolynomial:
    """Polynomial with integer coefficients, constant term first.

    Trailing zeros are stripped on construction, so the zero polynomial
    has an empty coefficient tuple and degree -1.
    """

    coefficients: tuple[int, ...]

    def __init__(self, coefficients=()):
        coeffs = [int(c) for c in coefficients]
        while coeffs and coeffs[-1] == 0:
            coeffs.pop()
        object.__setattr__(self, "coefficients", tuple(coeffs))

    @classmethod
    def monomial(cls, degree: int, coefficient: int = 1) -> "IntegerPolynomial":
        return cls([0] * degree + [coefficient])

    @property
    def degree(self) -> int:
        return len(self.coefficients) - 1

    @property
    def leading_coefficient(self) -> int:
        return self.coefficients[-1] if self.coefficients else 0

    def is_zero(self) -> bool:
        return not self.coefficients

    def __call__(self, a: int) -> int:
        acc = 0
        for c in reversed(self.coefficients):
            acc = acc * a + c
        return acc

    def __add__(self, other: "IntegerPolynomial") -> "IntegerPolynomial":
        n = max(len(self.coefficients), len(other.coefficients))
        a = self.coefficients + (0,) * (n - len(self.coefficients))
        b = other.coefficients + (0,) * (n - len(other.coefficients))
        return IntegerPolynomial(x + y for x, y in zip(a, b))

    def __neg__(self) -> "IntegerPolynomial":
        return IntegerPolynomial(-c for c in self.coefficients)

    def __sub__(self, other: "IntegerPolynomial") -> "IntegerPolynomial":
        return self + (-other)

    def __mul__(self, other) -> "IntegerPolynomial":
        if isinstance(other, int):
            return IntegerPolynomial(c * other for c in self.coefficients)
        return IntegerPolynomial(_mul(self.coefficients, other.coefficients))

    __rmul__ = __mul__

    def __pow__(self, k: int) -> "IntegerPolynomial":
        out = IntegerPolynomial([1])
        for _ in range(k):
            out = out * self
        return out

    def reduce(self, p: int) -> list[int]:
        """Coefficients modulo `p`, trailing zeros removed."""
        return _trim([c % p for c in self.coefficients])

    def __str__(self) -> str:
        return format_polynomial(self)


T = IntegerPolynomial([0, 1])


def _trim(coeffs: list) -> list:
    while coeffs and coeffs[-1] == 0:
        coeffs.pop()
    return coeffs


def _mul(a, b) -> list:
    if not a or not b:
        return []
    out = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                out[i + j] += x * y
    return out


def eval_mod(h: IntegerPolynomial, a, p: int):
    """``h(a) mod p`` by Horner's rule.

    `a` may be an int or an integer numpy array; arrays are reduced
    modulo `p` first so every intermediate stays below ``p**2``.
    """
    if isinstance(a, (int, np.integer)):
        return h(int(a)) % p
    a = np.asarray(a, dtype=np.int64) % p
    acc = np.zeros_like(a)
    for c in reversed(h.coefficients):
        acc = (acc * a + c % p) % p
    return acc


# -- powers over Q ---------------------------------------------------------

@dataclass(frozen=True)
class PowerTest:
    """Outcome of a proper-power test; truthy iff ``h = root ** exponent``."""

    is_power: bool
    root: IntegerPolynomial | None = None
    exponent: int | None = None

    def __bool__(self) -> bool:
        return self.is_power


def _integer_root(c: int, k: int) -> int | None:
    if c < 0:
        if k % 2 == 0:
            return None
        r = _integer_root(-c, k)
        return None if r is None else -r
    r = round(c ** (1.0 / k)) if c < 2**1000 else None
    if r is None:
        lo, hi = 0, 1 << (c.bit_length() // k + 1)
        while lo < hi:
            mid = (lo + hi) // 2
            if mid**k < c:
                lo = mid + 1
            else:
                hi = mid
        r = lo
    for cand in (r - 1, r, r + 1):
        if cand >= 0 and cand**k == c:
            return cand
    return None


def _kth_root(h: IntegerPolynomial, k: int) -> IntegerPolynomial | None:
    d = h.degree
    m = d // k
    lead = _integer_root(h.leading_coefficient, k)
    if lead is None:
        return None
    # Solve for the coefficients of w from the top degree down.
    w = [Fraction(0)] * (m + 1)
    w[m] = Fraction(lead)
    denom = k * Fraction(lead) ** (k - 1)
    for i in range(1, m + 1):
        power = [Fraction(1)]
        for _ in range(k):
            power = _mul(power, w)
        residual = h.coefficients[d - i] - power[d - i]
        w[m - i] = residual / denom
    if any(c.denominator != 1 for c in w):
        # Gauss's lemma: a rational root of an integer polynomial is integral.
        return None
    root = IntegerPolynomial(int(c) for c in w)
    return root if root**k == h else None


def is_proper_power_over_Q(h: IntegerPolynomial) -> PowerTest:
    """Decide whether ``h = w**k`` for some ``w`` in Q[T] and ``k >= 2``.

    Only exponents dividing ``deg h`` can occur. The returned witness is
    checked by exact expansion.
    """
    if h.degree < 1:
        raise ValueError("power test needs a nonconstant polynomial")
    for k in range(2, h.degree + 1):
        if h.degree % k:
            continue
        root = _kth_root(h, k)
        if root is not None:
            return PowerTest(True, root, k)
    return PowerTest(False)


# -- arithmetic in F_p[T] ----------------------------------------------------

def _divmod_p(a: list, b: list, p: int) -> tuple[list, list]:
    a = list(a)
    inv = pow(b[-1], -1, p)
    q = [0] * max(len(a) - len(b) + 1, 0)
    while len(a) >= len(b) and a:
        shift = len(a) - len(b)
        c = a[-1] * inv % p
        q[shift] = c
        for i, y in enumerate(b):
            a[i + shift] = (a[i + shift] - c * y) % p
        _trim(a)
    return _trim(q), a


def _monic_p(a: list, p: int) -> list:
    inv = pow(a[-1], -1, p)
    return [c * inv % p for c in a]


def _gcd_p(a: list, b: list, p: int) -> list:
    while b:
        a, b = b, _divmod_p(a, b, p)[1]
    return _monic_p(a, p) if a else a


def _derivative_p(a: list, p: int) -> list:
    return _trim([i * c % p for i, c in enumerate(a)][1:])


def _squarefree_multiplicities(a: list, p: int) -> list[int]:
    """Multiplicities occurring in the squarefree decomposition of monic `a`."""
    if len(a) <= 1:
        return []
    da = _derivative_p(a, p)
    if not da:
        # a is a polynomial in T**p; x**(1/p) = x on F_p.
        return [p * m for m in _squarefree_multiplicities(a[::p], p)]
    out = []
    c = _gcd_p(a, da, p)
    w = _divmod_p(a, c, p)[0]
    i = 1
    while len(w) > 1:
        y = _gcd_p(w, c, p)
        factor = _divmod_p(w, y, p)[0]
        if len(factor) > 1:
            out.append(i)
        w = y
        c = _divmod_p(c, y, p)[0]
        i += 1
    if len(c) > 1:
        out.extend(p * m for m in _squarefree_multiplicities(c[::p], p))
    return out


def is_kth_power_residue(c: int, k: int, p: int) -> bool:
    c %= p
    if c == 0:
        return False
    return pow(c, (p - 1) // gcd(k, p - 1), p) == 1


def is_proper_power_mod_p(h: IntegerPolynomial, p: int) -> bool:
    """Decide whether ``h mod p = w**k`` in F_p[T] for some ``k >= 2``.

    ``h`` is a k-th power iff every multiplicity in its squarefree
    decomposition is divisible by ``k`` and its leading coefficient is a
    k-th power in F_p^*. Nonzero constants always qualify.
    """
    p = check_prime(p)
    a = h.reduce(p)
    if not a:
        raise ValueError("polynomial vanishes identically modulo p")
    if len(a) == 1:
        return True
    mults = _squarefree_multiplicities(_monic_p(a, p), p)
    g = 0
    for m in mults:
        g = gcd(g, m)
    if g < 2:
        return False
    lead = a[-1]
    return any(
        g % k == 0 and is_kth_power_residue(lead, k, p) for k in range(2, g + 1)
    )


# -- family hypotheses -------------------------------------------------------

TWO_PARAMETER = "two-parameter"
ONE_PARAMETER = "one-parameter"


@dataclass(frozen=True)
class Admissibility:
    admissible: bool
    reason: str = ""

    def __bool__(self) -> bool:
        return self.admissible


def discriminant_polynomial(f: IntegerPolynomial, g: IntegerPolynomial) -> IntegerPolynomial:
    """``4 f**3 + 27 g**2`` as an exact integer polynomial."""
    return 4 * f**3 + 27 * g**2


def family_is_admissible(f: IntegerPolynomial, g: IntegerPolynomial,
                         mode: str = TWO_PARAMETER) -> Admissibility:
    if f.is_zero() or g.is_zero():
        return Admissibility(False, "f and g must be nonzero polynomials")
    if mode == TWO_PARAMETER:
        for name, h in (("f", f), ("g", g)):
            if h.degree < 1:
                return Admissibility(False, f"{name} must be nonconstant (deg >= 1)")
            test = is_proper_power_over_Q(h)
            if test:
                return Admissibility(
                    False,
                    f"{name} = ({test.root})^{test.exponent} is a power of another "
                    "polynomial over Q",
                )
        return Admissibility(True)
    if mode == ONE_PARAMETER:
        if discriminant_polynomial(f, g).is_zero():
            return Admissibility(False, "4f^3 + 27g^2 vanishes identically")
        return Admissibility(True)
    raise ValueError(f"unknown family mode {mode!r}")


# -- text format -------------------------------------------------------------

_COEFF_LIST = re.compile(r"^\s*-?\d+(\s*,\s*-?\d+)*\s*$")
_TERM = re.compile(r"([+-]?)\s*(?:(\d+)\s*(\*)?\s*)?(T(?:\s*\^\s*(\d+))?)?")


def parse_polynomial(text: str) -> IntegerPolynomial:
    """Parse ``"c0,c1,...,cd"`` or a symbolic form such as ``"T^3+2*T-1"``."""
    if not isinstance(text, str) or not text.strip():
        raise PolynomialParseError("empty polynomial text")
    if _COEFF_LIST.match(text):
        return IntegerPolynomial(int(c) for c in text.split(","))
    s = text.replace(" ", "")
    coeffs: dict[int, int] = {}
    pos = 0
    first = True
    while pos < len(s):
        m = _TERM.match(s, pos)
        sign, num, star, var, exp = m.groups() if m else (None,) * 5
        if m is None or m.end() == pos or (not num and not var):
            raise PolynomialParseError(f"cannot parse polynomial {text!r} at {s[pos:]!r}")
        if not sign and not first:
            raise PolynomialParseError(f"missing operator in {text!r}")
        if star and not var:
            raise PolynomialParseError(f"dangling '*' in {text!r}")
        c = int(num) if num else 1
        if sign == "-":
            c = -c
        deg = (int(exp) if exp else 1) if var else 0
        coeffs[deg] = coeffs.get(deg, 0) + c
        pos = m.end()
        first = False
    top = max(coeffs)
    return IntegerPolynomial(coeffs.get(i, 0) for i in range(top + 1))


def format_polynomial(h: IntegerPolynomial) -> str:
    if h.is_zero():
        return "0"
    parts = []
    for deg in range(h.degree, -1, -1):
        c = h.coefficients[deg]
        if c == 0:
            continue
        sign = "-" if c < 0 else "+"
        mag = abs(c)
        if deg == 0:
            body = str(mag)
        else:
            mono = "T" if deg == 1 else f"T^{deg}"
            body = mono if mag == 1 else f"{mag}*{mono}"
        parts.append((sign, body))
    out = ("-" if parts[0][0] == "-" else "") + parts[0][1]
    for sign, body in parts[1:]:
        out += sign + body
    return out
