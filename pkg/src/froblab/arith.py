"""Primes, Legendre symbols and multiplicative characters of F_p."""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache
from math import gcd, isqrt

import numpy as np


class PrimeError(ValueError):
    """Raised when an operation receives a modulus it cannot handle."""


def check_prime(p: int) -> int:
    """Validate that `p` is a prime >= 5 and return it as an int."""
    p = int(p)
    if p in (2, 3):
        raise PrimeError(f"p = {p}: characteristic 2 and 3 are excluded")
    if p < 5 or not is_prime(p):
        raise PrimeError(f"p = {p} is not a prime >= 5")
    return p


def is_prime(n: int) -> bool:
    """Deterministic trial-division primality test (fine for n < 10**12)."""
    if n < 2:
        return False
    if n % 2 == 0:
        return n == 2
    for d in range(3, isqrt(n) + 1, 2):
        if n % d == 0:
            return False
    return True


@dataclass(frozen=True)
class PrimeList:
    """Primes in ``[5, bound]``, increasing."""

    bound: int
    primes: np.ndarray

    def __len__(self) -> int:
        return len(self.primes)

    def __iter__(self):
        return (int(p) for p in self.primes)

    def tolist(self) -> list[int]:
        return [int(p) for p in self.primes]


def sieve_primes(x: int) -> PrimeList:
    """Sieve of Eratosthenes returning the primes ``5 <= p <= x``.

    >>> sieve_primes(30).tolist()
    [5, 7, 11, 13, 17, 19, 23, 29]
    """
    x = int(x)
    if x < 5:
        raise ValueError(f"x = {x}: need x >= 5 to have an admissible prime")
    flags = np.ones(x + 1, dtype=bool)
    flags[:2] = False
    flags[4::2] = False
    for d in range(3, isqrt(x) + 1, 2):
        if flags[d]:
            flags[d * d :: 2 * d] = False
    primes = np.flatnonzero(flags)
    return PrimeList(bound=x, primes=primes[primes >= 5].astype(np.int64))


def prime_pi(x: float) -> int:
    """Number of primes ``<= x`` (including 2 and 3)."""
    x = int(x)
    if x < 2:
        return 0
    if x < 5:
        return 1 if x == 2 else 2
    return len(sieve_primes(x)) + 2


@lru_cache(maxsize=64)
def legendre_table(p: int) -> np.ndarray:
    """Array ``L`` with ``L[v] = (v / p)`` for ``v = 0..p-1``."""
    p = check_prime(p)
    table = -np.ones(p, dtype=np.int64)
    squares = (np.arange(1, (p - 1) // 2 + 1, dtype=np.int64) ** 2) % p
    table[squares] = 1
    table[0] = 0
    table.flags.writeable = False
    return table


def legendre(v: int, p: int) -> int:
    """Quadratic character of `v` modulo the prime `p` (0, 1 or -1)."""
    p = check_prime(p)
    v %= p
    if v == 0:
        return 0
    return 1 if pow(v, (p - 1) // 2, p) == 1 else -1


def prime_factors(n: int) -> list[int]:
    out = []
    d = 2
    while d * d <= n:
        if n % d == 0:
            out.append(d)
            while n % d == 0:
                n //= d
        d += 1
    if n > 1:
        out.append(n)
    return out


@lru_cache(maxsize=256)
def primitive_root(p: int) -> int:
    """Smallest primitive root modulo `p`, found by trial."""
    p = check_prime(p)
    n = p - 1
    qs = prime_factors(n)
    for g in range(2, p):
        if all(pow(g, n // q, p) != 1 for q in qs):
            return g
    raise AssertionError("unreachable: every prime has a primitive root")


@dataclass(frozen=True)
class CharacterTable:
    """Discrete logarithms to a fixed primitive root of F_p.

    Character ``j`` (``0 <= j < p - 1``) is
    ``chi_j(v) = exp(2 pi i j dlog(v) / (p - 1))`` for ``v != 0`` and
    ``chi_j(0) = 0`` for every ``j``, the principal character included.
    """

    p: int
    generator: int
    dlog: np.ndarray = field(repr=False)
    powers: np.ndarray = field(repr=False)

    @property
    def order(self) -> int:
        return self.p - 1

    def exponent(self, j: int, v) -> np.ndarray:
        """Exponent class ``j * dlog(v) mod (p - 1)``; -1 marks ``v = 0``."""
        v = np.asarray(v, dtype=np.int64) % self.p
        e = (int(j) * self.dlog[v]) % self.order
        return np.where(v == 0, -1, e)

    def values(self, j: int, v) -> np.ndarray:
        """Complex values ``chi_j(v)``, vectorised over `v`."""
        e = self.exponent(j, v)
        z = np.exp(2j * np.pi * np.maximum(e, 0) / self.order)
        return np.where(e < 0, 0.0, z)

    def __call__(self, j: int, v: int) -> complex:
        return complex(self.values(j, v))


@lru_cache(maxsize=64)
def build_character_table(p: int) -> CharacterTable:
    p = check_prime(p)
    g = primitive_root(p)
    powers = np.empty(p - 1, dtype=np.int64)
    acc = 1
    for k in range(p - 1):
        powers[k] = acc
        acc = acc * g % p
    dlog = np.zeros(p, dtype=np.int64)
    dlog[powers] = np.arange(p - 1, dtype=np.int64)
    dlog.flags.writeable = False
    powers.flags.writeable = False
    return CharacterTable(p=p, generator=g, dlog=dlog, powers=powers)


def characters_of_order_dividing(p: int, f: int) -> list[int]:
    """Indices ``j`` with ``chi_j ** f`` principal, i.e. ``j*f = 0 mod p-1``."""
    p = check_prime(p)
    n = p - 1
    if f < 1 or n % f:
        raise ValueError(f"f = {f} does not divide p - 1 = {n}")
    step = n // f
    return list(range(0, n, step))


def sextic_degree(p: int) -> int:
    """``gcd(p - 1, 6)``, the number of characters with ``chi**6`` principal."""
    return gcd(p - 1, 6)
