"""Statistics over all curves modulo one fixed prime.

The population is the set of nonsingular unit pairs ``(r, s)``; there are
``(p-1)(p-2)`` of them since ``4r^3 + 27s^2 = 0`` cuts out exactly ``p-1``
unit pairs. Everything is computed from the class table, one trace per
isomorphism class weighted by the orbit size ``(p-1)/2``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from math import log, pi, sqrt

import numpy as np

from . import constants
from .arith import check_prime, sieve_primes
from .curves import UNIT, class_table
from .satotate import _check_interval, chebyshev_u, mu_cdf


@dataclass(frozen=True)
class VerticalLTStat:
    p: int
    t: int
    count: int
    envelope: float

    @property
    def within_envelope(self) -> bool:
        return self.count <= self.envelope


def _unit_classes(p: int):
    table = class_table(p)
    keep = (table.kind == UNIT) & ~table.singular
    return table, keep


def population_size(p: int) -> int:
    return (p - 1) * (p - 2)


def lt_upper_envelope(p: int, c: float = constants.LT_UPPER) -> float:
    return c * p**1.5 * log(p)


def count_Rp(p: int, t: int, c: float = constants.LT_UPPER) -> VerticalLTStat:
    """``#R_p(t)``: nonsingular unit pairs whose curve has trace `t`."""
    p = check_prime(p)
    table, keep = _unit_classes(p)
    count = int(table.orbit_size[keep & (table.trace == t)].sum())
    return VerticalLTStat(p, t, count, lt_upper_envelope(p, c))


def trace_distribution(p: int) -> dict[int, int]:
    """``{t: #R_p(t)}`` for every trace that occurs."""
    table, keep = _unit_classes(p)
    tr = table.trace[keep]
    sizes = table.orbit_size[keep]
    out: dict[int, int] = {}
    for t, size in zip(tr.tolist(), sizes.tolist()):
        out[t] = out.get(t, 0) + size
    return dict(sorted(out.items()))


def vertical_lt_sum(x: int, t: int = 0) -> float:
    """``sum_{5 <= p <= x} #R_p(t) / p^2``, accumulated in ascending order."""
    total = 0.0
    for p in sieve_primes(x):
        total += count_Rp(p, t).count / p**2
    return total


@dataclass(frozen=True)
class AngleSample:
    """Sorted Sato-Tate angles of a population of nonsingular curves."""

    p: int
    angles: np.ndarray = field(repr=False)
    population: str = "unit pairs"

    def __len__(self) -> int:
        return len(self.angles)


def angle_sample_vertical(p: int) -> AngleSample:
    p = check_prime(p)
    table, keep = _unit_classes(p)
    angles = np.repeat(table.angle[keep], table.orbit_size[keep])
    angles.sort()
    angles.flags.writeable = False
    return AngleSample(p, angles, "unit pairs")


def count_in_interval(sample: AngleSample, alpha: float, beta: float) -> int:
    lo = np.searchsorted(sample.angles, alpha, side="left")
    hi = np.searchsorted(sample.angles, beta, side="right")
    return int(hi - lo)


def count_Tp(p: int, alpha: float, beta: float) -> int:
    """``#T_p(alpha, beta)``: unit pairs with ``alpha <= psi <= beta``."""
    _check_interval(alpha, beta)
    return count_in_interval(angle_sample_vertical(p), alpha, beta)


def katz_sum(p: int, n: int) -> float:
    """``(p-1)^{-2} sum U_n(cos psi_{r,s})`` over nonsingular unit pairs."""
    p = check_prime(p)
    table, keep = _unit_classes(p)
    c = table.trace[keep] / (2.0 * sqrt(p))
    return float((table.orbit_size[keep] * chebyshev_u(n, c)).sum() / (p - 1) ** 2)


def katz_envelope(p: int, n: int, c: float = constants.KATZ) -> float:
    return c * n / sqrt(p)


def interval_discrepancy(sample, total: float | None = None) -> float:
    """``sup_{0<=alpha<beta<=pi} |#{psi in [alpha, beta]} - total * mu_ST(alpha, beta)|``.

    `sample` is an :class:`AngleSample` or any array of angles; `total`
    defaults to the sample size. With ``D+(x) = C(x) - F(x)`` and
    ``D-(x) = C(x-) - F(x)``, where ``C`` counts angles ``<= x`` and
    ``F = total * mu_ST(0, x)``, the supremum is ``max D+ - min D-``; both
    extremes sit at sample angles or at the endpoints 0 and pi.
    """
    angles = np.asarray(getattr(sample, "angles", sample), dtype=float)
    if angles.size == 0:
        raise ValueError("empty sample")
    n = angles.size
    total = float(n if total is None else total)
    vals, counts = np.unique(angles, return_counts=True)
    after = np.cumsum(counts)
    before = after - counts
    f = total * mu_cdf(vals)
    at_pi = int(counts[-1]) if vals[-1] >= pi else 0
    d_plus = max(0.0, float((after - f).max()), n - total)
    d_minus = min(0.0, float((before - f).min()), (n - at_pi) - total)
    return d_plus - d_minus


def st_vertical_envelope(p: int, c: float = constants.ST_VERTICAL) -> float:
    return c * p**1.75
