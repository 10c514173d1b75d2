"""Sato-Tate measure and Chebyshev functions of the second kind."""

from __future__ import annotations

from dataclasses import dataclass
from math import pi, sin

import numpy as np


class IntervalError(ValueError):
    pass


def _check_interval(alpha: float, beta: float) -> None:
    if not (0.0 <= alpha <= pi and 0.0 <= beta <= pi):
        raise IntervalError(f"interval: require 0 <= alpha < beta <= pi, got ({alpha}, {beta})")
    if not alpha < beta:
        raise IntervalError("interval: require alpha < beta")


def mu_cdf(theta):
    """``mu_ST(0, theta) = (theta - sin(2 theta) / 2) / pi``, vectorised."""
    theta = np.asarray(theta, dtype=float)
    return (theta - np.sin(2.0 * theta) / 2.0) / np.pi


def mu_ST(alpha: float, beta: float) -> float:
    """Sato-Tate measure ``(2/pi) * integral of sin^2`` over ``[alpha, beta]``."""
    _check_interval(alpha, beta)
    return (beta - alpha) / pi - (sin(2 * beta) - sin(2 * alpha)) / (2 * pi)


@dataclass(frozen=True)
class AngleInterval:
    alpha: float
    beta: float

    def __post_init__(self):
        _check_interval(self.alpha, self.beta)

    @property
    def measure(self) -> float:
        return mu_ST(self.alpha, self.beta)

    def contains(self, psi):
        psi = np.asarray(psi)
        return (psi >= self.alpha) & (psi <= self.beta)

    def __str__(self) -> str:
        return f"[{self.alpha!r},{self.beta!r}]"


FULL = AngleInterval(0.0, pi)


def chebyshev_u(n: int, c):
    """``U_n(c)`` by the three-term recurrence; ``U_n(cos psi) = sin((n+1)psi)/sin(psi)``.

    Stable at ``c = +-1`` where the sine ratio is 0/0.
    """
    c = np.asarray(c, dtype=float)
    if n < 0:
        raise ValueError("n must be nonnegative")
    prev = np.zeros_like(c)
    cur = np.ones_like(c)
    for _ in range(n):
        prev, cur = cur, 2.0 * c * cur - prev
    return cur
