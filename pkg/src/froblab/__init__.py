"""Desk-scale experiments on Lang-Trotter and Sato-Tate statistics for
polynomial families of elliptic curves ``Y^2 = X^3 + f(a) X + g(b)``."""

__version__ = "0.1.0"
