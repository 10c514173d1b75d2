"""Two ways to count the same thing.

The average Lang-Trotter count over a box of curves y^2 = x^3 + f(a)x + g(b)
can be computed curve by curve (a trace for every curve and prime), or prime
by prime (weight each isomorphism class by how many (a, b) land in it).
The two totals must agree exactly. The per-prime route is the fast one.

Run:  python3 demos/dual_identity.py
"""

import time
from math import pi

from froblab.averages import (FamilySpec, lt_average, lt_total_per_curve, st_average,
                              st_total_per_curve)
from froblab.polynomials import parse_polynomial
from froblab.satotate import AngleInterval

f = parse_polynomial("T^2+1")
g = parse_polynomial("T^3+T+1")
A = B = 10
x = 200

print(f"f = {f}, g = {g}, A = B = {A}, x = {x}")
print("   t   per-prime   per-curve")
for t in (0, 1, -1, 2, -2):
    fast = lt_average(FamilySpec(f, g, A, B), t, x, timing=False).total
    slow = lt_total_per_curve(f, g, A, B, t, x)
    print(f"  {t:+d}   {fast:9d}   {slow:9d}")

interval = AngleInterval(pi / 3, 2 * pi / 3)
fast = st_average(FamilySpec(f, g, A, B), interval, x, timing=False).total
slow = st_total_per_curve(f, g, A, B, interval, x)
print(f"Sato-Tate on [pi/3, 2pi/3]: per-prime {fast}, per-curve {slow}")

# the per-prime strategy scales to boxes far beyond the per-curve loop
start = time.perf_counter()
rep = st_average(FamilySpec(f, g, 200, 200), interval, 1000, timing=False)
print(f"A = B = 200, x = 1000: ratio to mu_ST * (pi(x) - 2) = {rep.ratio:.4f} "
      f"({time.perf_counter() - start:.2f} s)")
