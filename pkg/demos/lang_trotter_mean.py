"""Vertical Lang-Trotter mean and its slow approach to (pi/3) li_half(x).

sum_{p <= x} #R_p(0) / p^2 counts, prime by prime, the proportion of curves
with trace zero. It grows like (pi/3) li_half(x), but the ratio climbs
slowly: well below 1 at x = 1000 and still short of it at x = 30000.
The last row takes a few minutes.

Run:  python3 demos/lang_trotter_mean.py
"""

import time

from froblab.averages import C0, li_half
from froblab.vertical import vertical_lt_sum

print("       x    sum R_p(0)/p^2   (pi/3) li_half(x)   ratio")
for x in (1000, 3000, 10000, 30000):
    start = time.perf_counter()
    total = vertical_lt_sum(x, 0)
    main = C0 * li_half(x)
    print(f"  {x:6d}   {total:14.4f}   {main:17.4f}   {total / main:.4f}"
          f"   ({time.perf_counter() - start:.1f} s)")
