"""Vertical Sato-Tate: all curves modulo one prime.

For each prime p, the angles psi with t = 2 sqrt(p) cos(psi) over every
pair (a, b) with ab != 0 are compared with the density (2/pi) sin^2.
The table prints the histogram against the expected mass per bin, then
the sup-interval discrepancy against its envelope 3 p^(7/4).

Run:  python3 demos/vertical_sato_tate.py
"""

import numpy as np

from froblab.satotate import mu_ST
from froblab.vertical import (angle_sample_vertical, interval_discrepancy, katz_sum,
                              population_size, st_vertical_envelope)

BINS = 8

for p in (101, 211, 499):
    angles = np.asarray(angle_sample_vertical(p).angles)
    N = population_size(p)
    edges = np.linspace(0, np.pi, BINS + 1)
    observed, _ = np.histogram(angles, edges)
    expected = np.array([N * mu_ST(lo, hi) for lo, hi in zip(edges[:-1], edges[1:])])

    print(f"p = {p}: {N} curves")
    print("  bin            observed    expected")
    for lo, hi, o, e in zip(edges[:-1], edges[1:], observed, expected):
        print(f"  [{lo:4.2f}, {hi:4.2f}]   {o:9d}   {e:11.1f}")
    D = interval_discrepancy(angles)
    print(f"  discrepancy {D:.1f}  envelope {st_vertical_envelope(p):.1f}")
    print("  Katz sums n=1..4: " + "  ".join(f"{katz_sum(p, n):+.5f}" for n in range(1, 5)))
    print()
