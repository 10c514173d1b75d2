"""Default constants for the calibrated envelopes.

Asymptotic bounds with an unspecified implied constant and ``p^{o(1)}``
factors become testable inequalities once the constant is fixed and the
``o(1)`` exponent is replaced by a power of ``log p``. The defaults are
deliberately loose; checks report the largest observed ratio to the
envelope so that drift is visible well before a violation.
"""

# |sum_u chi(h(u)) e(mu/p)| <= (deg h + WEIL_EXTRA) sqrt(p)
WEIL_EXTRA = 1
# |sum_{L<n<=L+M} chi(h(n))| <= c (M/p + 1) sqrt(p) log p
INCOMPLETE_SUM = 4.0
# second moment of Z_{r,s} <= c (A/p+1)^2 (B/p+1) B p (log p)^2
ZRS_MOMENT = 16.0
# #R_p(t) <= c p^{3/2} log p
LT_UPPER = 8.0
# |katz_sum(p, n)| <= c n p^{-1/2}
KATZ = 4.0
# vertical discrepancy <= c p^{7/4}
ST_VERTICAL = 3.0
# one-parameter discrepancy <= c A^{1/2} p^{1/4}
ST_POLY = 4.0
# |michel_sum| <= c n p^{-1/2}
MICHEL = 4.0
# margin in the (A, B, x) threshold inequalities
EPSILON = 0.01

DEFAULTS = {
    "weil_extra": WEIL_EXTRA,
    "incomplete_sum": INCOMPLETE_SUM,
    "zrs_moment": ZRS_MOMENT,
    "lt_upper": LT_UPPER,
    "katz": KATZ,
    "st_vertical": ST_VERTICAL,
    "st_poly": ST_POLY,
    "michel": MICHEL,
    "epsilon": EPSILON,
}
