from math import log, pi, sqrt

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from froblab.arith import prime_pi
from froblab.averages import (C0, FamilySpec, InadmissibleFamily, count_T_fgp, curve_traces,
                              error_envelope, li_half, lt_average, lt_thresholds,
                              lt_total_per_curve, michel_incomplete, michel_sum, michel_table,
                              onepar_st_average, onepar_thresholds, onepar_total_per_curve,
                              pi_LT_single, pi_ST_single, st_average, st_main_term,
                              st_thresholds, st_total_per_curve)
from froblab.curves import trace
from froblab.polynomials import ONE_PARAMETER, T, parse_polynomial
from froblab.satotate import FULL, AngleInterval

from _oracles import trace_enum

F2 = parse_polynomial("T^2+1")
G3 = parse_polynomial("T^3+T+1")


# -- li_half ---------------------------------------------------------------

def li_half_closed_form(x):
    """``(li(sqrt x) - li(sqrt 2)) / 2`` in mpmath, an independent route."""
    return float((mpmath.li(mpmath.sqrt(x)) - mpmath.li(mpmath.sqrt(2))) / 2)


@pytest.mark.parametrize("x", [2.5, 4, 10, 100, 3000, 10**6])
def test_li_half_matches_closed_form(x):
    assert li_half(x) == pytest.approx(li_half_closed_form(x), abs=1e-8)


def test_li_half_examples():
    assert li_half(2) == 0.0
    # direct integral of the original integrand as a second oracle
    direct = float(mpmath.quad(lambda z: 1 / (2 * mpmath.sqrt(z) * mpmath.log(z)), [2, 4]))
    assert li_half(4) == pytest.approx(direct, abs=1e-10)
    assert li_half(4) == pytest.approx(0.574267, abs=1e-6)
    ratio = li_half(10**6) / (sqrt(10**6) / log(10**6))
    assert 1.0 <= ratio <= 1.4
    with pytest.raises(ValueError):
        li_half(1.5)


# -- single curves ---------------------------------------------------------

def test_single_curve_examples():
    assert trace_enum(5, 1, 1) == -3 and trace_enum(7, 1, 1) == 3
    assert pi_LT_single(1, 1, -3, 10) == 1
    assert pi_LT_single(1, 1, 3, 10) == 1
    assert pi_LT_single(-3, 2, 0, 1000) == 0
    assert pi_ST_single(1, 1, AngleInterval(pi / 2, pi), 10) == 1
    assert pi_ST_single(-3, 2, FULL, 100) == 0


def test_full_interval_counts_good_primes():
    a, b = 2, 5
    disc = 4 * a**3 + 27 * b**2
    x = 300
    bad = sum(1 for p in range(5, x + 1) if all(p % d for d in range(2, int(p**0.5) + 1))
              and disc % p == 0)
    assert pi_ST_single(a, b, FULL, x) == prime_pi(x) - 2 - bad


def test_curve_traces_match_enumeration():
    traces = curve_traces(2, 3, 60)
    for p, t in traces.items():
        assert t == trace_enum(p, 2, 3)


# -- dual-strategy identity -------------------------------------------------

@pytest.mark.parametrize("f,g", [(T, T), (F2, G3)])
@pytest.mark.parametrize("t", [0, 1, -1, 2, -2])
def test_lt_dual_identity(f, g, t):
    rep = lt_average(FamilySpec(f, g, 10, 10), t, 200, timing=False)
    assert rep.total == lt_total_per_curve(f, g, 10, 10, t, 200)


@pytest.mark.parametrize("f,g", [(T, T), (F2, G3)])
def test_st_dual_identity(f, g):
    interval = AngleInterval(pi / 3, 2 * pi / 3)
    rep = st_average(FamilySpec(f, g, 10, 10), interval, 200, timing=False)
    assert rep.total == st_total_per_curve(f, g, 10, 10, interval, 200)


@settings(max_examples=10, deadline=None)
@given(st.integers(0, 6), st.integers(0, 6), st.integers(5, 90), st.integers(-3, 3))
def test_lt_dual_identity_random_ranges(A, B, x, t):
    spec = FamilySpec(F2, G3, A, B)
    assert lt_average(spec, t, x, timing=False).total == lt_total_per_curve(F2, G3, A, B, t, x)


@pytest.mark.parametrize("f,g", [(T, T), (T, T**2), (F2, G3)])
def test_onepar_dual_identity(f, g):
    interval = AngleInterval(0.4, 2.0)
    rep = onepar_st_average(FamilySpec(f, g, 15, mode=ONE_PARAMETER), interval, 150,
                            timing=False)
    assert rep.total == onepar_total_per_curve(f, g, 15, interval, 150)


def test_zero_box_is_single_curve():
    rep = lt_average(FamilySpec(F2, G3, 0, 0), -1, 300, timing=False)
    assert rep.empirical_average == pi_LT_single(F2(0), G3(0), -1, 300)


# -- reports ---------------------------------------------------------------

def test_lt_report_main_term_only_for_t_zero():
    spec = FamilySpec(T, T, 20, 20)
    rep0 = lt_average(spec, 0, 500, timing=False)
    assert rep0.main_term == pytest.approx(C0 * li_half(500))
    assert rep0.ratio == pytest.approx(rep0.empirical_average / rep0.main_term)
    rep1 = lt_average(spec, 1, 500, timing=False)
    assert rep1.main_term is None and rep1.ratio is None
    assert rep1.normalized == pytest.approx(rep1.empirical_average / li_half(500))


def test_st_full_interval_ratio_near_one():
    x = 400
    rep = st_average(FamilySpec(F2, G3, 20, 20), FULL, x, timing=False)
    assert rep.main_term == prime_pi(x) - 2
    per_curve = np.mean([pi_ST_single(F2(a), G3(b), FULL, x)
                         for a in range(-20, 21) for b in range(-20, 21)])
    # normaliser 4AB vs (2A+1)(2B+1) points
    assert rep.empirical_average == pytest.approx(per_curve * 41 * 41 / (4 * 400))
    assert 0.9 < rep.ratio < 1.2


def test_onepar_full_interval():
    x = 300
    rep = onepar_st_average(FamilySpec(T, T, x, mode=ONE_PARAMETER), FULL, x, timing=False)
    assert abs(rep.ratio - 1) < 0.05


def test_workers_do_not_change_results():
    spec = FamilySpec(F2, G3, 30, 40)
    one = lt_average(spec, 0, 400, workers=1, timing=False)
    many = lt_average(spec, 0, 400, workers=3, timing=False)
    assert one.primes == many.primes and one.total == many.total


def test_no_primes_below_five():
    rep = lt_average(FamilySpec(T, T, 5, 5), 0, 4, timing=False)
    assert rep.total == 0 and rep.primes == []


def test_inadmissible_family_rejected():
    with pytest.raises(InadmissibleFamily):
        lt_average(FamilySpec(T**2, T, 5, 5), 0, 50)
    with pytest.raises(InadmissibleFamily):
        onepar_st_average(FamilySpec(parse_polynomial("-3*T^2"), parse_polynomial("2*T^3"), 5,
                                     mode=ONE_PARAMETER), FULL, 50)


def test_improper_primes_are_reported():
    # T^2+2T+6 = (T+1)^2 + 5 is not a square over Q but is one modulo 5
    f = parse_polynomial("T^2+2*T+6")
    rep = lt_average(FamilySpec(f, G3, 5, 5), 0, 100, timing=False)
    assert rep.improper_primes == [5]


# -- thresholds and envelope -----------------------------------------------

def test_thresholds_are_the_displayed_inequalities():
    eps = 0.01
    flags = lt_thresholds(3000, 3000, 3000, eps)
    assert flags["ok"] == (3000 * sqrt(3000) >= 3000 ** (1.25 + eps)
                           and 3000 >= 3000 ** (0.5 + eps))
    assert st_thresholds(200, 200, 1000)["ok"] is True
    assert st_thresholds(30, 30, 1000)["ok"] is False
    assert st_thresholds(2000, 2000, 1000)["ok"] is True
    assert onepar_thresholds(500, 500)["ok"] is True
    assert onepar_thresholds(10, 500)["ok"] is False


def test_error_envelope_example():
    env = error_envelope(0.5, 100, 100, 100)
    assert env.terms == pytest.approx((316.2278, 316.2278, 100, 100, 100, 316.2278, 316.2278),
                                      abs=1e-4)
    assert env.full == pytest.approx(1564.911, abs=1e-3)
    assert env.simplified <= env.full <= 2 * env.simplified
    with pytest.raises(ValueError):
        error_envelope(0.6, 100, 100, 100)


@given(st.floats(0, 0.5), st.integers(1, 10**5), st.integers(1, 10**5), st.integers(2, 10**5))
def test_error_envelope_monotone(theta, u, v, z):
    U, V = max(u, v), min(u, v)
    base = error_envelope(theta, U, V, z)
    assert error_envelope(theta, U + 1, V, z).full >= base.full
    if V + 1 <= U:
        assert error_envelope(theta, U, V + 1, z).full >= base.full
    assert base.simplified <= base.full <= 2 * base.simplified * (1 + 1e-12)


def test_error_envelope_dominant_term():
    env = error_envelope(0.0, 10, 10, 10**8)
    assert max(env.terms) == env.terms[6] == pytest.approx(sqrt(10) * 10**8)


def test_st_main_term():
    assert st_main_term(FULL, 1000) == prime_pi(1000) - 2


# -- Michel sums and one-parameter counts ----------------------------------

def _onepar_traces(f, g, p):
    out = {}
    for a in range(p):
        A, B = f(a) % p, g(a) % p
        if (4 * A**3 + 27 * B**2) % p:
            out[a] = trace(p, A, B)
    return out


@pytest.mark.parametrize("p", [11, 29])
def test_michel_n1_m0_identity(p):
    traces = _onepar_traces(T, T, p)
    expected = sum(t / sqrt(p) for t in traces.values()) / p
    assert michel_sum(T, T, p, 1, 0) == pytest.approx(expected, abs=1e-12)


@pytest.mark.parametrize("p", [13, 31])
def test_michel_matches_loop(p):
    traces = _onepar_traces(F2, G3, p)
    for n in (1, 3, 6):
        table = michel_table(F2, G3, p, n)
        for m in (0, 1, 5):
            direct = sum(np.sin((n + 1) * np.arccos(t / (2 * sqrt(p)))) /
                         np.sin(np.arccos(t / (2 * sqrt(p)))) * np.exp(2j * pi * m * a / p)
                         for a, t in traces.items()) / p
            assert abs(table[m] - direct) < 1e-9
            assert abs(michel_sum(F2, G3, p, n, m) - direct) < 1e-9


def test_michel_incomplete_full_range_equals_complete():
    p = 31
    for n in (1, 2, 5):
        assert michel_incomplete(T, T, p, n, (p - 1) // 2) == pytest.approx(
            michel_sum(T, T, p, n, 0).real, abs=1e-12)


@pytest.mark.parametrize("p", [101, 199])
def test_michel_envelope(p):
    for n in range(1, 11):
        assert np.abs(michel_table(T, T, p, n)).max() <= 4 * n / sqrt(p)


def test_count_T_fgp_full_interval_and_oracle():
    p, A = 101, 40
    rec = count_T_fgp(T, T**2, p, A)
    sing = sum(1 for a in range(-A, A + 1) if (4 * a**3 + 27 * a**4) % p == 0)
    assert rec.count == 2 * A + 1 - sing == 2 * A + 1 - rec.singular
    interval = AngleInterval(0.5, 1.7)
    direct = 0
    for a in range(-A, A + 1):
        r, s = a % p, (a * a) % p
        if (4 * r**3 + 27 * s**2) % p:
            psi = np.arccos(trace(p, r, s) / (2 * sqrt(p)))
            direct += 0.5 <= psi <= 1.7
    assert count_T_fgp(T, T**2, p, A, interval).count == direct


def test_count_T_fgp_envelope_and_range():
    rec = count_T_fgp(T, T, 499, 200)
    assert rec.discrepancy <= 4 * sqrt(200) * 499**0.25
    assert rec.within_envelope
    with pytest.raises(ValueError):
        count_T_fgp(T, T, 101, 51)
