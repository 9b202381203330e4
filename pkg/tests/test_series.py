from fractions import Fraction
from math import comb, factorial

import pytest
from hypothesis import given, settings, strategies as st

from riordan_critical.errors import SeriesError
from riordan_critical.series import (
    RATIONAL,
    ComplexField,
    TruncatedSeries,
    exp_series,
    polynomial,
    series_arith,
    series_compose,
    series_explog,
    series_reverse,
)
from riordan_critical.sheffer import QuadraticQ

N = 8
Z = TruncatedSeries.variable(N)
ONE = TruncatedSeries.one(N)


def geometric(order=N):
    return polynomial([1] * (order + 1), order)


def test_difference_of_squares():
    assert (ONE + Z) * (ONE - Z) == polynomial([1, 0, -1], N)


def test_geometric_series():
    assert series_arith(ONE, ONE - Z, "div") == geometric()


def test_q_ratio_long_division():
    # (1+z)^2/(1-z)^2 = 1 + sum 4k z^k
    q = QuadraticQ.ab(1, 1)
    ratio = q.series(6) / q.series(6, -1)
    assert ratio.coeffs == tuple(Fraction(1 if k == 0 else 4 * k) for k in range(7))


def test_division_needs_unit_constant():
    with pytest.raises(SeriesError):
        ONE / Z


def test_field_and_order_mismatch():
    with pytest.raises(SeriesError):
        Z + TruncatedSeries.variable(N + 1)
    with pytest.raises(SeriesError):
        Z + TruncatedSeries.variable(N, ComplexField(64))
    with pytest.raises(SeriesError):
        series_arith(Z, Z, "pow")


def test_log_of_geometric():
    expected = [0] + [Fraction(1, n) for n in range(1, N + 1)]
    assert series_explog(geometric(), "log") == polynomial(expected, N)


def test_exp_minus_one():
    e = series_explog(Z, "exp") - ONE
    assert e.coeffs == tuple([Fraction(0)] + [Fraction(1, factorial(n)) for n in range(1, N + 1)])


def test_log_needs_nonzero_constant():
    with pytest.raises(SeriesError):
        Z.log()


def test_artanh_from_log_ratio():
    # a = b = 1: ln(Q/Q(-z)) / (2(a+b)) = artanh z
    q = QuadraticQ.ab(1, 1)
    f = q.log_ratio(9) * Fraction(1, 4)
    expected = [Fraction(1, k) if k % 2 else 0 for k in range(10)]
    assert f == polynomial(expected, 9)
    # its reverse is tanh z
    tanh = f.reverse()
    assert tanh.coeffs[:6] == (0, 1, 0, Fraction(-1, 3), 0, Fraction(2, 15))


def test_compose_substitution():
    z2 = polynomial([0, 0, 1], N)
    assert series_compose(geometric(), z2) == polynomial([1 if k % 2 == 0 else 0 for k in range(N + 1)], N)


def _bell(n):
    # set partitions counted by the triangle recurrence
    row = [1]
    for _ in range(n):
        nxt = [row[-1]]
        for x in row:
            nxt.append(nxt[-1] + x)
        row = nxt
    return row[0]


def test_bell_numbers():
    bell_egf = exp_series(N).compose(exp_series(N) - ONE)
    assert [bell_egf.egf(n) for n in range(6)] == [1, 1, 2, 5, 15, 52]
    assert [bell_egf.egf(n) for n in range(N + 1)] == [_bell(n) for n in range(N + 1)]


def test_compose_needs_zero_constant():
    with pytest.raises(SeriesError):
        geometric().compose(ONE + Z)


def test_catalan_reversion():
    r = series_reverse(Z - Z * Z)
    assert r.coeffs[:6] == (0, 1, 1, 2, 5, 14)
    assert r.coeffs == tuple(Fraction(comb(2 * k - 2, k - 1), k) if k else 0 for k in range(N + 1))


def test_reverse_needs_linear_term():
    with pytest.raises(SeriesError):
        (Z * Z).reverse()
    with pytest.raises(SeriesError):
        (ONE + Z).reverse()


def test_lq_inverse_function_expansion():
    # fbar = z - 2(a^3+b^3)/(a+b) z^3/3! + ...
    a, b = Fraction(2), Fraction(5)
    q = QuadraticQ.ab(a, b)
    f = q.log_ratio(7) * (1 / (2 * (a + b)))
    fbar = f.reverse()
    assert fbar.coeffs[1] == 1 and fbar.coeffs[2] == 0
    assert fbar.coeffs[3] == -2 * (a ** 3 + b ** 3) / (a + b) / 6


def test_complex_backend_matches_rational():
    cf = ComplexField(128)
    s = polynomial([1, Fraction(1, 3), -2, 5], N)
    exact = (s.log() * Fraction(1, 2)).exp()
    approx = (s.to_field(cf).log() * Fraction(1, 2)).exp()
    for e, c in zip(exact.coeffs, approx.coeffs):
        assert abs(c - cf.coerce(e)) <= 1e-30 * max(1, abs(c))


# -- properties -------------------------------------------------------------------------------

small = st.fractions(min_value=-5, max_value=5, max_denominator=7)


def series_st(order, const=None):
    first = st.just(Fraction(const)) if const is not None else small
    return st.tuples(first, st.lists(small, min_size=order, max_size=order)).map(
        lambda p: polynomial([p[0]] + p[1], order)
    )


@settings(max_examples=40, deadline=None)
@given(st.integers(1, 16).flatmap(lambda n: st.tuples(series_st(n), series_st(n), series_st(n))))
def test_ring_axioms(abc):
    a, b, c = abc
    assert (a + b) * c == a * c + b * c
    assert (a * b) * c == a * (b * c)
    assert a * b == b * a
    assert a - a == TruncatedSeries.zero(a.order)


@settings(max_examples=30, deadline=None)
@given(st.integers(1, 12).flatmap(lambda n: st.tuples(series_st(n, 0), small.filter(bool))))
def test_reverse_is_two_sided_inverse(args):
    s, lin = args
    cs = list(s.coeffs)
    cs[1] = lin
    f = polynomial(cs, s.order)
    g = f.reverse()
    z = TruncatedSeries.variable(s.order)
    assert f.compose(g) == z
    assert g.compose(f) == z
    assert g.reverse() == f


@settings(max_examples=30, deadline=None)
@given(st.integers(1, 10).flatmap(lambda n: series_st(n, 0)))
def test_exp_log_inverse(s):
    assert s.exp().log() == s
    u = s + 1
    assert u.log().exp() == u


@settings(max_examples=20, deadline=None)
@given(st.integers(2, 8).flatmap(lambda n: st.tuples(series_st(n, 1), series_st(n))))
def test_backends_agree(args):
    a, b = args
    cf = ComplexField(96)
    exact = b / a
    approx = b.to_field(cf) / a.to_field(cf)
    for e, c in zip(exact.coeffs, approx.coeffs):
        if abs(e) >= Fraction(1, 10 ** 6):
            assert abs(c - cf.coerce(e)) <= 1e-12 * abs(c)
