from fractions import Fraction

import mpmath
import numpy as np
import pytest

from riordan_critical.analysis import thresholds
from riordan_critical.errors import ConvergenceError, ValidationError
from riordan_critical.sheffer import PolyInX, QuadraticQ, hn
from riordan_critical.zeros import (
    OFF_LINE,
    ON_LINE,
    TRIVIAL_0,
    TRIVIAL_1,
    TRIVIAL_HALF,
    GridTooCoarse,
    critical_line_report,
    deflate_trivial,
    empirical_threshold,
    line_zero_count,
    line_zero_scan,
    poly_roots,
)


def test_poly_roots_simple():
    roots = poly_roots([-1, 0, 1], precision=128)
    assert [float(r.real) for r in roots] == pytest.approx([-1.0, 1.0], abs=1e-30)
    assert all(abs(r.imag) < 1e-30 for r in roots)
    assert poly_roots([3], precision=128) == []
    assert abs(poly_roots([2, 4], precision=128)[0] + 0.5) < 1e-30
    with pytest.raises(ValidationError):
        poly_roots([0, 0])


def test_poly_roots_against_numpy():
    rng = np.random.default_rng(3)
    coeffs = [int(c) for c in rng.integers(-9, 10, size=12)]
    coeffs[-1] = 5
    ours = poly_roots(coeffs, precision=128)
    ref = np.roots(list(reversed(coeffs)))
    for r in ref:
        assert min(abs(complex(z) - r) for z in ours) < 1e-8


def test_poly_roots_deterministic():
    p = hn(QuadraticQ.zeros(1, 3), 16)
    assert poly_roots(p, seed=5) == poly_roots(p, seed=5)


def test_poly_roots_gives_up():
    with pytest.raises(ConvergenceError):
        poly_roots(hn(QuadraticQ.zeros(1, 3), 30), max_iter=2)


def test_h2_off_line():
    # H_2 for a = b = 1 is 32x^2 - 32x + 4 (up to scale): roots 1/2 +- sqrt(2)/4
    rep = critical_line_report(QuadraticQ.ab(1, 1), 2)
    assert [r.label for r in rep.roots] == [OFF_LINE, OFF_LINE]
    with mpmath.workprec(256):
        s = mpmath.sqrt(2) / 4
        assert abs(rep.roots[0].value - (mpmath.mpf(0.5) - s)) < 1e-40
        assert abs(rep.roots[1].value - (mpmath.mpf(0.5) + s)) < 1e-40
    assert not rep.all_nontrivial_on_line
    assert rep.checks_passed


def test_h3_only_trivial():
    rep = critical_line_report(QuadraticQ.ab(1, 1), 3)
    assert sorted(r.label for r in rep.roots) == sorted([TRIVIAL_0, TRIVIAL_HALF, TRIVIAL_1])
    assert rep.all_nontrivial_on_line and rep.checks_passed


def test_deflate_trivial():
    q = QuadraticQ.zeros(1, 3)
    rest, found = deflate_trivial(hn(q, 11), 11)
    assert found == [(Fraction(0), 1), (Fraction(1, 2), 1), (Fraction(1), 1)]
    assert rest.degree == 8
    with pytest.raises(ValidationError):
        deflate_trivial(PolyInX.from_coeffs([1, 1]), 3)


@pytest.mark.parametrize("pair,n", [((1, 3), 30), ((1, 7), 31)])
def test_report_all_on_line(pair, n):
    rep = critical_line_report(QuadraticQ.zeros(*pair), n)
    assert rep.degree == n and len(rep.roots) == n
    assert rep.all_nontrivial_on_line and rep.checks_passed
    assert len(rep.trivial) == (3 if n % 2 else 2)
    assert all(r.residual < 1e-30 for r in rep.on_line)
    d = rep.as_dict()
    assert d["counts"] == {"trivial": len(rep.trivial), "on_line": len(rep.on_line), "off_line": 0}


def test_report_validation():
    with pytest.raises(ValidationError):
        critical_line_report(QuadraticQ.zeros(1, 3), 0)


def test_empirical_threshold():
    assert empirical_threshold(QuadraticQ.ab(1, 1), range(2, 9)) == (3, [2])
    assert empirical_threshold(QuadraticQ.zeros(1, 3), range(5, 9)) == (5, [])


def open_grid(cd, samples):
    return [cd.T * (k + 0.5) / samples for k in range(samples)]


def test_line_count_small_n():
    cd = thresholds(1, 3)
    assert line_zero_count(QuadraticQ.ab(1, 1), 3, open_grid(cd, 50)) == 0


@pytest.mark.parametrize("pair,n", [((1, 3), 30), ((1, 7), 31)])
def test_line_count_matches_roots(pair, n):
    q = QuadraticQ.zeros(*pair)
    cd = thresholds(*pair)
    rep = critical_line_report(q, n)
    upper = [r for r in rep.on_line if r.value.imag > 0]
    grid = open_grid(cd, 400)
    count = line_zero_count(q, n, grid, prec=256)
    inside = [r for r in upper if r.value.imag < n * cd.T]
    assert count == len(inside)


def test_line_count_refinement_monotone():
    q = QuadraticQ.zeros(1, 3)
    cd = thresholds(1, 3)
    counts = [line_zero_count(q, 30, open_grid(cd, m)) for m in (25, 50, 100, 200)]
    assert counts == sorted(counts)


def test_line_count_coarse_grid():
    q = QuadraticQ.zeros(1, 3)
    cd = thresholds(1, 3)
    grid = open_grid(cd, 6)
    scan = line_zero_scan(q, 30, grid, jump_limit=10.0)
    assert scan.coarse
    with pytest.raises(GridTooCoarse):
        line_zero_count(q, 30, grid, jump_limit=10.0, strict=True)


def test_line_count_grid_validation():
    q = QuadraticQ.zeros(1, 3)
    with pytest.raises(ValidationError):
        line_zero_count(q, 10, [0.2, 0.1])
    with pytest.raises(ValidationError):
        line_zero_count(q, 10, [0.0, 0.1])
    with pytest.raises(ValidationError):
        line_zero_count(q, 10, [0.1, 0.2], source="contour")


def test_line_count_contour_source():
    q = QuadraticQ.zeros(1, 3)
    cd = thresholds(1, 3)
    grid = open_grid(cd, 60)
    assert line_zero_count(q, 16, grid, source="contour", cd=cd) == line_zero_count(q, 16, grid)
