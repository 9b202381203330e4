import random

import mpmath
import pytest

from riordan_critical.analysis import (
    ContourResult,
    choose_method,
    contour_integral,
    estimate_cancellation_bits,
    hn_from_contour,
    thresholds,
)
from riordan_critical.analysis.contour import DEFORMED, REAL_AXIS, VERTICAL
from riordan_critical.errors import ConvergenceError, ValidationError
from riordan_critical.precision import make_context
from riordan_critical.sheffer import QuadraticQ, hn


def exact_line_value(z1, z2, n, t, prec=256):
    ctx = make_context(prec)
    x = ctx.mpc(0.5, n * ctx.mpf(t))
    return hn(QuadraticQ.zeros(z1, z2), n).eval_mp(ctx, x)


def close(a, b, rel):
    return abs(mpmath.mpc(a) - mpmath.mpc(b)) <= rel * abs(mpmath.mpc(b))


def test_odd_n_vanishes_at_half():
    cd = thresholds(1, 3)
    for n in (5, 9):
        res = contour_integral(cd, n, 0.0, rel_tol=1e-12)
        assert abs(res.parity_component()) <= res.est_error + 1e-30 * abs(res.integral)
        assert res.est_error >= 0


def test_even_n_imaginary_part():
    cd = thresholds(1, 3)
    value, res = hn_from_contour(cd, 12, 0.2, rel_tol=1e-10)
    exact = exact_line_value(1, 3, 12, 0.2)
    assert close(value, exact, 1e-8)
    assert abs(mpmath.pi * exact / mpmath.factorial(12) - res.integral.imag) <= 1e-8 * abs(exact.real) * mpmath.pi / mpmath.factorial(12)


def test_odd_n_real_part_rule():
    cd = thresholds(1, 7)
    value, res = hn_from_contour(cd, 13, 0.3, rel_tol=1e-10)
    exact = exact_line_value(1, 7, 13, 0.3)
    # odd n: pi H_n / n! = -i Re I
    assert abs(exact.real) < 1e-30 * abs(exact)
    assert close(value, exact, 1e-8)
    assert close(-1j * res.integral.real, mpmath.pi * exact / mpmath.factorial(13), 1e-8)


def test_parity_rule_random_points():
    rng = random.Random(7)
    for _ in range(50):
        z1, z2 = rng.choice([(1, 3), (1, 7)])
        cd = thresholds(z1, z2)
        n = rng.randint(3, 24)
        t = rng.uniform(0, cd.T)
        value, res = hn_from_contour(cd, n, t, rel_tol=1e-9)
        exact = exact_line_value(z1, z2, n, t)
        tol = 1e-7 * abs(exact) + float(res.est_error) * float(mpmath.factorial(n) / mpmath.pi) * 2
        assert abs(mpmath.mpc(value) - exact) <= tol


@pytest.mark.parametrize("t", [0.15, 0.3, 0.45])
def test_routes_agree(t):
    cd = thresholds(1, 3)
    vals = [contour_integral(cd, 40, t, rel_tol=1e-10, method=m) for m in (REAL_AXIS, DEFORMED, VERTICAL)]
    for v in vals[1:]:
        assert close(v.integral, vals[0].integral, 1e-8)


def test_beyond_t():
    cd = thresholds(1, 3)
    value, _ = hn_from_contour(cd, 20, 1.2, rel_tol=1e-10)
    assert close(value, exact_line_value(1, 3, 20, 1.2), 1e-8)


def test_method_selection():
    cd = thresholds(1, 3)
    assert choose_method(cd, 20, 0.2) == REAL_AXIS
    assert choose_method(cd, 400, 0.25) == DEFORMED
    assert choose_method(cd, 400, 0.9) == VERTICAL
    assert estimate_cancellation_bits(cd, 400, 0.25) > 80
    assert estimate_cancellation_bits(cd, 400, 0.9) is None
    with pytest.raises(ValidationError):
        choose_method(cd, 20, 0.2, "spiral")


def test_input_validation():
    cd = thresholds(1, 3)
    with pytest.raises(ValidationError):
        contour_integral(cd, 2, 0.1)
    with pytest.raises(ValidationError):
        contour_integral(cd, 10, -0.1)
    with pytest.raises(ValidationError):
        contour_integral(cd, 10, 0.1, precision=32)


def test_no_escalation_raises():
    cd = thresholds(1, 3)
    with pytest.raises(ConvergenceError) as info:
        contour_integral(cd, 60, 0.3, precision=64, rel_tol=1e-40, escalate=False, method=DEFORMED)
    assert info.value.diagnostics["attempts"]


def test_escalation_records_attempts():
    cd = thresholds(1, 7)
    res = contour_integral(cd, 60, 0.3, precision=64, rel_tol=1e-20)
    assert isinstance(res, ContourResult)
    assert res.relative_error() <= 1e-20
    assert res.attempts[-1][1] <= 1e-20
    assert res.precision >= 64
