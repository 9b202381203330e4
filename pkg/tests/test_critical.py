from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from riordan_critical.analysis import (
    T_IS_T1,
    T_IS_T2,
    g_zeta,
    layer_constant_c,
    layer_constant_d,
    layer_constant_dhat,
    phi_eval,
    quartic_residual,
    t_of_zeta,
    thresholds,
    zeta,
)
from riordan_critical.analysis.critical import g_poles, phi_value, phi_zz_at_critical
from riordan_critical.errors import DomainError, ValidationError
from riordan_critical.precision import make_context

CTX = make_context(128)
PAIRS = [(1, 3), (1, 7)]


def grid(cd, count=200):
    big_t = cd.mp_thresholds(CTX)[2]
    return [big_t * k / (count + 1) for k in range(1, count + 1)]


def phi_on_curve(cd, t, which):
    return phi_value(cd, zeta(cd, t, which, ctx=CTX), t, CTX)


def test_thresholds_examples():
    cd = thresholds(1, 3)
    assert cd.T1 == 0.5 and cd.T2 == pytest.approx(1 / 3 ** 0.5, abs=1e-15)
    assert cd.regime == T_IS_T2 and cd.T == cd.T2 and cd.discriminant == -8
    cd = thresholds(1, 7)
    assert cd.regime == T_IS_T1 and cd.T == 0.75 and cd.discriminant == 8
    with pytest.raises(ValidationError):
        thresholds(2, 2)
    with pytest.raises(ValidationError):
        thresholds(3, 1)


@settings(max_examples=40, deadline=None)
@given(st.fractions(min_value=Fraction(1, 10), max_value=10, max_denominator=50),
       st.fractions(min_value=Fraction(1, 50), max_value=10, max_denominator=50))
def test_threshold_identity(z1, gap):
    # T2^2 - T1^2 = (z1^2 - 6 z1 z2 + z2^2)^2 / (16 z1 z2 (z1+z2)^2) >= 0
    z2 = z1 + gap
    t1 = (z2 - z1) / (z1 + z2)
    t2_sq = (z1 + z2) ** 2 / (16 * z1 * z2)
    disc = z1 * z1 - 6 * z1 * z2 + z2 * z2
    assert t2_sq - t1 * t1 == disc ** 2 / (16 * z1 * z2 * (z1 + z2) ** 2)
    cd = thresholds(z1, z2)
    assert 0 < cd.T < 1 and cd.T2 >= cd.T1 - 1e-15


@pytest.mark.parametrize("z1,z2", PAIRS)
def test_zeta_endpoints_and_quadrant(z1, z2):
    cd = thresholds(z1, z2)
    assert zeta(cd, 0, 1, ctx=CTX) == z1 and zeta(cd, 0, 2, ctx=CTX) == z2
    for t in grid(cd, 50):
        for k in (1, 2):
            z = zeta(cd, t, k, ctx=CTX)
            assert z.real > 0 and z.imag > 0
            assert quartic_residual(cd, z, t, ctx=CTX) <= 1e-12
    with pytest.raises(DomainError):
        zeta(cd, cd.T + 0.01, 1)
    with pytest.raises(DomainError):
        zeta(cd, -0.01, 1)
    with pytest.raises(ValidationError):
        zeta(cd, 0.1, 3)


@pytest.mark.parametrize("z1,z2", PAIRS)
def test_quartic_residual_full_grid(z1, z2):
    cd = thresholds(z1, z2)
    worst = max(quartic_residual(cd, zeta(cd, t, k, ctx=CTX), t, ctx=CTX)
                for t in grid(cd) for k in (1, 2))
    assert worst <= 1e-12


@pytest.mark.parametrize("z1,z2", PAIRS)
def test_modulus_product_and_ordering(z1, z2):
    cd = thresholds(z1, z2)
    r = CTX.sqrt(z1 * z2)
    t1 = cd.mp_thresholds(CTX)[0]
    for t in grid(cd):
        a, b = zeta(cd, t, 1, ctx=CTX), zeta(cd, t, 2, ctx=CTX)
        assert abs(abs(a) * abs(b) - z1 * z2) < 1e-25
        assert abs(a) <= r + 1e-25 <= abs(b) + 2e-25
        if cd.regime == T_IS_T2 and t >= t1:
            assert abs(abs(a) - r) < 1e-25 and abs(abs(b) - r) < 1e-25
        else:
            assert abs(a) < r < abs(b)


@pytest.mark.parametrize("z1,z2", PAIRS)
def test_real_part_ordering(z1, z2):
    cd = thresholds(z1, z2)
    t1 = cd.mp_thresholds(CTX)[0]
    for t in grid(cd):
        r1, r2 = phi_on_curve(cd, t, 1).real, phi_on_curve(cd, t, 2).real
        if cd.regime == T_IS_T2 and t >= t1:
            assert abs(r1 - r2) < 1e-25
        else:
            assert r1 < r2


@pytest.mark.parametrize("z1,z2", PAIRS)
def test_phi_along_curves_monotone(z1, z2):
    cd = thresholds(z1, z2)
    for k in (1, 2):
        vals = [phi_on_curve(cd, t, k) for t in grid(cd)]
        assert all(a.imag < b.imag for a, b in zip(vals, vals[1:]))
        assert all(a.real > b.real for a, b in zip(vals, vals[1:]))


@pytest.mark.parametrize("z1,z2", PAIRS)
def test_imaginary_part_limits(z1, z2):
    cd = thresholds(z1, z2)
    big_t = cd.mp_thresholds(CTX)[2]
    ends = [1] if cd.regime == T_IS_T2 else [1, 2]
    for k in (1, 2):
        assert abs(phi_on_curve(cd, CTX.mpf(1e-7), k).imag) < 1e-3
    for k in ends:
        assert abs(phi_on_curve(cd, big_t * (1 - CTX.mpf(1e-9)), k).imag - CTX.pi / 2) < 1e-3
    if cd.regime == T_IS_T2:
        # zeta_2(T2) stays off the imaginary axis, on the circle |z| = sqrt(z1 z2)
        end = zeta(cd, big_t, 2, ctx=CTX)
        assert end.real > 0.5 and abs(abs(end) - CTX.sqrt(z1 * z2)) < 1e-25
        assert phi_on_curve(cd, big_t, 2).imag > CTX.pi / 2


@pytest.mark.parametrize("z1,z2", PAIRS)
def test_circle_real_part_constant(z1, z2):
    cd = thresholds(z1, z2)
    r = CTX.sqrt(z1 * z2)
    for t in [CTX.mpf(0.05), CTX.mpf(0.3), cd.mp_thresholds(CTX)[2] * 0.9]:
        vals = [phi_value(cd, r * CTX.expj(th), t, CTX).real for th in np.linspace(0.01, 1.56, 40)]
        assert max(vals) - min(vals) < 1e-10
        # the theta -> 0+ limit: Im F -> -pi, so Re phi = ln r - pi t
        assert abs(vals[0] - (CTX.log(r) - CTX.pi * t)) < 1e-10


def test_phi_derivatives():
    cd = thresholds(1, 3)
    for z in [CTX.mpc(0.3, 0.8), CTX.mpc(2.1, 1.3), CTX.mpc(-0.5, 0.2), CTX.mpc(0.7, -1.1)]:
        t = CTX.mpf(0.37)
        e = phi_eval(cd, z, t, ctx=CTX)
        assert e.value == phi_value(cd, z, t, CTX)
        f = lambda w: phi_value(cd, w, t, CTX)  # noqa: E731
        assert abs(CTX.diff(f, z) - e.dz) < 1e-25 * abs(e.dz)
        fd = (phi_eval(cd, z + 1e-7, t, ctx=CTX).dz - phi_eval(cd, z - 1e-7, t, ctx=CTX).dz) / 2e-7
        assert abs(fd - e.dz2) <= 1e-6 * abs(e.dz2)
        assert abs(CTX.diff(f, z, 3) - e.dz3) < 1e-20 * abs(e.dz3)
        g = lambda s: phi_value(cd, z, s, CTX)  # noqa: E731
        assert abs(CTX.diff(g, t) - e.dt) < 1e-25
        psi2 = (1 - z) * (3 - z) * (1 + z) * (3 + z) / z ** 2
        assert abs(e.psi ** 2 - psi2) < 1e-25 * abs(psi2)


@pytest.mark.parametrize("z1,z2", PAIRS)
def test_derivative_vanishes_on_curves(z1, z2):
    cd = thresholds(z1, z2)
    for t in grid(cd, 30):
        for k in (1, 2):
            z = zeta(cd, t, k, ctx=CTX)
            assert abs(phi_eval(cd, z, t, ctx=CTX).dz) < 1e-25
            assert abs(t_of_zeta(cd, z, ctx=CTX) - t) < 1e-25
            assert abs(phi_zz_at_critical(cd, z, ctx=CTX) - phi_eval(cd, z, t, ctx=CTX).dz2) < 1e-20


def test_phi_on_cuts_rejected():
    cd = thresholds(1, 3)
    for z in [0, 1, 2.5, -1.5]:
        with pytest.raises(DomainError):
            phi_eval(cd, z, 0.2)
    phi_eval(cd, 0.5, 0.2)


@pytest.mark.parametrize("z1,z2", PAIRS)
def test_real_part_increases_up_imaginary_axis(z1, z2):
    cd = thresholds(z1, z2)
    for t in [0.1, 0.4]:
        vals = [phi_value(cd, CTX.mpc(0, y), t, CTX).real for y in np.linspace(0.05, 20, 200)]
        assert all(a < b for a, b in zip(vals, vals[1:]))


def test_g_symmetries():
    cd = thresholds(1, 3)
    for z in [CTX.mpc(0.4, 0.9), CTX.mpc(1.3, 0.2), CTX.mpc(2.2, 1.7)]:
        g = g_zeta(cd, 20, z, ctx=CTX)
        assert abs(g_zeta(cd, 20, -z, ctx=CTX) - g) < 1e-25 * abs(g)
        assert abs(g_zeta(cd, 20, z.conjugate(), ctx=CTX) - g.conjugate()) < 1e-25 * abs(g)
    for y in [0.5, 1.1, 2.5, 4.0]:
        g = g_zeta(cd, 20, CTX.mpc(0, y), ctx=CTX)
        assert abs(g.imag) <= 1e-10 * abs(g)
    for p in g_poles(cd, ctx=CTX):
        with pytest.raises(DomainError):
            g_zeta(cd, 20, p, ctx=CTX)


def test_g_matches_saddle_square():
    cd = thresholds(1, 3)
    t, n = CTX.mpf(0.25), 30
    z = zeta(cd, t, 1, ctx=CTX)
    e = phi_eval(cd, z, t, ctx=CTX)
    expected = 2 * CTX.pi * e.psi ** 2 * CTX.exp(-2 * n * e.value) / (n * e.dz2)
    assert abs(g_zeta(cd, n, z, ctx=CTX) - expected) < 1e-25 * abs(expected)


def _slope_fit(cd, t_star, const, side):
    zs = zeta(cd, t_star, 1, ctx=CTX)
    hs = [CTX.mpf(10) ** (-k) for k in range(4, 9)]
    devs, dists = [], []
    for h in hs:
        z = zeta(cd, t_star + side * h, 1, ctx=CTX)
        dists.append(float(abs(z - zs)))
        devs.append(float(abs(z - zs - const * CTX.sqrt(h)) / h))
    slope = np.polyfit(np.log([float(h) for h in hs]), np.log(dists), 1)[0]
    return slope, max(devs)


def test_layer_constant_at_t():
    for z1, z2 in PAIRS:
        cd = thresholds(z1, z2)
        big_t = cd.mp_thresholds(CTX)[2]
        slope, dev = _slope_fit(cd, big_t, layer_constant_c(cd, ctx=CTX), -1)
        assert abs(slope - 0.5) < 0.02 and dev < 50


def test_layer_constants_at_t1():
    cd = thresholds(1, 3)
    t1 = cd.mp_thresholds(CTX)[0]
    slope, dev = _slope_fit(cd, t1, layer_constant_d(cd, ctx=CTX), -1)
    assert abs(slope - 0.5) < 0.02 and dev < 50
    slope, dev = _slope_fit(cd, t1, layer_constant_dhat(cd, ctx=CTX), 1)
    assert abs(slope - 0.5) < 0.02 and dev < 50
    with pytest.raises(DomainError):
        layer_constant_d(thresholds(1, 7))


def test_printed_c_differs_by_midpoint_factor():
    cd = thresholds(2, 5)
    ratio = layer_constant_c(cd, ctx=CTX) / layer_constant_c(cd, ctx=CTX, printed=True)
    assert abs(ratio - CTX.mpf(7) / 2) < 1e-30


def test_t1_layer_constants_positive():
    cd = thresholds(1, 3)
    t1 = cd.mp_thresholds(CTX)[0]
    d = layer_constant_d(cd, ctx=CTX)
    e1 = phi_eval(cd, zeta(cd, t1, 1, ctx=CTX), t1, ctx=CTX)
    e2 = phi_eval(cd, zeta(cd, t1, 2, ctx=CTX), t1, ctx=CTX)
    for v in (d ** 3 * e1.dz3, d * e2.dzt):
        assert v.real > 0 and abs(v.imag) < 1e-8
