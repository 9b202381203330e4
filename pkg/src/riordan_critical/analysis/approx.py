"""Asymptotic approximants for the loop integral ``I(n, t)``.

Three regimes are covered:

* ``saddle_approx``: ``t`` inside ``(0, T)`` away from the degenerate points,
  ``I ~ +/- sqrt(2 pi) psi(zeta) exp(-n phi(zeta, t)) / sqrt(n phi_zz(zeta, t))``.
* ``boundary_layer_approx``: ``t`` close to ``T`` (or to ``T1`` in the
  ``T = T2`` regime) where ``phi_zz(zeta, t) -> 0`` and a cubic local model
  replaces the quadratic one.
* ``smallt_approx``: ``t`` of order ``ln^4 n / n`` or smaller, where the
  endpoint ``w = 1`` of the first real-axis integral dominates.

Every approximant is only defined up to the sign of a square root, so the
result object carries both branches and can pick the one nearer a reference
value.  The admissible windows are set by :class:`Gates`; asking outside them
raises :class:`~riordan_critical.errors.GateError`.
"""

import math
from dataclasses import dataclass, field

from ..errors import ConvergenceError, DomainError, GateError
from .critical import (
    T_IS_T2,
    layer_constant_c,
    layer_constant_d,
    layer_constant_dhat,
    phi_eval,
    psi_value,
    zeta,
)
from .gamma import log_gamma
from ..precision import make_context

SADDLE = "saddle"
LAYER = "layer"
SMALLT = "smallt"

AT_T = "atT"
AT_T1_MINUS = "atT1_minus"
AT_T1_PLUS = "atT1_plus"
LAYERS = (AT_T, AT_T1_MINUS, AT_T1_PLUS)


@dataclass(frozen=True)
class Gates:
    """Numeric stand-ins for the asymptotic ``<<`` conditions.

    smallt:  ``t <= smallt_factor * ln^4 n / n``
    atT:     ``layer_lo * n^(-2/3) <= T - t <= layer_hi * ln^2 n * n^(-2/3)``
    atT1_*:  ``t1_lo / n <= |T1 - t| <= t1_hi * ln^2 n * n^(-2/3)``
    saddle:  ``eps / (|phi_zz|^(3/2) t^2) <= saddle_limit`` with ``eps = ln n / sqrt n``
    The layer curve is cut where ``|z - zeta| / |kappa| = cutoff * ln n / n^(1/3)``.
    """

    smallt_factor: float = 10.0
    layer_lo: float = 1.0
    layer_hi: float = 1.0
    t1_lo: float = 1.0
    t1_hi: float = 1.0
    saddle_limit: float = 2.0
    cutoff: float = 7.0


DEFAULT_GATES = Gates()


@dataclass(frozen=True)
class Approximation:
    """An approximant value ``value`` and its sign twin ``-value``.

    ``details`` holds the ingredients (critical point, constants, limits) as
    mpmath numbers; it is informational only.
    """

    method: str
    n: int
    t: float
    value: object
    details: dict = field(default_factory=dict)

    def branches(self):
        return (self.value, -self.value)

    def closest(self, reference):
        """The branch nearer ``reference``."""
        plus, minus = self.branches()
        return plus if abs(reference - plus) <= abs(reference - minus) else minus

    def ratio(self, reference):
        """``reference / branch`` for the nearer branch."""
        return reference / self.closest(reference)


def _setup(ctx, prec):
    return ctx if ctx is not None else make_context(prec)


def _check_n(n):
    if int(n) != n or n < 3:
        raise DomainError(f"n must be an integer >= 3, got {n}")
    return int(n)


# -- saddle ------------------------------------------------------------------------


def saddle_condition(cd, n, t, ctx=None, prec=None):
    """``eps / (|phi_zz(zeta_1, t)|^(3/2) t^2)`` with ``eps = ln n / sqrt(n)``."""
    ctx = _setup(ctx, prec)
    t = ctx.mpf(t)
    pe = phi_eval(cd, zeta(cd, t, 1, ctx=ctx), t, ctx=ctx)
    eps = ctx.log(n) / ctx.sqrt(n)
    return eps / (abs(pe.dz2) ** ctx.mpf(1.5) * t * t)


def saddle_approx(cd, n, t, ctx=None, prec=None, gates=DEFAULT_GATES, check=True):
    """Single-saddle estimate at ``zeta_1(t)``.

    ``details['squared']`` is the sign-free square
    ``2 pi psi^2 exp(-2 n phi) / (n phi_zz)``.
    """
    n = _check_n(n)
    ctx = _setup(ctx, prec)
    t_mp = ctx.mpf(t)
    _, _, big_t = cd.mp_thresholds(ctx)
    if not 0 < t_mp < big_t:
        raise GateError(f"saddle estimate needs 0 < t < T = {cd.T:.6g}, got t = {t}")
    z = zeta(cd, t_mp, 1, ctx=ctx)
    pe = phi_eval(cd, z, t_mp, ctx=ctx)
    if check:
        q = ctx.log(n) / ctx.sqrt(n) / (abs(pe.dz2) ** ctx.mpf(1.5) * t_mp * t_mp)
        if q > gates.saddle_limit:
            raise GateError(
                f"saddle condition {ctx.nstr(q, 4)} exceeds {gates.saddle_limit} "
                f"(t too close to 0 or to a degenerate point, or n too small)"
            )
    else:
        q = None
    expo = ctx.exp(-n * pe.value)
    value = ctx.sqrt(2 * ctx.pi) * pe.psi * expo / ctx.sqrt(n * pe.dz2)
    squared = 2 * ctx.pi * pe.psi ** 2 * expo ** 2 / (n * pe.dz2)
    return Approximation(SADDLE, n, float(t), value, {
        "zeta": z, "phi": pe.value, "phi_zz": pe.dz2, "psi": pe.psi,
        "squared": squared, "condition": q,
    })


# -- boundary layers ---------------------------------------------------------------


def _cbrt_cut_positive(ctx, w):
    """Cube root analytic off ``[0, inf)``: ``arg w`` taken in ``(0, 2 pi)``."""
    theta = ctx.arg(w)
    if theta < 0:
        theta += 2 * ctx.pi
    return abs(w) ** (ctx.mpf(1) / 3) * ctx.expj(theta / 3)


class LayerCurve:
    """The cubic-model curve ``z(y)`` through ``zeta`` near a degenerate point.

    With ``s = sqrt(|t - t*|)``, ``kappa`` the slope in
    ``zeta(t) - zeta(t*) ~ kappa s`` and ``K = kappa^3 phi_zzz(zeta(t*), t*)``,
    the scaled offset ``W = (zeta - z) / kappa`` satisfies
    ``y^2 = (K/6) W^2 (3 s - W)``, which is ``phi(z) - phi(zeta)`` to leading
    order.  ``W`` comes from the Cardano form::

        A = -sqrt(6) / (sqrt(K) (3 s)^(3/2)),  B = K s / 2,  Z = sqrt(B) W
        r^3 = 27 A^2 y^2 - 2 + sqrt(27) y sqrt(27 A^4 y^2 - 4 A^2)
        Z = (r / 2^(1/3) + 2^(1/3) / r - 1) / (3 A)

    The cube root is the one analytic off ``[0, inf)`` (so ``Z(0) = 0``).
    When ``K`` is real and ``27 A^4 y^2 - 4 A^2 > 0`` the curve is only
    piecewise smooth; there the principal root is used for ``y > 0`` and
    ``exp(-2 pi i/3)`` times it for ``y < 0``.  Of ``W(y)`` and ``W(-y)``
    the one satisfying ``y = sqrt(K/6) W sqrt(3 s - W)`` is returned,
    after Newton polishing on the cubic.
    """

    def __init__(self, ctx, kappa, big_k, s, zeta_value):
        self.ctx = ctx
        self.kappa = kappa
        self.big_k = big_k
        self.s = s
        self.zeta = zeta_value
        self.sqrt_k6 = ctx.sqrt(big_k) / ctx.sqrt(6)
        self.a = -ctx.sqrt(6) / (ctx.sqrt(big_k) * (3 * s) ** ctx.mpf(1.5))
        self.b = big_k * s / 2
        self.sqrt_b = ctx.sqrt(self.b)
        self.cbrt2 = ctx.cbrt(2)
        self.real_k = abs(ctx.im(big_k)) <= abs(big_k) * ctx.ldexp(1, -ctx.prec // 2)

    def _r(self, y):
        ctx = self.ctx
        a2 = self.a * self.a
        disc = 27 * a2 * a2 * y * y - 4 * a2
        if self.real_k:
            disc = ctx.re(disc)
            if disc < 0:
                cube = 27 * a2 * y * y - 2 + ctx.sqrt(27) * y * ctx.mpc(0, 1) * ctx.sqrt(-disc)
                return _cbrt_cut_positive(ctx, ctx.mpc(cube))
            cube = 27 * a2 * y * y - 2 + ctx.sqrt(27) * y * ctx.sqrt(disc)
            root = ctx.cbrt(ctx.mpc(cube))
            return root if y > 0 else root * ctx.expj(-2 * ctx.pi / 3)
        cube = 27 * a2 * y * y - 2 + ctx.sqrt(27) * y * ctx.sqrt(disc)
        return _cbrt_cut_positive(ctx, ctx.mpc(cube))

    def _w_raw(self, y):
        r = self._r(y)
        big_z = (r / self.cbrt2 + self.cbrt2 / r - 1) / (3 * self.a)
        w = big_z / self.sqrt_b
        # Cardano cancels badly for small y; two Newton steps on the cubic fix that
        for _ in range(2):
            slope = self.big_k / 6 * w * (6 * self.s - 3 * w)
            if slope == 0:
                break
            w += self.residual(y, w) / slope
        return w

    def relation(self, y, w):
        """``y - sqrt(K/6) W sqrt(3 s - W)``."""
        return y - self.sqrt_k6 * w * self.ctx.sqrt(3 * self.s - w)

    def residual(self, y, w):
        """``y^2 - (K/6) W^2 (3 s - W)``."""
        return y * y - self.big_k / 6 * w * w * (3 * self.s - w)

    def w(self, y):
        ctx = self.ctx
        y = ctx.mpf(y)
        if y == 0:
            return ctx.mpc(0)
        w_plus = self._w_raw(y)
        w_minus = self._w_raw(-y)
        if abs(self.relation(y, w_minus)) < abs(self.relation(y, w_plus)):
            return w_minus
        return w_plus

    def z(self, y):
        return self.zeta - self.kappa * self.w(y)

    def integrand(self, y):
        """``(sqrt(3s - W) - s / sqrt(3s - W))^(-1)``."""
        root = self.ctx.sqrt(3 * self.s - self.w(y))
        return 1 / (root - self.s / root)

    def turning_point(self):
        """``|y|`` where ``W = 2 s`` (the second critical point), or ``None`` off the real line."""
        y_sq = 2 * self.big_k * self.s ** 3 / 3
        if not self.real_k:
            return None
        return self.ctx.sqrt(self.ctx.re(y_sq))

    def cut_point(self, radius, sign):
        """``y`` of sign ``sign`` with ``|W(y)| = radius`` by bracketing and bisection."""
        ctx = self.ctx
        hi = ctx.mpf(abs(self.sqrt_k6) * radius ** ctx.mpf(1.5) + 1e-30)
        for _ in range(200):
            if abs(self.w(sign * hi)) >= radius:
                break
            hi *= 2
        else:
            raise ConvergenceError("layer curve never leaves the cutoff disc")
        lo = ctx.mpf(0)
        for _ in range(ctx.prec // 2 + 20):
            mid = (lo + hi) / 2
            if abs(self.w(sign * mid)) < radius:
                lo = mid
            else:
                hi = mid
        return sign * (lo + hi) / 2


def _layer_setup(cd, layer, ctx):
    t1, _, big_t = cd.mp_thresholds(ctx)
    if layer == AT_T:
        return big_t, layer_constant_c(cd, ctx=ctx), -1
    if cd.regime != T_IS_T2:
        raise DomainError("the T1 layers exist only when T = T2")
    if layer == AT_T1_MINUS:
        return t1, layer_constant_d(cd, ctx=ctx), -1
    if layer == AT_T1_PLUS:
        return t1, layer_constant_dhat(cd, ctx=ctx), 1
    raise DomainError(f"unknown layer {layer!r}; expected one of {LAYERS}")


def layer_gate(cd, n, t, layer, gates=DEFAULT_GATES):
    """Raise :class:`GateError` unless ``t`` sits in the window of ``layer``."""
    ln = math.log(n)
    t_float = float(t)
    if layer == AT_T:
        gap = cd.T - t_float
        lo, hi = gates.layer_lo * n ** (-2 / 3), gates.layer_hi * ln * ln * n ** (-2 / 3)
        label = "T - t"
    else:
        gap = (cd.T1 - t_float) if layer == AT_T1_MINUS else (t_float - cd.T1)
        lo, hi = gates.t1_lo / n, gates.t1_hi * ln * ln * n ** (-2 / 3)
        label = "T1 - t" if layer == AT_T1_MINUS else "t - T1"
    if not lo <= gap <= hi:
        raise GateError(f"layer {layer}: {label} = {gap:.6g} outside [{lo:.6g}, {hi:.6g}] for n = {n}")


def layer_curve(cd, t, layer=AT_T, ctx=None, prec=None):
    """Build the :class:`LayerCurve` for ``layer`` at parameter ``t``."""
    ctx = _setup(ctx, prec)
    t_mp = ctx.mpf(t)
    t_star, kappa, side = _layer_setup(cd, layer, ctx)
    gap = (t_star - t_mp) * (-side)
    if gap <= 0:
        raise GateError(f"layer {layer} needs t on the other side of {ctx.nstr(t_star, 8)}")
    s = ctx.sqrt(gap)
    z_star = zeta(cd, t_star, 1, ctx=ctx)
    big_k = kappa ** 3 * phi_eval(cd, z_star, t_star, ctx=ctx).dz3
    return LayerCurve(ctx, kappa, big_k, s, zeta(cd, t_mp, 1, ctx=ctx)), z_star, t_star


def boundary_layer_approx(cd, n, t, layer=AT_T, ctx=None, prec=None, gates=DEFAULT_GATES,
                          check=True):
    """Cubic-model estimate of ``I(n, t)`` in a boundary layer.

    ``4 kappa psi(zeta*) exp(-n phi(zeta, t)) / (sqrt 6 sqrt K)`` times
    ``int_a^b exp(-n y^2) (sqrt(3s - W) - s / sqrt(3s - W))^(-1) dy``, with
    ``a < 0 < b`` the parameters where ``|W| = cutoff ln n / n^(1/3)``.
    """
    n = _check_n(n)
    if layer not in LAYERS:
        raise DomainError(f"unknown layer {layer!r}; expected one of {LAYERS}")
    if check:
        if layer != AT_T and cd.regime != T_IS_T2:
            raise DomainError("the T1 layers exist only when T = T2")
        layer_gate(cd, n, t, layer, gates)
    ctx = _setup(ctx, prec)
    curve, z_star, t_star = layer_curve(cd, t, layer, ctx=ctx)
    t_mp = ctx.mpf(t)
    radius = ctx.mpf(gates.cutoff) * ctx.log(n) / ctx.cbrt(n)
    a = curve.cut_point(radius, -1)
    b = curve.cut_point(radius, 1)
    # beyond |y| = y_max the Gaussian is below working precision
    y_max = ctx.sqrt((ctx.prec + 20) * ctx.ln2 / n)
    lo, hi = max(a, -y_max), min(b, y_max)
    points = [lo, ctx.mpf(0), hi]
    turn = curve.turning_point()
    if turn is not None:
        points += [p for p in (-turn, turn) if lo < p < hi]
    points = sorted(set(points))
    integral = ctx.quad(lambda y: ctx.exp(-n * y * y) * curve.integrand(y), points)
    pe = phi_eval(cd, curve.zeta, t_mp, ctx=ctx)
    psi_star = psi_value(cd, z_star, ctx)
    prefactor = 4 * curve.kappa * psi_star * ctx.exp(-n * pe.value) / (ctx.sqrt(6) * ctx.sqrt(curve.big_k))
    return Approximation(LAYER, n, float(t), prefactor * integral, {
        "layer": layer, "kappa": curve.kappa, "K": curve.big_k, "s": curve.s,
        "zeta": curve.zeta, "zeta_star": z_star, "a": a, "b": b,
        "integral": integral, "prefactor": prefactor,
    })


# -- small t -----------------------------------------------------------------------


def smallt_gate(n, t, gates=DEFAULT_GATES):
    limit = gates.smallt_factor * math.log(n) ** 4 / n
    if not 0 <= float(t) <= limit:
        raise GateError(f"small-t estimate needs 0 <= t <= {limit:.6g} for n = {n}, got {t}")


def smallt_approx(cd, n, t, ctx=None, prec=None, gates=DEFAULT_GATES, check=True):
    """Endpoint estimate of the first real-axis integral, evaluated in log form."""
    n = _check_n(n)
    if check:
        smallt_gate(n, t, gates)
    ctx = _setup(ctx, prec)
    t_mp = ctx.mpf(t)
    z1, z2 = cd.mp_params(ctx)
    j = ctx.mpc(0, 1)
    nt = n * t_mp
    half = ctx.mpf(0.5)
    log_cosh = n * ctx.pi * t_mp + ctx.log1p(ctx.exp(-2 * n * ctx.pi * t_mp))
    log_value = (
        log_cosh
        - (n - 1) * ctx.log(z1)
        + (half - j * nt) * ctx.ln2
        + (half + j * nt) * ctx.log(z2 - z1)
        + (half - j * nt) * ctx.log(z2 + z1)
        + log_gamma(ctx.mpf(1.5) + j * nt, ctx=ctx)
        - (ctx.mpf(1.5) + j * nt) * ctx.log(n)
    )
    value = -j * ctx.exp(log_value)
    return Approximation(SMALLT, n, float(t), value, {"log_abs": ctx.re(log_value)})


def approximate(cd, n, t, method, layer=AT_T, ctx=None, prec=None, gates=DEFAULT_GATES, check=True):
    """Dispatch on ``method`` in ``{'saddle', 'layer', 'smallt'}``."""
    if method == SADDLE:
        return saddle_approx(cd, n, t, ctx=ctx, prec=prec, gates=gates, check=check)
    if method == LAYER:
        return boundary_layer_approx(cd, n, t, layer, ctx=ctx, prec=prec, gates=gates, check=check)
    if method == SMALLT:
        return smallt_approx(cd, n, t, ctx=ctx, prec=prec, gates=gates, check=check)
    raise DomainError(f"unknown method {method!r}")
