"""Thresholds, critical curves and the phase function for the (z1, z2) form of Q.

With ``x = 1/2 + i n t`` the Cauchy integrand for ``H_n(x)/n!`` is
``f(z, t) = exp(-n phi(z, t)) psi(z)`` where::

    phi(z, t) = Log z - i t (Log(z1-z) + Log(z2-z) - Log(z1+z) - Log(z2+z))
    psi(z)    = exp((Log(z1-z) + Log(z2-z) + Log(z1+z) + Log(z2+z)) / 2) / z

All logarithms and square roots use the principal branch.

The critical points of ``phi`` solve the quartic::

    z^4 - 2it(z1+z2) z^3 - (z1^2+z2^2) z^2 + 2it z1 z2 (z1+z2) z + z1^2 z2^2 = 0

and two of its roots, ``zeta_1(t)`` and ``zeta_2(t)``, trace curves in the
first quadrant for ``0 <= t <= T``.
"""

from dataclasses import dataclass
from fractions import Fraction

from ..errors import DomainError, ValidationError
from ..precision import make_context, to_mpf

T_IS_T1 = "T_IS_T1"
T_IS_T2 = "T_IS_T2"


@dataclass(frozen=True)
class CriticalData:
    """``(z1, z2)`` with the thresholds ``T1``, ``T2``, ``T`` and the regime flag.

    ``T1`` is rational; ``T2`` and ``T`` are stored as floats for display and
    recomputed at working precision by :meth:`mp_thresholds`.
    """

    z1: Fraction
    z2: Fraction
    T1: float
    T2: float
    T: float
    regime: str

    @property
    def discriminant(self):
        """``z1^2 - 6 z1 z2 + z2^2``; nonnegative means ``T = T1``."""
        return self.z1 ** 2 - 6 * self.z1 * self.z2 + self.z2 ** 2

    def mp_params(self, ctx):
        return to_mpf(ctx, self.z1), to_mpf(ctx, self.z2)

    def mp_thresholds(self, ctx):
        z1, z2 = self.mp_params(ctx)
        t1 = (z2 - z1) / (z1 + z2)
        t2 = (z1 + z2) / (4 * ctx.sqrt(z1 * z2))
        return t1, t2, (t1 if self.regime == T_IS_T1 else t2)

    def describe(self):
        return {
            "z1": str(self.z1),
            "z2": str(self.z2),
            "T1": self.T1,
            "T2": self.T2,
            "T": self.T,
            "regime": self.regime,
        }


def thresholds(z1, z2):
    """Build :class:`CriticalData`; requires ``0 < z1 < z2``."""
    from ..sheffer import as_fraction

    z1, z2 = as_fraction(z1), as_fraction(z2)
    if z1 == z2:
        raise ValidationError("z1 = z2 makes T1 = 0 and the critical curves degenerate")
    if not 0 < z1 < z2:
        raise ValidationError("need 0 < z1 < z2")
    ctx = make_context(64)
    t1 = (z2 - z1) / (z1 + z2)
    t2 = float((to_mpf(ctx, z1) + to_mpf(ctx, z2)) / (4 * ctx.sqrt(to_mpf(ctx, z1 * z2))))
    disc = z1 ** 2 - 6 * z1 * z2 + z2 ** 2
    regime = T_IS_T1 if disc >= 0 else T_IS_T2
    big_t = float(t1) if regime == T_IS_T1 else t2
    return CriticalData(z1, z2, float(t1), t2, big_t, regime)


def from_q(q):
    q.require_analytic()
    return thresholds(q.z1, q.z2)


def _ctx(ctx, prec):
    return ctx if ctx is not None else make_context(prec)


def _t(ctx, t):
    if isinstance(t, Fraction):
        return to_mpf(ctx, t)
    return ctx.mpf(t)


def zeta(cd, t, which=1, ctx=None, prec=None):
    """``zeta_1(t)`` or ``zeta_2(t)`` from the closed-form root formulas, ``0 <= t <= T``."""
    ctx = _ctx(ctx, prec)
    if which not in (1, 2):
        raise ValidationError("which must be 1 or 2")
    t = _t(ctx, t)
    z1, z2 = cd.mp_params(ctx)
    t1, _, big_t = cd.mp_thresholds(ctx)
    # float inputs near T may round past it
    slack = max(ctx.ldexp(1, -ctx.prec + 8), big_t * ctx.mpf(4e-16))
    if t < 0 or t > big_t + slack:
        raise DomainError(f"t = {ctx.nstr(t, 8)} outside [0, T] with T = {ctx.nstr(big_t, 8)}")
    t = min(t, big_t)
    h = (z1 + z2) / 2
    j = ctx.mpc(0, 1)
    if t <= t1:
        s = ctx.sqrt(t1 * t1 - t * t)
        # at t = T1 the radicand sits on the negative axis; take the limit
        # from t < T1, where its imaginary part has the sign of -+2ts
        if which == 1:
            return h * (j * t - s + _sqrt_limit(ctx, 1 - 2 * t * t - 2 * j * t * s, -1))
        return h * (j * t + s + _sqrt_limit(ctx, 1 - 2 * t * t + 2 * j * t * s, 1))
    s = ctx.sqrt(t * t - t1 * t1)
    if which == 1:
        return h * (j * t + j * s + ctx.sqrt(1 - 2 * t * t - 2 * t * s))
    return h * (j * t - j * s + ctx.sqrt(1 - 2 * t * t + 2 * t * s))


def _sqrt_limit(ctx, w, side):
    w = ctx.mpc(w)
    if ctx.im(w) == 0 and ctx.re(w) < 0:
        return side * ctx.mpc(0, 1) * ctx.sqrt(-ctx.re(w))
    return ctx.sqrt(w)


def quartic_terms(cd, z, t, ctx):
    z1, z2 = cd.mp_params(ctx)
    j = ctx.mpc(0, 1)
    t = _t(ctx, t)
    return [
        z ** 4,
        -2 * j * t * (z1 + z2) * z ** 3,
        -(z1 * z1 + z2 * z2) * z ** 2,
        2 * j * t * z1 * z2 * (z1 + z2) * z,
        (z1 * z2) ** 2,
    ]


def quartic_residual(cd, z, t, ctx=None, prec=None):
    """``|quartic(z)|`` divided by the sum of the moduli of its terms."""
    ctx = _ctx(ctx, prec)
    z = ctx.mpc(z)
    terms = quartic_terms(cd, z, t, ctx)
    return abs(ctx.fsum(terms)) / ctx.fsum(abs(x) for x in terms)


@dataclass(frozen=True)
class PhiEval:
    """``phi`` and its derivatives at one point, plus ``psi``.

    ``dt`` and ``dzt`` are the partial derivatives in ``t``.
    """

    value: object
    dz: object
    dz2: object
    dz3: object
    psi: object
    dt: object
    dzt: object


def _check_off_cuts(cd, z, ctx):
    z1, _ = cd.mp_params(ctx)
    if z == 0:
        raise DomainError("phi is singular at z = 0")
    if ctx.im(z) == 0 and abs(ctx.re(z)) >= z1:
        raise DomainError("z lies on a branch cut (-inf, -z1] or [z1, inf)")


def log_terms(cd, z, ctx):
    """``(Log(z1-z), Log(z2-z), Log(z1+z), Log(z2+z))``."""
    z1, z2 = cd.mp_params(ctx)
    return ctx.log(z1 - z), ctx.log(z2 - z), ctx.log(z1 + z), ctx.log(z2 + z)


def phi_value(cd, z, t, ctx):
    l1, l2, l3, l4 = log_terms(cd, z, ctx)
    return ctx.log(z) - ctx.mpc(0, 1) * t * (l1 + l2 - l3 - l4)


def psi_value(cd, z, ctx):
    l1, l2, l3, l4 = log_terms(cd, z, ctx)
    return ctx.exp((l1 + l2 + l3 + l4) / 2) / z


def phi_eval(cd, z, t, ctx=None, prec=None):
    """Evaluate ``phi``, ``psi`` and derivatives at ``z`` off the cuts."""
    ctx = _ctx(ctx, prec)
    z = ctx.mpc(z)
    t = _t(ctx, t)
    _check_off_cuts(cd, z, ctx)
    z1, z2 = cd.mp_params(ctx)
    j = ctx.mpc(0, 1)
    l1, l2, l3, l4 = log_terms(cd, z, ctx)
    big_f = l1 + l2 - l3 - l4
    value = ctx.log(z) - j * t * big_f
    psi = ctx.exp((l1 + l2 + l3 + l4) / 2) / z
    a, b, c, d = z1 - z, z2 - z, z1 + z, z2 + z
    s1 = 1 / a + 1 / b + 1 / c + 1 / d
    s2 = 1 / a ** 2 + 1 / b ** 2 - 1 / c ** 2 - 1 / d ** 2
    s3 = 1 / a ** 3 + 1 / b ** 3 + 1 / c ** 3 + 1 / d ** 3
    dz = 1 / z + j * t * s1
    dz2 = -1 / z ** 2 + j * t * s2
    dz3 = 2 / z ** 3 + 2 * j * t * s3
    return PhiEval(value, dz, dz2, dz3, psi, -j * big_f, j * s1)


def t_of_zeta(cd, zeta_value, ctx=None, prec=None):
    """The (generally complex) ``t`` for which ``zeta_value`` is a critical point."""
    ctx = _ctx(ctx, prec)
    z = ctx.mpc(zeta_value)
    z1, z2 = cd.mp_params(ctx)
    z_sq = z * z
    num = (z_sq - z1 * z1) * (z_sq - z2 * z2)
    den = 2 * z * (z1 + z2) * (z_sq - z1 * z2)
    return num / den / ctx.mpc(0, 1)


def phi_zz_at_critical(cd, zeta_value, ctx=None, prec=None):
    """Closed form of ``phi_zz(zeta, t(zeta))`` with ``t`` eliminated."""
    ctx = _ctx(ctx, prec)
    z = ctx.mpc(zeta_value)
    z1, z2 = cd.mp_params(ctx)
    q = z * z
    num = (q + z1 * z2) * (q * q + (z1 * z1 - 4 * z1 * z2 + z2 * z2) * q + (z1 * z2) ** 2)
    den = q * (q - z1 * z1) * (q - z2 * z2) * (q - z1 * z2)
    return num / den


def g_poles(cd, ctx=None, prec=None):
    """Points where ``g`` is singular: zeros of ``phi_zz(zeta, t(zeta))`` and the origin."""
    ctx = _ctx(ctx, prec)
    z1, z2 = cd.mp_params(ctx)
    poles = [ctx.mpc(0)]
    r = ctx.sqrt(z1 * z2)
    poles += [ctx.mpc(0, 1) * r, -ctx.mpc(0, 1) * r]
    bq = z1 * z1 - 4 * z1 * z2 + z2 * z2
    disc = ctx.sqrt(ctx.mpc(bq * bq - 4 * (z1 * z2) ** 2))
    for w in ((-bq + disc) / 2, (-bq - disc) / 2):
        s = ctx.sqrt(w)
        poles += [s, -s]
    return poles


def g_zeta(cd, n, zeta_value, ctx=None, prec=None, pole_tol=1e-12):
    """``2 pi psi^2 exp(-2 n phi) / (n phi_zz)`` along ``t = t(zeta)``."""
    ctx = _ctx(ctx, prec)
    z = ctx.mpc(zeta_value)
    for p in g_poles(cd, ctx):
        if abs(z - p) < pole_tol:
            raise DomainError(f"zeta is within {pole_tol} of a pole of g at {ctx.nstr(p, 10)}")
    t = t_of_zeta(cd, z, ctx)
    z1, z2 = cd.mp_params(ctx)
    psi_sq = (z1 - z) * (z2 - z) * (z1 + z) * (z2 + z) / (z * z)
    l1, l2, l3, l4 = log_terms(cd, z, ctx)
    phi = ctx.log(z) - ctx.mpc(0, 1) * t * (l1 + l2 - l3 - l4)
    pzz = phi_zz_at_critical(cd, z, ctx)
    return 2 * ctx.pi * psi_sq * ctx.exp(-2 * n * phi) / (n * pzz)


# -- boundary constants ------------------------------------------------------------


def layer_constant_c(cd, ctx=None, prec=None, printed=False):
    """``c`` with ``zeta_1(t) - zeta_1(T) ~ c sqrt(T - t)`` as ``t -> T``.

    In the ``T = T2`` regime the commonly quoted closed form lacks the factor
    ``(z1 + z2)/2`` (it is not even homogeneous of degree one in ``(z1, z2)``);
    ``printed=True`` returns that uncorrected value for comparison.
    """
    ctx = _ctx(ctx, prec)
    z1, z2 = cd.mp_params(ctx)
    t1, _, _ = cd.mp_thresholds(ctx)
    if cd.regime == T_IS_T1:
        r = ctx.sqrt(2 * t1)
        return (z1 + z2) / 2 * (-r + t1 * r / ctx.sqrt(2 * t1 * t1 - 1))
    base = (
        ctx.sqrt(32) * (z1 * z2) ** (ctx.mpf(3) / 4)
        / ctx.sqrt((z1 + z2) * (-z1 * z1 + 6 * z1 * z2 - z2 * z2))
    )
    return base if printed else (z1 + z2) / 2 * base


def _require_t2_regime(cd):
    if cd.regime != T_IS_T2:
        raise DomainError("the T1 layer exists only when T = T2")


def layer_constant_d(cd, ctx=None, prec=None):
    """``d`` with ``zeta_1(t) - zeta_1(T1) ~ d sqrt(T1 - t)`` for ``t -> T1-``."""
    _require_t2_regime(cd)
    ctx = _ctx(ctx, prec)
    z1, z2 = cd.mp_params(ctx)
    t1, _, _ = cd.mp_thresholds(ctx)
    j = ctx.mpc(0, 1)
    return -(z1 + z2) * ctx.sqrt(t1) / ctx.sqrt(2) * (1 + j * t1 / ctx.sqrt(1 - 2 * t1 * t1))


def layer_constant_dhat(cd, ctx=None, prec=None):
    """``dhat`` with ``zeta_1(t) - zeta_1(T1) ~ dhat sqrt(t - T1)`` for ``t -> T1+``."""
    _require_t2_regime(cd)
    ctx = _ctx(ctx, prec)
    z1, z2 = cd.mp_params(ctx)
    t1, _, _ = cd.mp_thresholds(ctx)
    j = ctx.mpc(0, 1)
    return (z1 + z2) * ctx.sqrt(t1) / ctx.sqrt(2) * (j - t1 / ctx.sqrt(1 - 2 * t1 * t1))
