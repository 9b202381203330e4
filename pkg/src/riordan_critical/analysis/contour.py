"""The loop integral around ``[z1, inf)`` and its two evaluation routes.

With ``s = 1/2 + i n t`` the loop integral collapses, via the boundary values
of the principal branches on the two sides of the cut, to::

    I = P_A * int_1^{z2/z1} F_A(w) dw + P_B * int_1^inf F_B(w) dw

    P_A = -i (e^{n pi t} + e^{-n pi t}) / z1^n
    P_B = (e^{-2 pi n t} - e^{2 pi n t}) / z2^n
    F_A = z1 (w-1)^s (z2-w z1)^s (1+w)^sbar (z2+w z1)^sbar w^{-n-1}
    F_B = z2 (w-1)^s (w z2-z1)^s (1+w)^sbar (z1+w z2)^sbar w^{-n-1}

and ``pi H_n(1/2 + i n t) / n!`` equals ``Im I`` for even ``n`` and
``-i Re I`` for odd ``n``.

The real-axis route integrates those two pieces.  Their moduli carry no
exponential factor, so for large ``n`` the result is a small difference of
large terms and the working precision must cover the lost bits.  The
deformed route instead integrates ``exp(-n phi) psi`` along the ray from
``x0 - i inf`` to ``x0`` (``0 < x0 < z1``) followed by the steepest-descent
path through ``zeta_1(t)`` and a vertical ray to ``+i inf``; it has no
cancellation and is the practical choice once ``n`` is in the hundreds.
"""

import cmath
import math
from dataclasses import dataclass, field
from functools import lru_cache
from math import factorial

import mpmath
import numpy as np

from ..errors import ConvergenceError, DomainError, ValidationError
from ..precision import check_precision, default_precision, make_context, to_mpf
from .critical import zeta

REAL_AXIS = "real_axis"
DEFORMED = "deformed"
VERTICAL = "vertical"
AUTO = "auto"
METHODS = (REAL_AXIS, DEFORMED, VERTICAL, AUTO)

GUARD_BITS = 12
MAX_PRECISION = 1 << 15


@dataclass(frozen=True)
class ContourResult:
    """Value of the loop integral with its error budget.

    ``est_error`` adds the quadrature, series-truncation, tail and rounding
    estimates.  ``scale`` is the L1 size of the summed terms, so
    ``log2(scale / |integral|)`` is the number of bits lost to cancellation.
    """

    integral: object
    est_error: object
    n: int
    t: float
    method: str = REAL_AXIS
    precision: int = 0
    scale: object = 0
    evaluations: int = 0
    attempts: tuple = field(default_factory=tuple)

    @property
    def cancellation_bits(self):
        mag = abs(self.integral)
        if mag == 0 or self.scale == 0:
            return float("inf")
        return max(0.0, float(mpmath.log(self.scale, 2) - mpmath.log(mag, 2)))

    def parity_component(self):
        """The real number ``pi H_n(1/2 + i n t) / n!`` (odd ``n``: divided by ``-i``)."""
        return self.integral.imag if self.n % 2 == 0 else self.integral.real

    def hn_value(self):
        """``H_n(1/2 + i n t)`` reconstructed from the integral, at the run's precision."""
        with mpmath.workprec(max(self.precision, 53)):
            part = self.parity_component() * factorial(self.n) / mpmath.pi
            return mpmath.mpc(part, 0) if self.n % 2 == 0 else mpmath.mpc(0, -part)

    def relative_error(self, component=False):
        mag = abs(self.parity_component()) if component else abs(self.integral)
        return float("inf") if mag == 0 else float(self.est_error / mag)


# -- Gauss-Legendre panels -----------------------------------------------------------


@lru_cache(maxsize=32)
def _gl_nodes(degree, prec):
    ctx = make_context(prec + 20)
    rule = mpmath.calculus.quadrature.GaussLegendre(ctx)
    return tuple((x, w) for x, w in rule.calc_nodes(degree, prec + 20))


def _gl_degree(prec):
    """mpmath degree ``d`` (``3 * 2^(d-1)`` points) for the finer rule at ``prec`` bits."""
    d = 4
    while 3 * 2 ** (d - 1) < prec / 6 and d < 9:
        d += 1
    return d


class _Panels:
    """Adaptive Gauss-Legendre on straight panels, ``m`` against ``2m`` points.

    ``2m`` is 24 up to about 128 bits and grows with the working precision.

    The 24-point error is estimated as ``scale * (d / scale)**1.5`` with ``d``
    the 12/24 difference, a deliberately conservative version of the usual
    squared-convergence heuristic.
    """

    def __init__(self, ctx, func):
        self.ctx = ctx
        self.func = func
        d = _gl_degree(ctx.prec)
        self.lo = [(ctx.mpf(x), ctx.mpf(w)) for x, w in _gl_nodes(d - 1, ctx.prec)]
        self.hi = [(ctx.mpf(x), ctx.mpf(w)) for x, w in _gl_nodes(d, ctx.prec)]
        self.evaluations = 0
        self.error = ctx.mpf(0)
        self.scale = ctx.mpf(0)

    def _rule(self, nodes, a, b):
        ctx = self.ctx
        mid, half = (a + b) / 2, (b - a) / 2
        total = ctx.mpc(0)
        l1 = ctx.mpf(0)
        for x, w in nodes:
            v = w * self.func(mid + half * x)
            total += v
            l1 += abs(v)
        self.evaluations += len(nodes)
        return total * half, l1 * abs(half)

    def integrate(self, breaks, tol, max_panels=20000):
        """Integrate over consecutive ``breaks``; ``tol`` is the absolute target for the whole run."""
        ctx = self.ctx
        length = sum(abs(b - a) for a, b in zip(breaks[:-1], breaks[1:]))
        if length == 0:
            return ctx.mpc(0)
        stack = [(a, b) for a, b in zip(breaks[:-1], breaks[1:])][::-1]
        total = ctx.mpc(0)
        panels = 0
        while stack:
            a, b = stack.pop()
            panels += 1
            if panels > max_panels:
                raise ConvergenceError(
                    "adaptive quadrature exceeded its panel budget",
                    {"panels": panels, "evaluations": self.evaluations},
                )
            q12, _ = self._rule(self.lo, a, b)
            q24, scale = self._rule(self.hi, a, b)
            diff = abs(q24 - q12)
            if scale == 0:
                err = ctx.mpf(0)
            else:
                err = scale * ctx.power(min(diff / scale, 1), 1.5)
            allowed = tol * abs(b - a) / length
            if err <= allowed or abs(b - a) < ctx.ldexp(abs(a) + 1, -ctx.prec + 10):
                total += q24
                self.error += err
                self.scale += scale
            else:
                m = (a + b) / 2
                stack.append((m, b))
                stack.append((a, m))
        return total


# -- real-axis route ---------------------------------------------------------------------


@dataclass(frozen=True)
class _Factor:
    root: object   # zero of the linear factor
    sign: int      # +1 if the factor is (w - root), -1 if (root - w)
    expo: object   # complex exponent


class _LinearProduct:
    """``const * prod_j (sign_j (w - root_j))^expo_j`` with positive bases on the interval."""

    def __init__(self, ctx, const, factors):
        self.ctx = ctx
        self.const = const
        self.factors = factors
        self.re = [ctx.re(f.expo) for f in factors]
        self.im = [ctx.im(f.expo) for f in factors]

    def __call__(self, w):
        ctx = self.ctx
        lr = ctx.mpf(0)
        li = ctx.mpf(0)
        for f, a, b in zip(self.factors, self.re, self.im):
            lg = ctx.log(f.sign * (w - f.root))
            lr += a * lg
            li += b * lg
        return self.const * ctx.exp(lr) * ctx.expj(li)

    def log_abs(self, w):
        """Float ``log |F(w)|`` for numpy arrays, used only for scale estimates."""
        out = math.log(abs(complex(self.const)))
        for f, a in zip(self.factors, self.re):
            out = out + float(a) * np.log(f.sign * (w - float(f.root)))
        return out


def _endpoint_series(ctx, prod, index, end, direction, tol, max_terms):
    """Integrate ``prod`` over ``[end, end + direction * eps]`` by expanding the smooth part.

    Factor ``index`` vanishes at ``end``.  Writing ``w = end + direction * e``
    the integrand is ``C e^gamma G(e)`` with ``log G`` a sum of ``log(1 + c e)``
    terms; its Taylor coefficients come from the exponential recurrence and are
    integrated against ``e^(gamma + k)`` exactly.
    """
    sing = prod.factors[index]
    gamma = sing.expo
    others = [f for j, f in enumerate(prod.factors) if j != index]
    # choose eps so every |expo_j| * eps / dist_j <= 1/4
    eps = None
    for f in others:
        dist = abs(end - f.root)
        cand = dist / (4 * max(1, abs(f.expo)))
        eps = cand if eps is None else min(eps, cand)
    eps = ctx.mpf(eps)
    log0 = ctx.log(prod.const) + gamma * ctx.log(sing.sign * direction)
    cs = []
    for f in others:
        base = f.sign * (end - f.root)
        log0 += f.expo * ctx.log(base)
        cs.append((f.expo, f.sign * direction / base))
    # L_k: coefficients of log G for k >= 1
    powers = [ctx.mpf(1)] * len(cs)
    lcoef = [ctx.mpc(0)]
    g = [ctx.exp(log0)]
    total = ctx.mpc(0)
    eps_pow = ctx.power(eps, gamma + 1)
    small = 0
    err = None
    for k in range(0, max_terms):
        if k > 0:
            lk = ctx.mpc(0)
            sign = 1 if k % 2 == 1 else -1
            for j, (expo, c) in enumerate(cs):
                powers[j] *= c
                lk += sign * expo * powers[j] / k
            lcoef.append(lk)
            gk = ctx.fsum(m * lcoef[m] * g[k - m] for m in range(1, k + 1)) / k
            g.append(gk)
            eps_pow *= eps
        term = g[k] * eps_pow / (gamma + k + 1)
        total += term
        size = abs(term)
        if size <= tol:
            small += 1
            if small >= 3:
                err = 2 * size
                break
        else:
            small = 0
    else:
        raise ConvergenceError(
            "endpoint series did not converge", {"terms": max_terms, "last": size}
        )
    # |dw| = de, so this is the integral in increasing w
    return total, eps, err


def _real_axis_pieces(ctx, cd, n, t):
    z1, z2 = cd.mp_params(ctx)
    j = ctx.mpc(0, 1)
    s = ctx.mpf(0.5) + j * n * t
    sb = ctx.conj(s)
    wexp = ctx.mpc(-n - 1)
    fa = _LinearProduct(ctx, ctx.mpc(z1), [
        _Factor(ctx.mpf(1), 1, s),
        _Factor(z2 / z1, -1, s),
        _Factor(ctx.mpf(-1), 1, sb),
        _Factor(-z2 / z1, 1, sb),
        _Factor(ctx.mpf(0), 1, wexp),
    ])
    # the factors above are in monic form; restore the dropped linear coefficients
    fa.const = ctx.mpc(z1) * ctx.power(z1, s) * ctx.power(z1, sb)
    fb = _LinearProduct(ctx, ctx.mpc(z2), [
        _Factor(ctx.mpf(1), 1, s),
        _Factor(z1 / z2, 1, s),
        _Factor(ctx.mpf(-1), 1, sb),
        _Factor(-z1 / z2, 1, sb),
        _Factor(ctx.mpf(0), 1, wexp),
    ])
    fb.const = ctx.mpc(z2) * ctx.power(z2, s) * ctx.power(z2, sb)
    ep, em = ctx.exp(n * ctx.pi * t), ctx.exp(-n * ctx.pi * t)
    pa = -j * (ep + em) / ctx.power(z1, n)
    pb = (em * em - ep * ep) / ctx.power(z2, n)
    return fa, fb, pa, pb


def _log_l1_estimate(prod, a, b, infinite=False, nodes=400):
    """Float estimate of ``log int |F|`` over ``[a, b]`` or ``[a, inf)``."""
    x, w = np.polynomial.legendre.leggauss(nodes)
    if infinite:
        # w = a / u, u in (0, 1]
        u = (x + 1) / 2
        pts = a / u
        jac = a / u ** 2
        wt = w / 2
    else:
        # cosine map clusters nodes at both ends
        theta = (x + 1) * math.pi / 2
        pts = a + (b - a) * (1 - np.cos(theta)) / 2
        jac = (b - a) * np.sin(theta) * math.pi / 4
        wt = w
    with np.errstate(divide="ignore", invalid="ignore"):
        vals = prod.log_abs(pts) + np.log(jac * wt)
    vals = vals[np.isfinite(vals)]
    top = vals.max()
    return float(top + np.log(np.exp(vals - top).sum()))


def _integrate_piece(ctx, prod, left, right, index_left, index_right, n, t, tol, tail=None):
    """Endpoint series at the singular ends, log-variable panels in between.

    ``right`` is ``None`` for ``[left, inf)``; ``tail`` is then the cutoff ``R``.
    """
    total = ctx.mpc(0)
    errs = ctx.mpf(0)
    evals = 0
    scale = ctx.mpf(0)
    max_terms = 8 * ctx.prec + 200
    val, eps_l, e1 = _endpoint_series(ctx, prod, index_left, left, 1, tol / 8, max_terms)
    total += val
    errs += e1
    scale += abs(val)
    freq = 2 * n * t + n / 2 + 1
    pan = _Panels(ctx, None)
    if right is not None:
        val, eps_r, e2 = _endpoint_series(ctx, prod, index_right, right, -1, tol / 8, max_terms)
        total += val
        errs += e2
        scale += abs(val)
        mid = (left + right) / 2
        u_lo, u_hi = ctx.log(eps_l), ctx.log(mid - left)
        v_lo, v_hi = ctx.log(eps_r), ctx.log(right - mid)

        def f_left(u, left=left):
            e = ctx.exp(u)
            return prod(left + e) * e

        def f_right(v, right=right):
            e = ctx.exp(v)
            return prod(right - e) * e

        for fn, lo, hi in ((f_left, u_lo, u_hi), (f_right, v_lo, v_hi)):
            pan.func = fn
            total += pan.integrate(_breaks(ctx, lo, hi, freq), tol / 4)
    else:
        two = left + 1
        pan.func = lambda u: (lambda e: prod(left + e) * e)(ctx.exp(u))
        total += pan.integrate(_breaks(ctx, ctx.log(eps_l), ctx.log(two - left), freq), tol / 4)
        pan.func = lambda x: (lambda w: prod(w) * w)(ctx.exp(x))
        total += pan.integrate(_breaks(ctx, ctx.log(two), ctx.log(tail), freq), tol / 4)
    errs += pan.error
    evals += pan.evaluations
    scale += pan.scale
    return total, errs, evals, scale


def _breaks(ctx, lo, hi, freq):
    width = hi - lo
    count = max(1, int(math.ceil(float(width) * freq / 32)))
    count = min(count, 4000)
    return [lo + width * k / count for k in range(count + 1)]


def _tail_cutoff(ctx, cd, n, log_pb, log_tol):
    """``R`` with ``|P_B| int_R^inf |F_B| <= tol / 100``."""
    z1, z2 = float(cd.z1), float(cd.z2)
    # for w >= 2: |F_B| <= 1.5 z2 (z2 + z1/2) w^(1-n)
    const = 1.5 * z2 * (z2 + z1 / 2)
    log_target = log_tol - math.log(100) - log_pb
    # const R^(2-n) / (n-2) <= exp(log_target)
    log_r = (math.log(const / (n - 2)) - log_target) / (n - 2)
    return ctx.mpf(max(4.0, math.exp(min(log_r, 700.0))))


def _real_axis_once(cd, n, t, prec, log_scale, log_floor):
    ctx = make_context(prec)
    fa, fb, pa, pb = _real_axis_pieces(ctx, cd, n, ctx.mpf(t))
    tol = ctx.exp(max(log_scale - (prec - GUARD_BITS) * math.log(2), log_floor))
    r = to_mpf(ctx, cd.z2 / cd.z1)
    ja, ea, na, sa = _integrate_piece(ctx, fa, ctx.mpf(1), r, 0, 1, n, t, tol / abs(pa) / 2)
    total = pa * ja
    err = abs(pa) * ea
    scale = abs(pa) * sa
    evals = na
    if t > 0:
        cut = _tail_cutoff(ctx, cd, n, float(ctx.log(abs(pb))), float(ctx.log(tol)))
        jb, eb, nb, sb = _integrate_piece(ctx, fb, ctx.mpf(1), None, 0, None, n, t,
                                          tol / abs(pb) / 2, tail=cut)
        total += pb * jb
        err += abs(pb) * eb + tol / 100
        scale += abs(pb) * sb
        evals += nb
    err += scale * ctx.ldexp(1, -prec + 6)
    return total, err, scale, evals


def _real_axis_log_scale(cd, n, t):
    ctx = make_context(64)
    fa, fb, pa, pb = _real_axis_pieces(ctx, cd, n, ctx.mpf(t))
    r = float(cd.z2 / cd.z1)
    la = float(ctx.log(abs(pa))) + _log_l1_estimate(fa, 1.0, r)
    if t == 0:
        return la
    lb = float(ctx.log(abs(pb))) + _log_l1_estimate(fb, 1.0, None, infinite=True)
    return max(la, lb) + math.log1p(math.exp(-abs(la - lb)))


# -- deformed route ----------------------------------------------------------------------


def _phi_c(z, t, z1, z2):
    return cmath.log(z) - 1j * t * (
        cmath.log(z1 - z) + cmath.log(z2 - z) - cmath.log(z1 + z) - cmath.log(z2 + z)
    )


def _phiz_c(z, t, z1, z2):
    return 1 / z + 1j * t * (1 / (z1 - z) + 1 / (z2 - z) + 1 / (z1 + z) + 1 / (z2 + z))


def _phizz_c(z, t, z1, z2):
    return -1 / z ** 2 + 1j * t * (
        1 / (z1 - z) ** 2 + 1 / (z2 - z) ** 2 - 1 / (z1 + z) ** 2 - 1 / (z2 + z) ** 2
    )


def _trace(start, t, z1, z2, base, drop, stop_on_drop, radius=60.0, max_steps=20000):
    """Follow ``dz/ds = conj(phi_z)/|phi_z|`` (ascent of ``Re phi``) by RK4 in floats."""

    def vel(z):
        g = _phiz_c(z, t, z1, z2).conjugate()
        return g / abs(g)

    pts = [start]
    z = start
    for _ in range(max_steps):
        h = 0.05 * min(abs(z), abs(z - z1), abs(z - z2), abs(z + z1)) + 1e-4
        k1 = vel(z)
        k2 = vel(z + h / 2 * k1)
        k3 = vel(z + h / 2 * k2)
        k4 = vel(z + h * k3)
        z = z + h / 6 * (k1 + 2 * k2 + 2 * k3 + k4)
        if z.imag <= 0:
            pts.append(complex(z.real, 0.0))
            return pts, "real"
        pts.append(z)
        if stop_on_drop and _phi_c(z, t, z1, z2).real - base > drop:
            return pts, "drop"
        if abs(z) > radius:
            return pts, "far"
    return pts, "steps"


def _coarsen(path, rel=0.03):
    keep = [path[0]]
    for p in path[1:-1]:
        if abs(p - keep[-1]) > rel * max(abs(keep[-1]), 1e-3):
            keep.append(p)
    keep.append(path[-1])
    return keep


@dataclass(frozen=True)
class DeformedPath:
    """Polyline from ``x0`` to ``top`` between the two vertical rays.

    ``saddle`` is ``None`` for the plain vertical line ``Re z = x0``.
    """

    x0: float
    nodes: tuple
    top: complex
    saddle: object
    landed: str


def vertical_path(cd, x0=None):
    """The line ``Re z = x0`` (default ``z1/2``); valid for every ``t``."""
    z1 = float(cd.z1)
    x0 = z1 / 2 if x0 is None else float(x0)
    if not 0 < x0 < z1:
        raise ValidationError("the vertical line needs 0 < x0 < z1")
    return DeformedPath(x0, (complex(x0, 0.0), complex(x0, 1.0)), complex(x0, 1.0), None, "vertical")


def deformed_path(cd, n, t, prec_bits=128):
    """Steepest-descent polyline through ``zeta_1(t)`` for ``0 < t < T``."""
    if not 0 < t < cd.T:
        raise DomainError("the deformed path needs 0 < t < T")
    z1, z2 = float(cd.z1), float(cd.z2)
    zc = complex(zeta(cd, t, 1, prec=64))
    if zc.real <= 0 or zc.imag <= 0:
        raise DomainError("zeta_1(t) is on an axis; use the real-axis route")
    theta = -cmath.phase(_phizz_c(zc, t, z1, z2)) / 2
    delta = min(0.02 * abs(zc), 0.1 * zc.real, 0.2 * zc.imag)
    offset = cmath.exp(1j * theta) * delta
    base = _phi_c(zc, t, z1, z2).real
    drop = max((prec_bits * math.log(2) + 30) / n, 0.25)
    first, kind_a = _trace(zc + offset, t, z1, z2, base, drop, False)
    second, kind_b = _trace(zc - offset, t, z1, z2, base, drop, False)
    if kind_b == "real" and kind_a != "real":
        first, second, kind_a, kind_b = second, first, kind_b, kind_a
    elif kind_a == kind_b and first[-1].imag > second[-1].imag:
        first, second, kind_a, kind_b = second, first, kind_b, kind_a
    if kind_b == "real":
        raise ConvergenceError("both steepest-descent branches reach the real axis", {"t": t})
    end = first[-1]
    x0 = min(max(end.real, 0.05 * z1), 0.999 * z1)
    upper = _coarsen(second)
    lower = _coarsen(first)
    nodes = [complex(x0, 0.0)] + lower[::-1] + [zc] + upper
    return DeformedPath(x0, tuple(nodes), upper[-1], zc, kind_a)


def _deformed_once(cd, n, t, prec, path, log_floor, rel_tol):
    ctx = make_context(prec)
    z1, z2 = cd.mp_params(ctx)
    t_mp = ctx.mpf(t)
    j = ctx.mpc(0, 1)

    def f(z):
        l1, l2, l3, l4 = ctx.log(z1 - z), ctx.log(z2 - z), ctx.log(z1 + z), ctx.log(z2 + z)
        phi = ctx.log(z) - j * t_mp * (l1 + l2 - l3 - l4)
        return ctx.exp(-n * phi + (l1 + l2 + l3 + l4) / 2) / z

    if path.saddle is not None:
        log_peak = float(ctx.log(abs(f(ctx.mpc(path.saddle)))))
    else:
        # largest |f| on a sample of the line, for the tolerance scale only
        x0 = ctx.mpf(path.x0)
        ys = [ctx.mpf(k) / 8 for k in range(-40, 0)] + [ctx.exp(ctx.mpf(k) / 8) - 1 for k in range(1, 60)]
        log_peak = max(float(ctx.log(abs(f(x0 + j * y)))) for y in ys)
    # without cancellation |I| is within a modest factor of the peak
    if log_floor == -math.inf:
        log_floor = log_peak + math.log(rel_tol / 256)
    tol = ctx.exp(max(log_peak - (prec - GUARD_BITS) * math.log(2), log_floor))

    pan = _Panels(ctx, None)
    total = ctx.mpc(0)
    x0 = ctx.mpf(path.x0)
    # ray x0 - i y, y from inf to 0: int = i int_0^inf f(x0 - i y) dy; y = x0 (e^u - 1)
    def ray_low(u):
        e = ctx.exp(u)
        return f(x0 - j * x0 * (e - 1)) * x0 * e
    # the ray decays like |z|^(1-n); stop where that is below tol
    u_max = _ray_cut(ctx, n, tol, log_peak, abs(x0))
    pan.func = ray_low
    total += j * pan.integrate(_breaks(ctx, ctx.mpf(0), u_max, n * float(t) + n), tol / 4)
    # polyline
    nodes = [ctx.mpc(p) for p in path.nodes]
    freq = n * float(t) + n
    # |f| decreases away from the saddle along the traced path, so a segment
    # whose endpoint bound is negligible is dropped and its bound booked as error
    log_ends = [float(ctx.log(abs(f(p)))) for p in nodes]
    if path.saddle is not None:
        zs = complex(path.saddle)
        gauss = math.sqrt(n * abs(_phizz_c(zs, float(t), float(z1), float(z2)))) + 1.0
    log_skip = float(ctx.log(tol)) - math.log(100 * len(nodes)) - 10
    skipped = ctx.mpf(0)
    for k, (a, b) in enumerate(zip(nodes[:-1], nodes[1:])):
        if a == b:
            continue
        bound = max(log_ends[k], log_ends[k + 1]) + math.log(float(abs(b - a)))
        if path.saddle is not None and bound < log_skip and k not in (0, len(nodes) - 2):
            skipped += ctx.exp(bound + 10)
            continue
        pan.func = lambda s, a=a, b=b: f(a + (b - a) * s) * (b - a)
        if path.saddle is not None:
            # Im phi is nearly constant on the traced path; panels of the Gaussian width
            span = float(abs(b - a)) * 64 * gauss
        else:
            span = float(abs(b - a)) * freq * 4
        total += pan.integrate(_breaks(ctx, ctx.mpf(0), ctx.mpf(1), span), tol / 4 / len(nodes))
    top = nodes[-1]
    h = abs(top)

    def ray_up(u):
        e = ctx.exp(u)
        return f(top + j * h * (e - 1)) * h * e

    u_up = _ray_cut(ctx, n, tol, log_peak, h, up=float(2 * ctx.pi * n * t_mp))
    pan.func = ray_up
    total += j * pan.integrate(_breaks(ctx, ctx.mpf(0), u_up, n * float(t) + n), tol / 4)
    err = pan.error + skipped + tol / 50 + pan.scale * ctx.ldexp(1, -prec + 6)
    return total, ctx.mpf(err), pan.scale, pan.evaluations


def _ray_cut(ctx, n, tol, log_peak, base, up=0.0):
    """``U`` such that the ray beyond ``|z| ~ base e^U`` is below ``tol / 100``.

    On a vertical ray ``|f| <= 4 z2^2-ish |z|^(1-n) e^(+-2 pi n t)``; the
    constant is absorbed by a margin of 20 nats.
    """
    log_tol = float(ctx.log(tol)) - math.log(100) - 20
    del log_peak
    # (n - 2) U + (n - 2) log base >= up - log_tol
    need = (up - log_tol) / (n - 2) - math.log(max(base, 1e-3))
    return ctx.mpf(min(max(need, 1.0), 700.0))


# -- driver -----------------------------------------------------------------------------------


def _validate(cd, n, t):
    if int(n) != n or n < 3:
        raise ValidationError("the loop integral needs an integer n >= 3")
    if t < 0:
        raise ValidationError("t must be nonnegative")


def estimate_cancellation_bits(cd, n, t):
    """Predicted bits lost on the real axis, from the saddle height, for ``0 < t < T``."""
    if not 0 < t < cd.T:
        return None
    z1, z2 = float(cd.z1), float(cd.z2)
    zc = complex(zeta(cd, t, 1, prec=64))
    lead = max(math.pi * t - math.log(z1), 2 * math.pi * t - math.log(z2))
    return max(0.0, n * (lead + _phi_c(zc, t, z1, z2).real) / math.log(2))


def choose_method(cd, n, t, method=AUTO):
    if method not in METHODS:
        raise ValidationError(f"method must be one of {METHODS}")
    if method != AUTO:
        return method
    if t >= cd.T and n > 60:
        return VERTICAL
    bits = estimate_cancellation_bits(cd, n, t)
    if bits is None or bits < 80 or t < 0.02 or cd.T - t < 1e-3:
        return REAL_AXIS
    return DEFORMED


def contour_integral(cd, n, t, precision=None, rel_tol=1e-12, method=AUTO,
                     component=False, escalate=True, max_precision=MAX_PRECISION, abs_tol=0):
    """Loop integral ``I`` of ``exp(-n phi) psi`` around ``[z1, inf)``.

    Starts at ``precision`` bits (``RC_PRECISION`` or 128 by default) and
    doubles, or jumps straight to the bits the measured cancellation calls
    for, until ``est_error <= rel_tol * |I|``.  With ``component=True`` the
    target is measured against the parity component instead, which is what
    reconstructing ``H_n`` needs near its zeros; for odd ``n`` at ``t = 0`` that
    component vanishes identically and the full value is used.  ``abs_tol``
    is an absolute floor on the error target.  ``escalate=False`` turns a
    miss into :class:`ConvergenceError` at the given precision.
    """
    _validate(cd, n, t)
    if component and n % 2 == 1 and t == 0:
        component = False
    prec = check_precision(precision if precision is not None else default_precision())
    method = choose_method(cd, n, t, method)
    n = int(n)
    t = float(t)
    log_floor = -math.inf
    if method == REAL_AXIS:
        log_scale = _real_axis_log_scale(cd, n, t)
        bits = estimate_cancellation_bits(cd, n, t)
        if bits is not None:
            prec = max(prec, int(bits - math.log2(rel_tol)) + GUARD_BITS + 24)
            log_floor = log_scale - bits * math.log(2) + math.log(rel_tol / 64)
        run = lambda p, lf: _real_axis_once(cd, n, t, p, log_scale, lf)  # noqa: E731
    else:
        path = deformed_path(cd, n, t, prec) if method == DEFORMED else vertical_path(cd)
        run = lambda p, lf: _deformed_once(cd, n, t, p, path, lf, rel_tol)  # noqa: E731
    attempts = []
    while True:
        value, err, scale, evals = run(prec, log_floor)
        with mpmath.workprec(prec):
            value, err, scale = mpmath.mpc(value), mpmath.mpf(err), mpmath.mpf(scale)
        res = ContourResult(value, err, n, t, method, prec, scale, evals)
        rel = res.relative_error(component)
        attempts.append((prec, rel))
        if rel <= rel_tol or res.est_error <= abs_tol:
            return ContourResult(
                res.integral, res.est_error, n, t, method, prec, res.scale, evals, tuple(attempts)
            )
        if not escalate or prec >= max_precision:
            raise ConvergenceError(
                f"relative error {rel:.3g} above {rel_tol:.3g} at {prec} bits",
                {"attempts": attempts, "method": method, "est_error": float(res.est_error)},
            )
        mag = abs(res.parity_component()) if component else abs(res.integral)
        new_prec = prec
        new_floor = log_floor
        if mag > 0:
            new_floor = float(mpmath.log(mag)) + math.log(rel_tol / 16)
            lost = float(mpmath.log(res.scale, 2) - mpmath.log(mag, 2))
            new_prec = max(prec, int(lost - math.log2(rel_tol)) + GUARD_BITS + 24)
        if new_prec == prec and not new_floor < log_floor - 1:
            new_prec = 2 * prec
        prec = min(max_precision, new_prec)
        log_floor = new_floor


def hn_from_contour(cd, n, t, **kwargs):
    """``H_n(1/2 + i n t)`` via :func:`contour_integral` with a component-relative target."""
    kwargs.setdefault("component", True)
    res = contour_integral(cd, n, t, **kwargs)
    return res.hn_value(), res
