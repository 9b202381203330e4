"""Complex log-gamma by the Stirling series with upward argument shifting."""

import math

from ..errors import DomainError
from ..precision import make_context


def _bernoulli_terms(ctx, count):
    # B_{2k} / (2k (2k-1)) for k = 1..count
    return [ctx.bernoulli(2 * k) / (2 * k * (2 * k - 1)) for k in range(1, count + 1)]


def log_gamma(z, ctx=None, prec=None):
    """Principal branch of ``log Gamma(z)``, analytic off ``(-inf, 0]``.

    The argument is shifted to ``z + m`` with ``|z + m|`` large enough that
    the Stirling series reaches working precision, then the recurrence
    ``log Gamma(z) = log Gamma(z + m) - sum_k log(z + k)`` brings it back.
    """
    ctx = ctx if ctx is not None else make_context(prec)
    z = ctx.mpc(z)
    x, y = ctx.re(z), ctx.im(z)
    if y == 0 and x <= 0 and x == ctx.floor(x):
        raise DomainError(f"Gamma has a pole at {ctx.nstr(x, 10)}")
    if x <= 0:
        raise DomainError("log_gamma needs Re z > 0")
    bits = ctx.prec
    # smallest term of the series is about exp(-2 pi |z|)
    radius = bits * math.log(2) / (2 * math.pi) + 2
    shift = 0
    while abs(z + shift) < radius:
        shift += 1
    w = z + shift
    terms = max(2, int(bits * math.log(2) / 2) + 2)
    coeffs = _bernoulli_terms(ctx, terms)
    inv = 1 / w
    inv_sq = inv * inv
    series = ctx.mpc(0)
    power = inv
    tol = ctx.ldexp(1, -bits - 4)
    for c in coeffs:
        term = c * power
        series += term
        if abs(term) < tol:
            break
        power *= inv_sq
    out = (w - ctx.mpf(0.5)) * ctx.log(w) - w + ctx.log(2 * ctx.pi) / 2 + series
    # log of the product, accumulated term by term keeps the analytic branch
    for k in range(shift):
        out -= ctx.log(z + k)
    return out
