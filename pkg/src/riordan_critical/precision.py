"""Private multiprecision contexts.

Every numerical routine builds its own :class:`mpmath.MPContext` instead of
touching the global ``mpmath.mp``, so concurrent callers never race on a
shared precision setting.
"""

import os

import mpmath

DEFAULT_PRECISION = 128
MIN_PRECISION = 64
ENV_VAR = "RC_PRECISION"


def default_precision():
    """Working precision in bits, honouring the ``RC_PRECISION`` override."""
    raw = os.environ.get(ENV_VAR)
    if raw is None or raw.strip() == "":
        return DEFAULT_PRECISION
    try:
        bits = int(raw)
    except ValueError as exc:
        from .errors import ValidationError
        raise ValidationError(f"{ENV_VAR} must be an integer, got {raw!r}") from exc
    return check_precision(bits)


def check_precision(bits):
    from .errors import ValidationError
    if bits < MIN_PRECISION:
        raise ValidationError(f"precision must be at least {MIN_PRECISION} bits, got {bits}")
    return int(bits)


def make_context(bits=None):
    ctx = mpmath.MPContext()
    ctx.prec = default_precision() if bits is None else int(bits)
    return ctx


def to_mpf(ctx, x):
    """Convert ints, Fractions and floats to ``ctx.mpf`` without rounding rationals early."""
    num = getattr(x, "numerator", None)
    den = getattr(x, "denominator", None)
    if num is not None and den is not None and not isinstance(x, float):
        return ctx.mpf(num) / den
    return ctx.mpf(x)
