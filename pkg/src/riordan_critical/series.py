"""Truncated formal power series over exact rationals or multiprecision complex numbers.

A :class:`TruncatedSeries` of order ``N`` stores ``c_0, ..., c_N`` and all
arithmetic is carried out modulo ``z^(N+1)``.  Two coefficient fields are
supported:

* :data:`RATIONAL` -- :class:`fractions.Fraction` coefficients, exact.
* :class:`ComplexField` -- ``mpmath`` complex numbers at a fixed precision.

Values are immutable; every operation returns a new series.
"""

from dataclasses import dataclass, field
from fractions import Fraction
from math import factorial

from .errors import SeriesError
from .precision import DEFAULT_PRECISION, make_context, to_mpf


class RationalField:
    """Exact rational coefficients."""

    name = "rational"
    exact = True

    def __repr__(self):
        return "RATIONAL"

    def __eq__(self, other):
        return isinstance(other, RationalField)

    def __hash__(self):
        return hash("rational")

    def coerce(self, x):
        if isinstance(x, Fraction):
            return x
        if isinstance(x, int):
            return Fraction(x)
        if isinstance(x, float):
            # floats are accepted only when they are exactly representable
            # small rationals the caller typed as literals, e.g. 0.5
            return Fraction(x)
        if hasattr(x, "numerator") and hasattr(x, "denominator"):
            return Fraction(x.numerator, x.denominator)
        raise SeriesError(f"cannot use {type(x).__name__} as a rational coefficient")

    @property
    def zero(self):
        return Fraction(0)

    @property
    def one(self):
        return Fraction(1)

    def exp_of_constant(self, c):
        if c != 0:
            raise SeriesError("exp of a series with nonzero constant term is not rational")
        return Fraction(1)

    def log_of_constant(self, c):
        if c != 1:
            raise SeriesError("log of a series with constant term other than 1 is not rational")
        return Fraction(0)


RATIONAL = RationalField()


class ComplexField:
    """Complex coefficients at ``prec`` bits, backed by a private mpmath context."""

    exact = False

    def __init__(self, prec=DEFAULT_PRECISION):
        self.prec = int(prec)
        self.ctx = make_context(self.prec)
        self.name = f"complex{self.prec}"

    def __repr__(self):
        return f"ComplexField({self.prec})"

    def __eq__(self, other):
        return isinstance(other, ComplexField) and other.prec == self.prec

    def __hash__(self):
        return hash(("complex", self.prec))

    def coerce(self, x):
        ctx = self.ctx
        if isinstance(x, (Fraction, int)):
            return ctx.mpc(to_mpf(ctx, x))
        return ctx.mpc(x)

    @property
    def zero(self):
        return self.ctx.mpc(0)

    @property
    def one(self):
        return self.ctx.mpc(1)

    def exp_of_constant(self, c):
        return self.ctx.exp(c)

    def log_of_constant(self, c):
        return self.ctx.log(c)


@dataclass(frozen=True)
class TruncatedSeries:
    """Power series ``sum c_k z^k`` known modulo ``z^(order+1)``.

    Parameters
    ----------
    coeffs : tuple
        Exactly ``order + 1`` coefficients in the series' field.
    order : int
        Truncation degree ``N``.
    field : RationalField or ComplexField
        Coefficient field.
    """

    coeffs: tuple
    order: int
    field: object = field(default=RATIONAL)

    def __post_init__(self):
        if self.order < 0:
            raise SeriesError("order must be nonnegative")
        if len(self.coeffs) != self.order + 1:
            raise SeriesError(f"expected {self.order + 1} coefficients, got {len(self.coeffs)}")

    # construction -------------------------------------------------------

    @classmethod
    def from_coeffs(cls, coeffs, order, field=RATIONAL):
        """Build from any iterable, padding with zeros or truncating to ``order``."""
        cs = [field.coerce(c) for c in list(coeffs)[: order + 1]]
        cs.extend([field.zero] * (order + 1 - len(cs)))
        return cls(tuple(cs), order, field)

    @classmethod
    def zero(cls, order, field=RATIONAL):
        return cls.from_coeffs([], order, field)

    @classmethod
    def one(cls, order, field=RATIONAL):
        return cls.from_coeffs([1], order, field)

    @classmethod
    def variable(cls, order, field=RATIONAL):
        """The series ``z``."""
        return cls.from_coeffs([0, 1], order, field)

    @classmethod
    def from_egf(cls, values, order, field=RATIONAL):
        """Series whose ``n``-th coefficient is ``values[n] / n!``."""
        return cls.from_coeffs(
            [field.coerce(v) / factorial(k) for k, v in enumerate(list(values)[: order + 1])],
            order,
            field,
        )

    # access ---------------------------------------------------------------

    def __getitem__(self, n):
        if 0 <= n <= self.order:
            return self.coeffs[n]
        if n < 0:
            return self.field.zero
        raise SeriesError(f"coefficient {n} is beyond the truncation order {self.order}")

    def egf(self, n):
        """``n! [z^n]`` of the series."""
        return self[n] * factorial(n)

    def egf_coeffs(self):
        return [self.egf(n) for n in range(self.order + 1)]

    def valuation(self):
        for k, c in enumerate(self.coeffs):
            if c != 0:
                return k
        return None

    def truncate(self, order):
        if order > self.order:
            raise SeriesError(f"cannot extend a series of order {self.order} to {order}")
        return TruncatedSeries(self.coeffs[: order + 1], order, self.field)

    def to_field(self, field):
        if field == self.field:
            return self
        if not self.field.exact:
            raise SeriesError("only exact series can be converted to another field")
        return TruncatedSeries.from_coeffs(self.coeffs, self.order, field)

    # arithmetic -----------------------------------------------------------

    def _check(self, other):
        if not isinstance(other, TruncatedSeries):
            return TruncatedSeries.from_coeffs([other], self.order, self.field)
        if other.field != self.field:
            raise SeriesError(f"field mismatch: {self.field!r} vs {other.field!r}")
        if other.order != self.order:
            raise SeriesError(f"order mismatch: {self.order} vs {other.order}")
        return other

    def _new(self, cs):
        return TruncatedSeries(tuple(cs), self.order, self.field)

    def __neg__(self):
        return self._new(-c for c in self.coeffs)

    def __add__(self, other):
        other = self._check(other)
        return self._new(a + b for a, b in zip(self.coeffs, other.coeffs))

    __radd__ = __add__

    def __sub__(self, other):
        other = self._check(other)
        return self._new(a - b for a, b in zip(self.coeffs, other.coeffs))

    def __rsub__(self, other):
        return self._check(other) - self

    def scale(self, c):
        c = self.field.coerce(c)
        return self._new(c * a for a in self.coeffs)

    def __mul__(self, other):
        if not isinstance(other, TruncatedSeries):
            return self.scale(other)
        other = self._check(other)
        a, b, n = self.coeffs, other.coeffs, self.order
        out = [self.field.zero] * (n + 1)
        for i, ai in enumerate(a):
            if ai == 0:
                continue
            for j in range(n + 1 - i):
                out[i + j] += ai * b[j]
        return self._new(out)

    def __rmul__(self, other):
        return self.scale(other)

    def reciprocal(self):
        a = self.coeffs
        if a[0] == 0:
            raise SeriesError("division by a series with zero constant term")
        inv0 = self.field.one / a[0]
        out = [inv0]
        for n in range(1, self.order + 1):
            s = self.field.zero
            for k in range(1, n + 1):
                if a[k] != 0:
                    s += a[k] * out[n - k]
            out.append(-s * inv0)
        return self._new(out)

    def __truediv__(self, other):
        if not isinstance(other, TruncatedSeries):
            c = self.field.coerce(other)
            if c == 0:
                raise SeriesError("division by zero scalar")
            return self.scale(self.field.one / c)
        other = self._check(other)
        return self * other.reciprocal()

    def __rtruediv__(self, other):
        return self._check(other) * self.reciprocal()

    def __pow__(self, k):
        if not isinstance(k, int) or k < 0:
            raise SeriesError("only nonnegative integer powers are supported")
        result = TruncatedSeries.one(self.order, self.field)
        base = self
        while k:
            if k & 1:
                result = result * base
            base = base * base
            k >>= 1
        return result

    # calculus -------------------------------------------------------------

    def derivative(self):
        """Formal derivative; the result is known only to order ``N - 1``."""
        if self.order == 0:
            raise SeriesError("derivative of an order-0 series carries no information")
        cs = [k * self.coeffs[k] for k in range(1, self.order + 1)]
        return TruncatedSeries(tuple(cs), self.order - 1, self.field)

    def integral(self):
        """Antiderivative with zero constant term, one order higher."""
        cs = [self.field.zero] + [c / (k + 1) for k, c in enumerate(self.coeffs)]
        return TruncatedSeries(tuple(cs), self.order + 1, self.field)

    def exp(self):
        a = self.coeffs
        out = [self.field.exp_of_constant(a[0])]
        for n in range(1, self.order + 1):
            s = self.field.zero
            for k in range(1, n + 1):
                if a[k] != 0:
                    s += k * a[k] * out[n - k]
            out.append(s / n)
        return self._new(out)

    def log(self):
        if self.coeffs[0] == 0:
            raise SeriesError("log of a series with zero constant term")
        c0 = self.field.log_of_constant(self.coeffs[0])
        if self.order == 0:
            return self._new([c0])
        q = self.derivative() / self.truncate(self.order - 1)
        body = q.integral()
        return self._new([c0] + list(body.coeffs[1:]))

    # composition ----------------------------------------------------------

    def compose(self, inner):
        """``self(inner(z))``; requires ``inner(0) = 0``."""
        inner = self._check(inner)
        if inner.coeffs[0] != 0:
            raise SeriesError("composition needs an inner series with zero constant term")
        out = TruncatedSeries.zero(self.order, self.field)
        for c in reversed(self.coeffs):
            out = out * inner + c
        return out

    def __call__(self, inner):
        return self.compose(inner)

    def reverse(self):
        """Compositional inverse by Newton iteration on ``f(g(z)) = z``.

        Each step doubles the number of correct leading coefficients, so
        ``ceil(log2(N))`` passes suffice.
        """
        a = self.coeffs
        if a[0] != 0:
            raise SeriesError("reversion needs zero constant term")
        if self.order == 0:
            return self
        if a[1] == 0:
            raise SeriesError("reversion needs a nonzero linear coefficient")
        n = self.order
        g = TruncatedSeries.from_coeffs([0, self.field.one / a[1]], min(1, n), self.field)
        correct = 1
        while correct < n:
            correct = min(2 * correct, n)
            g = g._pad(correct)
            f = self.truncate(correct)
            fp = TruncatedSeries.from_coeffs(
                [k * a[k] for k in range(1, correct + 2) if k <= n], correct, self.field
            )
            residual = f.compose(g) - TruncatedSeries.variable(correct, self.field)
            g = g - residual / fp.compose(g)
        return g._pad(n)

    def _pad(self, order):
        cs = list(self.coeffs[: order + 1])
        cs.extend([self.field.zero] * (order + 1 - len(cs)))
        return TruncatedSeries(tuple(cs), order, self.field)

    # comparison -----------------------------------------------------------

    def max_abs_diff(self, other):
        other = self._check(other)
        return max(abs(a - b) for a, b in zip(self.coeffs, other.coeffs))

    def __repr__(self):
        terms = ", ".join(str(c) for c in self.coeffs)
        return f"TruncatedSeries([{terms}], order={self.order}, field={self.field!r})"


def series_arith(lhs, rhs, kind):
    """Dispatch ``add``, ``sub``, ``mul`` or ``div`` on two series."""
    ops = {
        "add": lambda a, b: a + b,
        "sub": lambda a, b: a - b,
        "mul": lambda a, b: a * b,
        "div": lambda a, b: a / b,
    }
    if kind not in ops:
        raise SeriesError(f"unknown arithmetic kind {kind!r}")
    if not isinstance(rhs, TruncatedSeries) or not isinstance(lhs, TruncatedSeries):
        raise SeriesError("series_arith needs two series")
    return ops[kind](lhs, rhs)


def series_explog(s, kind):
    if kind == "exp":
        return s.exp()
    if kind == "log":
        return s.log()
    raise SeriesError(f"unknown kind {kind!r}")


def series_compose(outer, inner):
    return outer.compose(inner)


def series_reverse(f):
    return f.reverse()


def exp_series(order, field=RATIONAL, scale=1):
    """``exp(scale * z)`` to the given order."""
    c = field.coerce(scale)
    return TruncatedSeries.from_coeffs(
        [c ** k / factorial(k) for k in range(order + 1)], order, field
    )


def polynomial(coeffs, order, field=RATIONAL):
    return TruncatedSeries.from_coeffs(coeffs, order, field)
