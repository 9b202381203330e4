"""The Sheffer family generated by ``Q(z)^x Q(-z)^(1-x)`` for quadratic ``Q``.

Writing ``Q(z)^x Q(-z)^(1-x) = Q(-z) exp(x ln(Q(z)/Q(-z)))`` shows that the
coefficient matrix of ``H_n`` is the exponential Riordan matrix
``A = [Q(-z), ln(Q(z)/Q(-z))]``: row ``n`` of ``A`` lists the coefficients of
``H_n`` in powers of ``x``.

``Q`` comes in two parametrisations that share one type:

* ``QuadraticQ.ab(a, b)``: ``Q = (1 + a z)(1 + b z)``, used for the
  combinatorial identities (``a, b`` positive integers there);
* ``QuadraticQ.zeros(z1, z2)``: ``Q = (z1 - z)(z2 - z)``, used by the
  analytic side (``0 < z1 < z2``).

They are related by ``a = -1/z1``, ``b = -1/z2`` and an overall factor
``z1 z2``; that relation is checked in the tests rather than used silently.
"""

from dataclasses import dataclass
from fractions import Fraction
from math import comb, factorial

from .combinat import stirling
from .errors import ValidationError
from .riordan import ExpRiordan, build, rmul
from .series import RATIONAL, TruncatedSeries, exp_series


def as_fraction(x):
    """Exact rational from int, Fraction, decimal string, ``p/q`` string or float literal."""
    if isinstance(x, Fraction):
        return x
    if isinstance(x, bool):
        raise ValidationError("booleans are not numbers here")
    if isinstance(x, int):
        return Fraction(x)
    if isinstance(x, float):
        return Fraction(repr(x))
    if isinstance(x, str):
        try:
            return Fraction(x.strip())
        except ValueError as exc:
            raise ValidationError(f"not a rational number: {x!r}") from exc
    if hasattr(x, "numerator") and hasattr(x, "denominator"):
        return Fraction(x.numerator, x.denominator)
    raise ValidationError(f"not a rational number: {x!r}")


@dataclass(frozen=True)
class QuadraticQ:
    """``Q(z) = q0 + q1 z + q2 z^2`` with its parametrisation.

    ``form`` is ``"AB"`` or ``"Z"``; ``params`` holds ``(a, b)`` or ``(z1, z2)``.
    """

    form: str
    params: tuple
    q0: Fraction
    q1: Fraction
    q2: Fraction

    @classmethod
    def ab(cls, a, b):
        a, b = as_fraction(a), as_fraction(b)
        if a + b == 0:
            raise ValidationError("a + b must be nonzero so that Q'(0) != 0")
        return cls("AB", (a, b), Fraction(1), a + b, a * b)

    @classmethod
    def zeros(cls, z1, z2):
        z1, z2 = as_fraction(z1), as_fraction(z2)
        if z1 == 0 or z2 == 0:
            raise ValidationError("Q(0) = z1 z2 must be nonzero")
        if z1 + z2 == 0:
            raise ValidationError("Q'(0) = -(z1 + z2) must be nonzero")
        return cls("Z", (z1, z2), z1 * z2, -(z1 + z2), Fraction(1))

    # validity gates -------------------------------------------------------

    @property
    def a(self):
        self.require_ab()
        return self.params[0]

    @property
    def b(self):
        self.require_ab()
        return self.params[1]

    @property
    def z1(self):
        self.require_z()
        return self.params[0]

    @property
    def z2(self):
        self.require_z()
        return self.params[1]

    def require_ab(self):
        if self.form != "AB":
            raise ValidationError("this operation needs Q in (a, b) form")

    def require_z(self):
        if self.form != "Z":
            raise ValidationError("this operation needs Q in (z1, z2) form")

    def require_combinatorial(self):
        self.require_ab()
        a, b = self.params
        if a.denominator != 1 or b.denominator != 1 or a <= 0 or b <= 0:
            raise ValidationError("combinatorial interpretation needs positive integers a, b")

    def require_analytic(self):
        self.require_z()
        z1, z2 = self.params
        if not 0 < z1 < z2:
            raise ValidationError("analytic operations need 0 < z1 < z2")

    @property
    def is_combinatorial(self):
        try:
            self.require_combinatorial()
        except ValidationError:
            return False
        return True

    def describe(self):
        if self.form == "AB":
            return {"form": "AB", "a": str(self.params[0]), "b": str(self.params[1])}
        return {"form": "Z", "z1": str(self.params[0]), "z2": str(self.params[1])}

    # series -------------------------------------------------------------------

    def series(self, order, sign=1, field=RATIONAL):
        """``Q(sign * z)`` as a truncated series."""
        return TruncatedSeries.from_coeffs([self.q0, sign * self.q1, self.q2], order, field)

    def log_ratio(self, order):
        """``ln(Q(z)/Q(-z))``; the ratio has constant term 1, so this is exact."""
        return (self.series(order) / self.series(order, -1)).log()

    def __call__(self, z):
        return self.q0 + self.q1 * z + self.q2 * z * z


@dataclass(frozen=True)
class PolyInX:
    """Dense polynomial in ``x`` with exact rational coefficients, lowest power first."""

    coeffs: tuple

    @classmethod
    def from_coeffs(cls, coeffs):
        cs = [as_fraction(c) for c in coeffs]
        while cs and cs[-1] == 0:
            cs.pop()
        return cls(tuple(cs))

    @property
    def degree(self):
        return len(self.coeffs) - 1  # -1 for the zero polynomial

    def is_zero(self):
        return not self.coeffs

    def __getitem__(self, k):
        return self.coeffs[k] if 0 <= k < len(self.coeffs) else Fraction(0)

    def __call__(self, x):
        acc = Fraction(0) if isinstance(x, (int, Fraction)) else 0
        for c in reversed(self.coeffs):
            acc = acc * x + c
        return acc

    def __add__(self, other):
        n = max(len(self.coeffs), len(other.coeffs))
        return PolyInX.from_coeffs([self[k] + other[k] for k in range(n)])

    def __sub__(self, other):
        n = max(len(self.coeffs), len(other.coeffs))
        return PolyInX.from_coeffs([self[k] - other[k] for k in range(n)])

    def __mul__(self, other):
        if not isinstance(other, PolyInX):
            return PolyInX.from_coeffs([c * other for c in self.coeffs])
        if self.is_zero() or other.is_zero():
            return PolyInX(())
        out = [Fraction(0)] * (len(self.coeffs) + len(other.coeffs) - 1)
        for i, a in enumerate(self.coeffs):
            for j, b in enumerate(other.coeffs):
                out[i + j] += a * b
        return PolyInX.from_coeffs(out)

    __rmul__ = __mul__

    def reflect(self):
        """``p(1 - x)``, by binomial expansion."""
        out = [Fraction(0)] * len(self.coeffs)
        for j, c in enumerate(self.coeffs):
            if c == 0:
                continue
            for k in range(j + 1):
                out[k] += c * comb(j, k) * (-1) ** k
        return PolyInX.from_coeffs(out)

    def norm(self):
        return max((abs(c) for c in self.coeffs), default=Fraction(0))

    def to_mp(self, ctx):
        return [ctx.mpf(c.numerator) / c.denominator for c in self.coeffs]

    def eval_mp(self, ctx, x):
        acc = ctx.mpc(0)
        for c in reversed(self.coeffs):
            acc = acc * x + ctx.mpf(c.numerator) / c.denominator
        return acc


def falling_factorial_poly(k):
    """``(x)_k = x (x-1) ... (x-k+1)`` in the power basis."""
    return PolyInX.from_coeffs(
        [(-1) ** ((k + j) % 2) * stirling(k, j, "first_unsigned") for j in range(k + 1)]
    )


# -- coefficient matrices -------------------------------------------------------


def coefficient_matrix(q, nmax):
    """``A = [Q(-z), ln(Q(z)/Q(-z))]``; row ``n`` holds the coefficients of ``H_n``."""
    if nmax < 0:
        raise ValidationError("nmax must be nonnegative")
    order = max(nmax, 1)
    a = build(q.series(order, -1), q.log_ratio(order), order)
    if nmax == 0:
        return ExpRiordan(a.g, a.f, a.entries[:1])
    return a


def hn(q, n):
    """``H_n`` as a polynomial in ``x``."""
    return PolyInX.from_coeffs(coefficient_matrix(q, n).row(n))


def hn_list(q, nmax):
    a = coefficient_matrix(q, nmax)
    return [PolyInX.from_coeffs(a.row(n)) for n in range(nmax + 1)]


def a_hat_matrix(q, nmax):
    """``[Q(z), ln(Q(z)/Q(-z))]``."""
    q.require_ab()
    order = max(nmax, 1)
    return build(q.series(order), q.log_ratio(order), order)


def lq_decomposition(q, nmax):
    """``(L_Q, D)`` with ``[Q(z), ln(Q/Q(-z))] = L_Q D`` and ``D = [1, 2(a+b) z]``."""
    q.require_ab()
    order = max(nmax, 1)
    s2 = 2 * (q.a + q.b)
    lq = build(q.series(order), q.log_ratio(order) / s2, order)
    d = build(TruncatedSeries.one(order), TruncatedSeries.variable(order).scale(s2), order)
    return lq, d


@dataclass(frozen=True)
class RelationWitness:
    n: int
    k: int
    lhs: Fraction
    rhs: Fraction

    @property
    def holds(self):
        return self.lhs == self.rhs

    def __bool__(self):
        return self.holds


def coeff_relation_check(q, n, k, lq=None):
    """Compare ``[x^k] H_n`` with ``(-1)^(n+k) (2a+2b)^k q[n][k]``."""
    q.require_ab()
    if not 0 <= k <= n:
        raise ValidationError("need 0 <= k <= n")
    if lq is None or lq.size < n:
        lq = lq_decomposition(q, n)[0]
    lhs = hn(q, n)[k]
    rhs = (-1) ** ((n + k) % 2) * (2 * (q.a + q.b)) ** k * lq.entry(n, k)
    return RelationWitness(n, k, lhs, rhs)


def stirling2_matrix(nmax):
    """``[1, e^z - 1]``: entries are Stirling numbers of the second kind."""
    order = max(nmax, 1)
    return build(TruncatedSeries.one(order), exp_series(order) - 1, order)


def stirling1_matrix(nmax):
    """``[1, ln(1+z)]``: signed Stirling numbers of the first kind."""
    order = max(nmax, 1)
    one_plus_z = TruncatedSeries.from_coeffs([1, 1], order)
    return build(TruncatedSeries.one(order), one_plus_z.log(), order)


def c_matrix(q, nmax):
    """``C = [Q(-z), Q(z)/Q(-z) - 1]``, the falling-factorial coefficient matrix."""
    order = max(nmax, 1)
    qm = q.series(order, -1)
    return build(qm, q.series(order) / qm - 1, order)


def c_matrix_via_product(q, nmax):
    return rmul(coefficient_matrix(q, max(nmax, 1)), stirling2_matrix(nmax))


def falling_factorial_coeffs(q, n):
    """``c[n][0..n]`` with ``H_n(x) = sum_k c[n][k] (x)_k``."""
    return c_matrix(q, n).row(n)


def from_falling(coeffs):
    out = PolyInX(())
    for k, c in enumerate(coeffs):
        if c:
            out = out + falling_factorial_poly(k) * c
    return out


def c_recurrence(q, nmax):
    """Entries of ``C`` from the three-term recurrence in ``n``.

    ``c[n][k] = 2(a+b) c[n-1][k-1] + (n+k-2)(a+b) c[n-1][k] - (n-1)(n+2k-4) ab c[n-2][k]``
    for ``k >= 1``, with ``c[n][0] = 0`` for ``n >= 3``.
    """
    q.require_ab()
    s, p = q.a + q.b, q.a * q.b
    rows = []

    def at(n, k):
        if n < 0 or k < 0 or k > n:
            return Fraction(0)
        return rows[n][k]

    for n in range(nmax + 1):
        row = []
        for k in range(n + 1):
            if n == 0:
                v = Fraction(1)
            elif n == 1:
                v = -s if k == 0 else 2 * s
            elif k == 0:
                v = 2 * p if n == 2 else Fraction(0)
            else:
                v = (
                    2 * s * at(n - 1, k - 1)
                    + (n + k - 2) * s * at(n - 1, k)
                    - (n - 1) * (n + 2 * k - 4) * p * at(n - 2, k)
                )
            row.append(v)
        rows.append(tuple(row))
    return tuple(rows)


def hn_from_sigma(q, n, sigma=None):
    """``[x^k] H_n = sum_i (-1)^(i+k) sigma(n, i) s(i, k)`` with unsigned ``s``."""
    from .combinat import lattice_sigma

    q.require_ab()
    if sigma is None:
        sigma = lattice_sigma(q.a, q.b, n)
    coeffs = []
    for k in range(n + 1):
        total = Fraction(0)
        for i in range(k, n + 1):
            total += (-1) ** ((i + k) % 2) * sigma[n, i] * stirling(i, k, "first_unsigned")
        coeffs.append(total)
    return PolyInX.from_coeffs(coeffs)


def leading_coefficient(q, n):
    """Predicted ``[x^n] H_n``: ``Q(0) (ln(Q/Q(-z)))'(0)^n``."""
    return q.q0 * (2 * q.q1 / q.q0) ** n


def expected_trivial_zeros(n):
    """Zeros forced by the structure of ``Q``: 0 and 1 once ``n > 2``, and 1/2 for odd ``n``."""
    out = []
    if n > 2:
        out += [Fraction(0), Fraction(1)]
    if n % 2 == 1:
        out.append(Fraction(1, 2))
    return sorted(out)


def binomial_pascal(size):
    """``[e^z, z]`` (test helper for the Riordan machinery)."""
    return build(exp_series(size), TruncatedSeries.variable(size), size)

