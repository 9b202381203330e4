"""Exponential Riordan matrices and their production matrices.

An exponential Riordan matrix ``[g, f]`` has entries
``b[n][k] = n!/k! * [z^n] g(z) f(z)^k``.  The group law is
``[g, f][h, l] = [g * h(f), l(f)]`` with identity ``[1, z]``.

The production (Stieltjes) matrix ``P`` of ``A`` satisfies ``A P = U A``
where ``U`` is the upper shift.  It is assembled from the horizontal pair
``c = (g'/g) o fbar`` and ``r = f' o fbar``::

    p[i][j] = i!/j! * (c[i-j] + j * r[i-j+1]),      c[-1] = 0.

Everything here is exact; float matrices are deliberately unsupported.
"""

from dataclasses import dataclass
from fractions import Fraction
from math import factorial

from .errors import RiordanError
from .series import RATIONAL, TruncatedSeries


def _zero_matrix(rows, cols):
    return [[Fraction(0)] * cols for _ in range(rows)]


def matmul(a, b):
    """Dense product of two rectangular lists of lists."""
    inner = len(b)
    cols = len(b[0]) if b else 0
    out = _zero_matrix(len(a), cols)
    for i, row in enumerate(a):
        oi = out[i]
        for m in range(min(len(row), inner)):
            x = row[m]
            if x == 0:
                continue
            bm = b[m]
            for j in range(cols):
                if bm[j] != 0:
                    oi[j] += x * bm[j]
    return out


def lower_inverse(a):
    """Inverse of a square lower-triangular matrix by forward substitution."""
    n = len(a)
    inv = _zero_matrix(n, n)
    for j in range(n):
        if a[j][j] == 0:
            raise RiordanError("singular triangular matrix")
        inv[j][j] = Fraction(1) / a[j][j]
        for i in range(j + 1, n):
            s = sum((a[i][m] * inv[m][j] for m in range(j, i)), Fraction(0))
            inv[i][j] = -s / a[i][i]
    return inv


@dataclass(frozen=True)
class ExpRiordan:
    """Materialised exponential Riordan matrix ``[g, f]`` up to row ``size``.

    ``entries[n]`` holds ``b[n][0..n]``.
    """

    g: TruncatedSeries
    f: TruncatedSeries
    entries: tuple

    @property
    def size(self):
        return len(self.entries) - 1

    def entry(self, n, k):
        if k < 0 or k > n:
            return Fraction(0)
        return self.entries[n][k]

    def row(self, n):
        return list(self.entries[n])

    def as_matrix(self):
        n = self.size + 1
        return [[self.entry(i, j) for j in range(n)] for i in range(n)]

    def __eq__(self, other):
        return isinstance(other, ExpRiordan) and self.entries == other.entries

    def __hash__(self):
        return hash(self.entries)

    def __matmul__(self, other):
        return rmul(self, other)


def _check_pair(g, f):
    if g.field != RATIONAL or f.field != RATIONAL:
        raise RiordanError("Riordan matrices require the exact rational backend")
    if g[0] == 0:
        raise RiordanError("g(0) must be nonzero")
    if f[0] != 0:
        raise RiordanError("f(0) must be zero")
    if f.order < 1 or f[1] == 0:
        raise RiordanError("f'(0) must be nonzero")


def build(g, f, size=None):
    """Materialise ``[g, f]`` up to row ``size`` (default: the smaller series order)."""
    _check_pair(g, f)
    if size is None:
        size = min(g.order, f.order)
    if size > g.order or size > f.order:
        raise RiordanError(f"series orders ({g.order}, {f.order}) too small for size {size}")
    g = g.truncate(size)
    f = f.truncate(size)
    rows = [[] for _ in range(size + 1)]
    column = g  # g * f^k
    for k in range(size + 1):
        kf = factorial(k)
        for n in range(k, size + 1):
            rows[n].append(column[n] * factorial(n) / kf)
        column = column * f
    return ExpRiordan(g, f, tuple(tuple(r) for r in rows))


def identity(size):
    return build(TruncatedSeries.one(size), TruncatedSeries.variable(size), size)


def rmul(a, b):
    """Group product ``[g, f][h, l] = [g * h(f), l(f)]``."""
    if a.size != b.size:
        raise RiordanError(f"size mismatch: {a.size} vs {b.size}")
    g, f, h, l = a.g, a.f, b.g, b.f
    return build(g * h.compose(f), l.compose(f), a.size)


def rinv(a):
    """Group inverse ``[1/g(fbar), fbar]``."""
    fbar = a.f.reverse()
    return build(a.g.compose(fbar).reciprocal(), fbar, a.size)


@dataclass(frozen=True)
class ProductionMatrix:
    """Hessenberg production matrix with its generating horizontal pair.

    ``entries[i]`` holds ``p[i][0..min(i+1, N)]`` for ``i = 0..N-1``.
    ``c_seq`` and ``r_seq`` are the ordinary coefficients of ``c(z)`` and ``r(z)``.
    """

    entries: tuple
    c_seq: tuple
    r_seq: tuple

    @property
    def rows(self):
        return len(self.entries)

    def entry(self, i, j):
        if i < 0 or i >= len(self.entries) or j < 0 or j >= len(self.entries[i]):
            return Fraction(0)
        return self.entries[i][j]

    def as_matrix(self, rows=None, cols=None):
        rows = self.rows if rows is None else rows
        cols = rows + 1 if cols is None else cols
        return [[self.entry(i, j) for j in range(cols)] for i in range(rows)]

    def is_integral(self):
        return all(x.denominator == 1 for row in self.entries for x in row)


def production_entries(c_seq, r_seq, rows, max_col):
    """Assemble ``p[i][j] = i!/j! (c[i-j] + j r[i-j+1])`` for ``i < rows``, ``j <= max_col``."""

    def c_at(k):
        return c_seq[k] if 0 <= k < len(c_seq) else Fraction(0)

    def r_at(k):
        return r_seq[k] if 0 <= k < len(r_seq) else Fraction(0)

    out = []
    for i in range(rows):
        row = []
        for j in range(min(i + 1, max_col) + 1):
            term = c_at(i - j) + j * r_at(i - j + 1)
            row.append(Fraction(factorial(i), factorial(j)) * term)
        out.append(tuple(row))
    return tuple(out)


def horizontal_pair(a):
    """Production matrix of ``a`` via the horizontal pair ``(c, r)``.

    Both series are known to order ``N - 1``, which fixes rows ``0..N-1``.
    """
    if a.size < 1:
        raise RiordanError("need at least two rows to form a production matrix")
    n = a.size
    fbar = a.f.reverse().truncate(n - 1)
    g = a.g
    c = (g.derivative() / g.truncate(n - 1)).compose(fbar)
    r = a.f.derivative().compose(fbar)
    entries = production_entries(c.coeffs, r.coeffs, n, n)
    return ProductionMatrix(entries, c.coeffs, r.coeffs)


def production_by_linear_algebra(a):
    """``P = A^{-1} U A`` restricted to the rows it determines exactly."""
    m = a.as_matrix()
    n = a.size
    shifted = [m[i + 1] for i in range(n)] + [[Fraction(0)] * (n + 1)]
    full = matmul(lower_inverse(m), shifted)
    return tuple(tuple(full[i][: min(i + 1, n) + 1]) for i in range(n))


def stieltjes_residual(a, p):
    """Largest ``|(A P - U A)[n][k]|`` over the rows where both sides are defined."""
    worst = Fraction(0)
    for n in range(a.size):
        for k in range(n + 2):
            lhs = sum((a.entry(n, i) * p.entry(i, k) for i in range(n + 1)), Fraction(0))
            worst = max(worst, abs(lhs - a.entry(n + 1, k)))
    return worst


def row_recurrence(a, p):
    """Regenerate rows ``1..N`` from row 0 by ``a[n+1][k] = sum_i a[n][i] p[i][k]``."""
    if p.rows < a.size:
        raise RiordanError(f"production matrix has {p.rows} rows, need {a.size}")
    rows = [(a.entry(0, 0),)]
    for n in range(a.size):
        prev = rows[-1]
        nxt = []
        for k in range(n + 2):
            s = Fraction(0)
            for i in range(max(k - 1, 0), n + 1):
                s += prev[i] * p.entry(i, k)
            nxt.append(s)
        rows.append(tuple(nxt))
    return ExpRiordan(a.g, a.f, tuple(rows))


def conjugate_ordinary(a):
    """Ordinary-Riordan conjugate ``a[n][k] = k!/n! * b[n][k]``."""
    return tuple(
        tuple(Fraction(factorial(k), factorial(n)) * x for k, x in enumerate(row))
        for n, row in enumerate(a.entries)
    )


def from_ordinary(table):
    """Inverse of :func:`conjugate_ordinary` on entry tables."""
    return tuple(
        tuple(Fraction(factorial(n), factorial(k)) * x for k, x in enumerate(row))
        for n, row in enumerate(table)
    )
