"""Stirling numbers, the marked generating tree, and weighted Motzkin-type paths.

Stirling convention: ``stirling(n, k, "first_unsigned")`` counts permutations
of ``n`` elements with ``k`` cycles; signs enter only through explicit
``(-1)^(i+k)`` factors, so that ``(x)_n = sum_k (-1)^(n+k) s(n,k) x^k``.

The generating tree starts from a root labelled ``0``.  A node labelled ``k``
has ``|p[k][j]|`` children labelled ``j`` for each ``j``; the children are
marked when ``p[k][j] < 0``.  A marked parent flips this rule, so a negative
entry under a marked parent produces unmarked children.  After annihilating
equal labels, level ``n`` carries ``q[n][k]``, the entries of the matrix whose
production matrix was used.
"""

from collections import Counter
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache

from .errors import ValidationError


@lru_cache(maxsize=None)
def _stirling2(n, k):
    if n == k:
        return 1
    if k == 0 or k > n:
        return 0
    return k * _stirling2(n - 1, k) + _stirling2(n - 1, k - 1)


@lru_cache(maxsize=None)
def _stirling1u(n, k):
    if n == k:
        return 1
    if k == 0 or k > n:
        return 0
    return (n - 1) * _stirling1u(n - 1, k) + _stirling1u(n - 1, k - 1)


def stirling(n, k, kind="second"):
    """Stirling numbers; ``k > n`` yields 0.

    ``kind`` is one of ``second``, ``first_unsigned`` or ``first_signed``.
    """
    if n < 0 or k < 0:
        raise ValidationError("Stirling numbers need n, k >= 0")
    if kind == "second":
        return _stirling2(n, k)
    if kind == "first_unsigned":
        return _stirling1u(n, k)
    if kind == "first_signed":
        return (-1) ** ((n + k) % 2) * _stirling1u(n, k)
    raise ValidationError(f"unknown Stirling kind {kind!r}")


def stirling_table(nmax, kind="second"):
    return [[Fraction(stirling(n, k, kind)) for k in range(n + 1)] for n in range(nmax + 1)]


# -- generating tree -----------------------------------------------------------


@dataclass
class MarkedLevel:
    """Node census of one tree level before annihilation."""

    level: int
    unmarked: dict = field(default_factory=dict)
    marked: dict = field(default_factory=dict)

    def net(self, k):
        return self.unmarked.get(k, 0) - self.marked.get(k, 0)

    def net_row(self):
        return [self.net(k) for k in range(self.level + 1)]

    def total_nodes(self):
        return sum(self.unmarked.values()) + sum(self.marked.values())


def _integer_production(p):
    rules = {}
    for i in range(p.rows):
        row = []
        for j, x in enumerate(p.entries[i]):
            if Fraction(x).denominator != 1:
                raise ValidationError(f"production entry p[{i}][{j}] = {x} is not an integer")
            if x != 0:
                row.append((j, int(x)))
        rules[i] = row
    return rules


def _children(rules, label, marked):
    if label not in rules:
        raise ValidationError(f"production matrix has no rule for label {label}")
    for j, count in rules[label]:
        yield j, marked ^ (count < 0), abs(count)


def tree_levels(p, depth):
    """Per-level node counts of the marked generating tree, no annihilation.

    Nodes are expanded individually for ``depth <= 8``; the census is kept
    as a multiset of ``(label, marked)`` so equal siblings share one entry
    with a multiplicity.
    """
    if depth < 0:
        raise ValidationError("depth must be nonnegative")
    if depth > 8:
        raise ValidationError("explicit tree expansion is capped at depth 8; use vector_recurrence")
    rules = _integer_production(p)
    levels = [MarkedLevel(0, {0: 1}, {})]
    current = Counter({(0, False): 1})
    for n in range(1, depth + 1):
        nxt = Counter()
        for (label, marked), mult in current.items():
            for j, child_marked, count in _children(rules, label, marked):
                nxt[(j, child_marked)] += mult * count
        current = nxt
        level = MarkedLevel(n)
        for (label, marked), mult in sorted(current.items()):
            target = level.marked if marked else level.unmarked
            target[label] = target.get(label, 0) + mult
        levels.append(level)
    return levels


def iter_tree_nodes(p, depth):
    """Yield every node ``(level, label, marked)`` of the tree one at a time.

    Exponential in ``depth``; meant for cross-checking :func:`tree_levels`
    on shallow trees.
    """
    rules = _integer_production(p)
    stack = [(0, 0, False)]
    while stack:
        level, label, marked = stack.pop()
        yield level, label, marked
        if level == depth:
            continue
        for j, child_marked, count in _children(rules, label, marked):
            for _ in range(count):
                stack.append((level + 1, j, child_marked))


def vector_recurrence(p, depth):
    """Signed level vectors ``R_n = R_{n-1} P`` starting from ``R_0 = e_0``."""
    if depth > p.rows:
        raise ValidationError(f"production matrix has {p.rows} rows, depth {depth} requested")
    vec = [Fraction(1)]
    out = [list(vec)]
    for n in range(depth):
        nxt = [Fraction(0)] * (n + 2)
        for i, x in enumerate(vec):
            if x == 0:
                continue
            for j in range(n + 2):
                pij = p.entry(i, j)
                if pij:
                    nxt[j] += x * pij
        vec = nxt
        out.append(list(vec))
    return out


# -- lattice paths --------------------------------------------------------------


@dataclass(frozen=True)
class PathTable:
    """``sigma[n][k]``: total weight of paths from (0,0) to (n,k)."""

    sigma: tuple

    def __getitem__(self, nk):
        n, k = nk
        if k < 0 or k > n or n >= len(self.sigma):
            return Fraction(0)
        return self.sigma[n][k]


def lattice_sigma(a, b, nmax):
    """Weighted path sums with steps U=(1,1), H=(1,0), H^2=(2,0).

    Weights: ``U -> 2(a+b)``, an ``H`` step arriving at ``(i,j)`` weighs
    ``(i+j-2)(a+b)`` and an ``H^2`` step arriving at ``(i,j)`` weighs
    ``-(i-1)(i+2j-4)ab``.
    """
    a, b = Fraction(a), Fraction(b)
    s, p = a + b, a * b
    sig = [[Fraction(0)] * (n + 1) for n in range(nmax + 1)]
    sig[0][0] = Fraction(1)

    def at(n, k):
        if n < 0 or k < 0 or k > n:
            return Fraction(0)
        return sig[n][k]

    for n in range(1, nmax + 1):
        for k in range(n + 1):
            up = 2 * s * at(n - 1, k - 1)
            level = (n + k - 2) * s * at(n - 1, k)
            double = -(n - 1) * (n + 2 * k - 4) * p * at(n - 2, k)
            sig[n][k] = up + level + double
    return PathTable(tuple(tuple(r) for r in sig))


def enumerate_paths(n, k):
    """All step words from (0,0) to (n,k) over {U, H, HH}; brute force for tests."""
    out = []

    def walk(x, y, word):
        if x == n:
            if y == k:
                out.append(tuple(word))
            return
        if y < k:
            walk(x + 1, y + 1, word + ["U"])
        walk(x + 1, y, word + ["H"])
        if x + 2 <= n:
            walk(x + 2, y, word + ["HH"])

    walk(0, 0, [])
    return out


def path_weight(word, a, b):
    a, b = Fraction(a), Fraction(b)
    x = y = 0
    w = Fraction(1)
    for step in word:
        if step == "U":
            x, y = x + 1, y + 1
            w *= 2 * (a + b)
        elif step == "H":
            x += 1
            w *= (x + y - 2) * (a + b)
        else:
            x += 2
            w *= -(x - 1) * (x + 2 * y - 4) * a * b
    return w
