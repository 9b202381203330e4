"""Zeros of ``H_n``: simultaneous root finding, critical-line classification, sign counts.

The structural zeros (0 and 1 for ``n > 2``, and 1/2 for odd ``n``) are
divided out exactly before the numerical stage, so the root finder only sees
the part of ``H_n`` whose zeros the critical-line statement is about.
"""

import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .errors import ConvergenceError, ValidationError
from .precision import check_precision, make_context
from .sheffer import PolyInX, expected_trivial_zeros, hn

TRIVIAL_0 = "trivial_zero(0)"
TRIVIAL_1 = "trivial_zero(1)"
TRIVIAL_HALF = "trivial_zero(half)"
ON_LINE = "on_line"
OFF_LINE = "off_line"

_TRIVIAL_LABEL = {Fraction(0): TRIVIAL_0, Fraction(1): TRIVIAL_1, Fraction(1, 2): TRIVIAL_HALF}


# -- root finding ------------------------------------------------------------------


def _horner_with_derivative(coeffs, x):
    """``p(x)``, ``p'(x)`` and ``sum |a_k| |x|^k`` for coefficients highest power first."""
    p = coeffs[0]
    dp = 0
    ax = abs(x)
    scale = abs(coeffs[0])
    for c in coeffs[1:]:
        dp = dp * x + p
        p = p * x + c
        scale = scale * ax + abs(c)
    return p, dp, scale


def backward_error(ctx, coeffs_high_first, x):
    """``|p(x)| / sum |a_k| |x|^k``: the relative coefficient perturbation that makes ``x`` exact."""
    p, _, scale = _horner_with_derivative(coeffs_high_first, x)
    return abs(p) / scale if scale else ctx.mpf(0)


def _initial_circle(ctx, coeffs, seed):
    n = len(coeffs) - 1
    # geometric mean of the root moduli is |a_0 / a_n|^(1/n); fall back to 1
    lead, const = abs(coeffs[0]), abs(coeffs[-1])
    radius = (const / lead) ** (ctx.mpf(1) / n) if const != 0 else ctx.mpf(1)
    rng = np.random.default_rng(seed)
    jitter = rng.uniform(-0.25, 0.25, size=n)
    offset = float(rng.uniform(0, 2 * math.pi))
    return [
        radius * (1 + ctx.mpf(float(jitter[k])) / 8)
        * ctx.expj(2 * ctx.pi * k / n + offset + ctx.mpf(float(jitter[k])))
        for k in range(n)
    ]


def poly_roots(p, precision=256, seed=0, max_iter=2000):
    """All roots of ``p`` by Aberth iteration at ``precision`` bits.

    ``p`` is a :class:`~riordan_critical.sheffer.PolyInX` or a coefficient
    list (lowest power first).  Iteration stops once every correction is
    below ``2^(-precision + 8)`` relative, after which each root must have
    backward error at most ``10^(-precision/8)``.  Returns ``mpc`` values
    sorted by real then imaginary part; the result depends only on the
    inputs and ``seed``.
    """
    precision = check_precision(precision)
    poly = p if isinstance(p, PolyInX) else PolyInX.from_coeffs(p)
    if poly.is_zero():
        raise ValidationError("the zero polynomial has no finite root set")
    # exact zeros first: a root at 0 has no relative backward error to speak of
    low = list(poly.coeffs)
    zeros = 0
    while low[zeros] == 0:
        zeros += 1
    out = make_context(precision)
    found = [out.mpc(0)] * zeros
    ctx = make_context(precision + 16)
    coeffs = [ctx.mpf(c.numerator) / c.denominator for c in reversed(low[zeros:])]
    n = len(coeffs) - 1
    if n == 0:
        return found
    if n == 1:
        return _sorted_roots(found + [out.mpc(-coeffs[1] / coeffs[0])])
    roots = _initial_circle(ctx, coeffs, seed)
    step_tol = ctx.ldexp(1, -precision + 8)
    done = [False] * n
    for _ in range(max_iter):
        worst = ctx.mpf(0)
        for k in range(n):
            if done[k]:
                continue
            zk = roots[k]
            val, der, _ = _horner_with_derivative(coeffs, zk)
            if val == 0:
                done[k] = True
                continue
            ratio = val / der if der != 0 else ctx.mpc(ctx.inf)
            repulsion = ctx.fsum(1 / (zk - roots[j]) for j in range(n) if j != k)
            step = ratio / (1 - ratio * repulsion)
            roots[k] = zk - step
            rel = abs(step) / max(abs(roots[k]), ctx.mpf(1))
            worst = max(worst, rel)
            if rel < step_tol:
                done[k] = True
        if all(done) or worst < step_tol:
            break
    else:
        raise ConvergenceError(
            f"Aberth iteration did not converge in {max_iter} sweeps",
            {"converged": sum(done), "degree": n},
        )
    limit = ctx.mpf(10) ** (-ctx.mpf(precision) / 8)
    errors = [backward_error(ctx, coeffs, r) for r in roots]
    bad = [k for k, e in enumerate(errors) if e > limit]
    if bad:
        raise ConvergenceError(
            "some roots did not reach the residual target",
            {"indices": bad, "worst": float(max(errors))},
        )
    return _sorted_roots(found + [out.mpc(r) for r in roots])


def _sorted_roots(roots):
    return sorted(roots, key=lambda z: (float(z.real), float(z.imag)))


# -- exact deflation of the structural zeros -----------------------------------------


def divide_linear(poly, root):
    """Exact synthetic division by ``x - root``; returns ``(quotient, remainder)``."""
    coeffs = list(reversed(poly.coeffs))
    out = [coeffs[0]]
    for c in coeffs[1:]:
        out.append(c + out[-1] * root)
    remainder = out.pop()
    return PolyInX.from_coeffs(list(reversed(out))), remainder


def deflate_trivial(poly, n):
    """Divide out the expected structural zeros, with multiplicity.

    Returns ``(quotient, [(root, multiplicity)])``.  A missing structural
    zero raises :class:`ValidationError`, since exact arithmetic cannot miss it.
    """
    found = []
    for root in expected_trivial_zeros(n):
        mult = 0
        while poly.degree > 0:
            quotient, rem = divide_linear(poly, root)
            if rem != 0:
                break
            poly = quotient
            mult += 1
        if mult == 0:
            raise ValidationError(f"H_{n} does not vanish at {root}")
        found.append((root, mult))
    return poly, found


# -- critical-line report --------------------------------------------------------------


@dataclass(frozen=True)
class RootEntry:
    value: object
    residual: float
    label: str
    distance: float  # |Re x - 1/2|

    def as_dict(self, digits=30):
        return {
            "re": _mpstr(self.value.real, digits),
            "im": _mpstr(self.value.imag, digits),
            "residual": self.residual,
            "classification": self.label,
            "distance": self.distance,
        }


def _mpstr(x, digits):
    import mpmath
    return mpmath.nstr(x, digits, min_fixed=-math.inf, max_fixed=math.inf) if x != 0 else "0"


@dataclass(frozen=True)
class RootReport:
    """Classified roots of ``H_n`` with the structural checks that were run.

    ``checks`` maps a check name to ``(passed, worst deviation)``.
    """

    q: object
    n: int
    degree: int
    roots: tuple
    tolerance: float
    precision: int
    checks: dict = field(default_factory=dict)

    def by_label(self, label):
        return [r for r in self.roots if r.label == label]

    @property
    def off_line(self):
        return self.by_label(OFF_LINE)

    @property
    def on_line(self):
        return self.by_label(ON_LINE)

    @property
    def trivial(self):
        return [r for r in self.roots if r.label.startswith("trivial")]

    @property
    def all_nontrivial_on_line(self):
        return not self.off_line

    @property
    def checks_passed(self):
        return all(ok for ok, _ in self.checks.values())

    def portable(self):
        """Copy whose root values live in the global mpmath context, so it pickles."""
        import dataclasses
        import mpmath

        with mpmath.workprec(self.precision + 16):
            roots = tuple(dataclasses.replace(r, value=mpmath.mpc(mpmath.mpf(r.value.real._mpf_),
                                                                  mpmath.mpf(r.value.imag._mpf_)))
                          for r in self.roots)
        return dataclasses.replace(self, roots=roots)

    def as_dict(self, digits=30):
        return {
            "q": self.q.describe(),
            "n": self.n,
            "degree": self.degree,
            "tolerance": self.tolerance,
            "precision": self.precision,
            "counts": {
                "trivial": len(self.trivial),
                "on_line": len(self.on_line),
                "off_line": len(self.off_line),
            },
            "checks": {k: {"passed": ok, "worst": worst} for k, (ok, worst) in self.checks.items()},
            "roots": [r.as_dict(digits) for r in self.roots],
        }


def _pairing_deviation(values, mapping):
    """Worst distance from ``mapping(v)`` to its nearest partner in ``values``."""
    pool = list(values)
    worst = 0.0
    for v in values:
        image = mapping(v)
        best = min(abs(image - w) for w in pool)
        worst = max(worst, float(best))
    return worst


def critical_line_report(q, n, tol=1e-8, precision=256, seed=0):
    """Find and classify all roots of ``H_n`` for ``Q = q``.

    Structural zeros are removed exactly and reported as ``trivial_*``; every
    remaining root is ``on_line`` if ``|Re x - 1/2| <= tol``, else ``off_line``.
    """
    if n < 1:
        raise ValidationError("n must be at least 1")
    precision = check_precision(precision)
    poly = hn(q, n)
    quotient, trivial = deflate_trivial(poly, n)
    ctx = make_context(precision)
    entries = []
    for root, mult in trivial:
        for _ in range(mult):
            entries.append(RootEntry(ctx.mpc(ctx.mpf(root.numerator) / root.denominator), 0.0,
                                     _TRIVIAL_LABEL[root], float(abs(root - Fraction(1, 2)))))
    coeffs_high = [ctx.mpf(c.numerator) / c.denominator for c in reversed(poly.coeffs)]
    found = poly_roots(quotient, precision, seed) if quotient.degree > 0 else []
    half = ctx.mpf(0.5)
    for z in found:
        dist = float(abs(z.real - half))
        entries.append(RootEntry(z, float(backward_error(ctx, coeffs_high, z)),
                                 ON_LINE if dist <= tol else OFF_LINE, dist))
    entries.sort(key=lambda e: (float(e.value.real), float(e.value.imag)))
    values = [e.value for e in entries]
    checks = {}
    checks["count_equals_degree"] = (len(values) == poly.degree, float(abs(len(values) - poly.degree)))
    refl = _pairing_deviation(values, lambda v: 1 - v)
    checks["reflection_pairing"] = (refl <= 2 * tol, refl)
    conj = _pairing_deviation(values, lambda v: v.conjugate())
    checks["conjugate_pairing"] = (conj <= 2 * tol, conj)
    if poly.degree >= 1:
        predicted = -poly[poly.degree - 1] / poly[poly.degree]
        vieta = float(abs(ctx.fsum(values) - ctx.mpf(predicted.numerator) / predicted.denominator))
        checks["vieta_sum"] = (vieta <= tol, vieta)
    return RootReport(q, n, poly.degree, tuple(entries), tol, precision, checks)


def empirical_threshold(q, ns, tol=1e-8, precision=256, reports=None):
    """Smallest ``n0`` in ``ns`` such that every tested ``n >= n0`` has no off-line roots.

    Returns ``(n0, exceptions)`` where ``exceptions`` lists the tested ``n``
    with off-line roots; ``n0`` is ``None`` if the largest tested ``n`` fails.
    ``reports`` may supply precomputed :class:`RootReport` objects keyed by ``n``.
    """
    ns = sorted(ns)
    reports = dict(reports or {})
    exceptions = []
    for n in ns:
        rep = reports.get(n) or critical_line_report(q, n, tol, precision)
        reports[n] = rep
        if rep.off_line:
            exceptions.append(n)
    if not exceptions:
        return (ns[0] if ns else None), exceptions
    last_bad = exceptions[-1]
    later = [n for n in ns if n > last_bad]
    return (later[0] if later else None), exceptions


# -- sign-change count on the line ---------------------------------------------------


class GridTooCoarse(ValidationError):
    """Adjacent grid samples differ in magnitude by more than the allowed factor."""


@dataclass(frozen=True)
class LineScan:
    """Sign changes of the real-valued parity component along ``x = 1/2 + i n t``."""

    n: int
    count: int
    values: tuple
    max_jump: float
    coarse: bool


def line_component(q, n, t, ctx=None, prec=None, poly=None):
    """Real part of ``H_n(1/2 + i n t)`` for even ``n``, ``H_n / i`` for odd ``n``."""
    ctx = ctx if ctx is not None else make_context(prec)
    poly = poly if poly is not None else hn(q, n)
    value = poly.eval_mp(ctx, ctx.mpc(ctx.mpf(0.5), n * ctx.mpf(t)))
    return value.real if n % 2 == 0 else value.imag


def line_zero_scan(q, n, t_grid, prec=None, jump_limit=1e6, source="exact", cd=None):
    """Count sign changes over the (strictly increasing, positive) grid ``t_grid``.

    ``source="exact"`` evaluates the exact polynomial; ``source="contour"``
    uses the parity component of the loop integral instead and needs the
    :class:`~riordan_critical.analysis.CriticalData` ``cd``.
    """
    grid = [float(t) for t in t_grid]
    if any(b <= a for a, b in zip(grid, grid[1:])):
        raise ValidationError("t grid must be strictly increasing")
    if grid and grid[0] <= 0:
        raise ValidationError("t grid must lie in (0, T); t = 0 is excluded")
    ctx = make_context(prec)
    if source == "exact":
        poly = hn(q, n)
        values = [line_component(q, n, t, ctx, poly=poly) for t in grid]
    elif source == "contour":
        from .analysis.contour import hn_from_contour
        if cd is None:
            raise ValidationError("source='contour' needs the critical data cd")
        values = [hn_from_contour(cd, n, t)[0] for t in grid]
        values = [v.real if n % 2 == 0 else v.imag for v in values]
    else:
        raise ValidationError(f"unknown source {source!r}")
    count = 0
    max_jump = 1.0
    for a, b in zip(values, values[1:]):
        if (a > 0 and b < 0) or (a < 0 and b > 0):
            count += 1
        small, big = sorted((abs(a), abs(b)))
        if small > 0:
            max_jump = max(max_jump, float(big / small))
        elif big > 0:
            max_jump = math.inf
    return LineScan(n, count, tuple(values), max_jump, max_jump > jump_limit)


def line_zero_count(q, n, t_grid, prec=None, jump_limit=1e6, strict=False, source="exact", cd=None):
    """Lower bound for the zeros of ``H_n(1/2 + i n t)`` with ``t`` in the grid's span.

    With ``strict=True`` a coarse grid raises :class:`GridTooCoarse`.
    """
    scan = line_zero_scan(q, n, t_grid, prec, jump_limit, source, cd)
    if strict and scan.coarse:
        raise GridTooCoarse(
            f"adjacent samples differ by a factor {scan.max_jump:.3g} > {jump_limit:g}; refine the grid"
        )
    return scan.count
