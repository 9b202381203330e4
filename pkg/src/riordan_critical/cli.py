"""Command-line front end: ``riordan-critical <group> <command> [options]``.

Exit status: 0 on success, 2 on invalid input, 3 when a numerical method
does not converge.  Output goes to ``--output`` (written atomically, so a
failed run leaves no file) or to standard output.  JSON documents carry
``schema: 1`` and a header block; CSV files start with ``#`` header lines.
Only the ``generated`` line differs between identical runs.
"""

import argparse
import csv
import io
import json
import math
import os
import sys
import tempfile
from concurrent.futures import ProcessPoolExecutor
from datetime import datetime, timezone
from fractions import Fraction

import mpmath

from . import TOOL_NAME, __version__
from .errors import ConvergenceError, ValidationError
from .precision import check_precision, default_precision, make_context

SCHEMA = 1

CSV_COLUMNS = {
    "sheffer coeffs": "n, k, coefficient (p/q); basis power: [x^k] H_n, basis falling: c[n][k] of (x)_k",
    "riordan production": "i, j, entry (p/q) of the requested matrix",
    "analysis curves": "t, Re zeta1, Im zeta1, Re zeta2, Im zeta2, Re phi, Im phi (phi at zeta1(t), t)",
    "zeros verify": "n, re, im, classification, distance |Re x - 1/2|, residual",
    "zeros count": "t, component (real parity component of H_n(1/2 + i n t))",
}


# -- serialisation helpers ------------------------------------------------------------


def rational(x):
    x = Fraction(x)
    return f"{x.numerator}/{x.denominator}"


def _digits(prec):
    return max(15, int(prec * math.log10(2)) + 1)


def complex_obj(z, prec):
    ctx = make_context(prec)
    z = ctx.mpc(z)
    return {"re": ctx.nstr(z.real, _digits(prec)), "im": ctx.nstr(z.imag, _digits(prec))}


def _header(args):
    config = {k: v for k, v in sorted(vars(args).items())
              if k not in ("handler", "output", "figure") and v is not None}
    return {
        "tool": TOOL_NAME,
        "version": __version__,
        "command": f"{args.group} {args.command}",
        "config": config,
    }


def _timestamp():
    return datetime.now(timezone.utc).strftime("%Y-%m-%dT%H:%M:%SZ")


def render_json(args, payload):
    doc = {"schema": SCHEMA, "header": _header(args), "generated": _timestamp()}
    doc.update(payload)
    return json.dumps(doc, indent=2, ensure_ascii=False) + "\n"


def render_csv(args, columns, rows):
    buf = io.StringIO()
    head = _header(args)
    buf.write(f"# tool: {head['tool']} {head['version']}\n")
    buf.write(f"# command: {head['command']}\n")
    buf.write(f"# config: {json.dumps(head['config'], sort_keys=True)}\n")
    buf.write(f"# generated: {_timestamp()}\n")
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(columns)
    writer.writerows(rows)
    return buf.getvalue()


def emit(args, text):
    if args.output is None:
        sys.stdout.write(text)
        return
    directory = os.path.dirname(os.path.abspath(args.output))
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".rc-", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
        umask = os.umask(0)
        os.umask(umask)
        os.chmod(tmp, 0o666 & ~umask)
        os.replace(tmp, args.output)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def figure_path(args):
    """Where to put the SVG: ``--figure`` if given, else next to ``--output`` when ``--svg`` is set."""
    if getattr(args, "figure", None):
        return args.figure
    if getattr(args, "svg", False):
        if args.output is None:
            raise ValidationError("--svg needs --output (the figure is written next to it)")
        return os.path.splitext(args.output)[0] + ".svg"
    return None


def save_figure(path, draw):
    import matplotlib
    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    matplotlib.rcParams["svg.hashsalt"] = TOOL_NAME
    fig, ax = plt.subplots(figsize=(6, 4.5))
    draw(ax)
    fig.tight_layout()
    fig.savefig(path, format="svg", metadata={"Date": None})
    plt.close(fig)


# -- Q parsing -------------------------------------------------------------------------


def q_from_args(args, need=None):
    from .sheffer import QuadraticQ

    ab = args.a is not None or args.b is not None
    zz = getattr(args, "z1", None) is not None or getattr(args, "z2", None) is not None
    if ab and zz:
        raise ValidationError("give either --a/--b or --z1/--z2, not both")
    if need == "AB" and not ab:
        raise ValidationError("this command needs --a and --b")
    if need == "Z" and not zz:
        raise ValidationError("this command needs --z1 and --z2")
    if ab:
        if args.a is None or args.b is None:
            raise ValidationError("--a and --b go together")
        return QuadraticQ.ab(args.a, args.b)
    if zz:
        if args.z1 is None or args.z2 is None:
            raise ValidationError("--z1 and --z2 go together")
        return QuadraticQ.zeros(args.z1, args.z2)
    raise ValidationError("no Q given: use --a/--b or --z1/--z2")


def critical_from_args(args):
    from .analysis import from_q

    q = q_from_args(args, need="Z")
    q.require_analytic()
    return from_q(q)


def precision_from_args(args, fallback=None):
    if args.precision is not None:
        return check_precision(args.precision)
    return fallback if fallback is not None else default_precision()


# -- handlers ----------------------------------------------------------------------------


def cmd_sheffer_coeffs(args):
    from .sheffer import coefficient_matrix, c_matrix

    q = q_from_args(args)
    if args.nmax < 0:
        raise ValidationError("--nmax must be nonnegative")
    mat = coefficient_matrix(q, args.nmax) if args.basis == "power" else c_matrix(q, args.nmax)
    rows = [list(mat.row(n)) for n in range(args.nmax + 1)]
    if args.format == "csv":
        return render_csv(args, ["n", "k", "coefficient"],
                          [[n, k, rational(c)] for n, row in enumerate(rows) for k, c in enumerate(row)])
    return render_json(args, {
        "q": q.describe(),
        "basis": args.basis,
        "rows": [{"n": n, "coeffs": [rational(c) for c in row]} for n, row in enumerate(rows)],
    })


def cmd_riordan_production(args):
    from .riordan import horizontal_pair, production_by_linear_algebra, stieltjes_residual
    from .sheffer import c_matrix, coefficient_matrix, lq_decomposition

    q = q_from_args(args, need="AB" if args.of == "LQ" else None)
    if args.size < 2:
        raise ValidationError("--size must be at least 2")
    if args.of == "LQ":
        base = lq_decomposition(q, args.size)[0]
    elif args.of == "A":
        base = coefficient_matrix(q, args.size)
    else:
        base = c_matrix(q, args.size)
    prod = horizontal_pair(base)
    check = production_by_linear_algebra(base)
    agree = all(prod.entry(i, j) == x for i, row in enumerate(check) for j, x in enumerate(row))
    matrix = prod.as_matrix()
    if args.format == "csv":
        return render_csv(args, ["i", "j", "entry"],
                          [[i, j, rational(x)] for i, row in enumerate(matrix) for j, x in enumerate(row)])
    return render_json(args, {
        "q": q.describe(),
        "matrix": f"P_{args.of}",
        "rows": [[rational(x) for x in row] for row in matrix],
        "base_rows": [[rational(x) for x in base.row(n)] for n in range(base.size + 1)],
        "c_seq": [rational(x) for x in prod.c_seq],
        "r_seq": [rational(x) for x in prod.r_seq],
        "integral": prod.is_integral(),
        "stieltjes_residual": rational(stieltjes_residual(base, prod)),
        "agrees_with_linear_algebra": agree,
    })


def cmd_combinat_tree(args):
    from .combinat import tree_levels, vector_recurrence
    from .riordan import horizontal_pair
    from .sheffer import lq_decomposition

    q = q_from_args(args, need="AB")
    q.require_combinatorial()
    if not 0 <= args.depth <= 8:
        raise ValidationError("--depth must be in 0..8 for explicit expansion")
    lq = lq_decomposition(q, args.depth + 1)[0]
    prod = horizontal_pair(lq)
    levels = tree_levels(prod, args.depth)
    vectors = vector_recurrence(prod, args.depth)
    out_levels = []
    for lvl, vec in zip(levels, vectors):
        out_levels.append({
            "level": lvl.level,
            "unmarked": {str(k): v for k, v in sorted(lvl.unmarked.items())},
            "marked": {str(k): v for k, v in sorted(lvl.marked.items())},
            "net": lvl.net_row(),
            "recurrence": [rational(x) for x in vec],
            "q_row": [rational(x) for x in lq.row(lvl.level)],
        })
    agree = all(
        [Fraction(x) for x in lvl.net_row()] == [Fraction(x) for x in vec]
        == list(lq.row(lvl.level))
        for lvl, vec in zip(levels, vectors)
    )
    return render_json(args, {"q": q.describe(), "levels": out_levels, "all_agree": agree})


def cmd_combinat_paths(args):
    from .combinat import lattice_sigma
    from .sheffer import c_matrix

    q = q_from_args(args, need="AB")
    q.require_combinatorial()
    if args.nmax < 0:
        raise ValidationError("--nmax must be nonnegative")
    table = lattice_sigma(q.a, q.b, args.nmax)
    cm = c_matrix(q, max(args.nmax, 1))
    matches = all(table[n, k] == cm.entry(n, k) for n in range(args.nmax + 1) for k in range(n + 1))
    return render_json(args, {
        "q": q.describe(),
        "sigma": [[rational(table[n, k]) for k in range(n + 1)] for n in range(args.nmax + 1)],
        "matches_c": matches,
    })


def _curve_row(cd, t, ctx):
    from .analysis.critical import phi_value, zeta

    z1v = zeta(cd, t, 1, ctx=ctx)
    z2v = zeta(cd, t, 2, ctx=ctx)
    phi = ctx.log(z1v) if t == 0 else phi_value(cd, z1v, t, ctx)
    return [z1v.real, z1v.imag, z2v.real, z2v.imag, phi.real, phi.imag]


def cmd_analysis_curves(args):
    cd = critical_from_args(args)
    if args.samples < 2:
        raise ValidationError("--samples must be at least 2")
    prec = precision_from_args(args)
    ctx = make_context(prec)
    _, _, big_t = cd.mp_thresholds(ctx)
    digits = min(_digits(prec), 30)
    rows = []
    for k in range(args.samples):
        t = big_t * k / (args.samples - 1)
        vals = _curve_row(cd, t, ctx)
        rows.append([ctx.nstr(t, digits)] + [ctx.nstr(v, digits) for v in vals])
    path = figure_path(args)
    if path:
        fl = [[float(x) for x in r] for r in rows]

        def draw(ax):
            ax.plot([r[1] for r in fl], [r[2] for r in fl], label="zeta_1(t)")
            ax.plot([r[3] for r in fl], [r[4] for r in fl], label="zeta_2(t)")
            ax.set_xlabel("Re z")
            ax.set_ylabel("Im z")
            ax.set_title(f"critical curves, (z1, z2) = ({cd.z1}, {cd.z2}), 0 <= t <= T")
            ax.legend()
        save_figure(path, draw)
    columns = ["t", "re_zeta1", "im_zeta1", "re_zeta2", "im_zeta2", "re_phi", "im_phi"]
    if args.format == "json":
        return render_json(args, {"critical": cd.describe(),
                                  "columns": columns, "rows": rows})
    return render_csv(args, columns, rows)


def cmd_analysis_compare(args):
    from .analysis import approximate, contour_integral

    cd = critical_from_args(args)
    prec = precision_from_args(args)
    approx = approximate(cd, args.n, args.t, args.method, layer=args.layer,
                         prec=prec, check=not args.no_gate)
    res = contour_integral(cd, args.n, args.t, precision=prec, rel_tol=args.rel_tol)
    branch = approx.closest(res.integral)
    ctx = make_context(max(prec, res.precision))
    ratio = ctx.mpc(res.integral) / ctx.mpc(branch)
    return render_json(args, {
        "critical": cd.describe(),
        "method": args.method,
        "layer": args.layer if args.method == "layer" else None,
        "contour": complex_obj(res.integral, res.precision),
        "contour_method": res.method,
        "contour_precision": res.precision,
        "est_error": mpmath.nstr(res.est_error, 6),
        "approximant": complex_obj(branch, prec),
        "branch": "+" if branch == approx.value else "-",
        "ratio": complex_obj(ratio, 64),
        "abs_ratio_minus_one": float(abs(ratio - 1)),
    })


def _report_for(job):
    from .sheffer import QuadraticQ
    from .zeros import critical_line_report

    form, params, n, tol, prec = job
    q = QuadraticQ.ab(*params) if form == "AB" else QuadraticQ.zeros(*params)
    return critical_line_report(q, n, tol=tol, precision=prec).portable()


def _map(jobs, func, items):
    if jobs <= 1 or len(items) <= 1:
        return [func(x) for x in items]
    with ProcessPoolExecutor(max_workers=jobs) as pool:
        return list(pool.map(func, items))


def cmd_zeros_verify(args):
    from .zeros import empirical_threshold

    q = q_from_args(args)
    prec = precision_from_args(args, fallback=256)
    nmin = args.n
    nmax = args.nmax if args.nmax is not None else args.n
    if nmin < 1 or nmax < nmin:
        raise ValidationError("need 1 <= --n <= --nmax")
    if not args.tol > 0:
        raise ValidationError("--tol must be positive")
    ns = list(range(nmin, nmax + 1))
    items = [(q.form, q.params, n, args.tol, prec) for n in ns]
    reports = _map(args.jobs, _report_for, items)
    by_n = dict(zip(ns, reports))
    n0, exceptions = empirical_threshold(q, ns, args.tol, prec, reports=by_n)
    path = figure_path(args)
    if path:
        def draw(ax):
            for rep in reports:
                for r in rep.roots:
                    colour = {"on_line": "tab:blue", "off_line": "tab:red"}.get(r.label, "tab:gray")
                    ax.plot(float(r.value.real), float(r.value.imag), ".", color=colour, ms=3)
            ax.axvline(0.5, color="k", lw=0.5)
            ax.set_xlabel("Re x")
            ax.set_ylabel("Im x")
            ax.set_title(f"zeros of H_n, n = {nmin}..{nmax}")
        save_figure(path, draw)
    if args.format == "csv":
        rows = []
        for rep in reports:
            for r in rep.roots:
                d = r.as_dict(_digits(prec))
                rows.append([rep.n, d["re"], d["im"], d["classification"], f"{r.distance:.3e}", f"{r.residual:.3e}"])
        return render_csv(args, ["n", "re", "im", "classification", "distance", "residual"], rows)
    payload = {
        "q": q.describe(),
        "n0": n0,
        "exceptions": exceptions,
        "all_checks_passed": all(r.checks_passed for r in reports),
    }
    if len(reports) == 1:
        payload["report"] = reports[0].as_dict(_digits(prec))
    else:
        payload["reports"] = [r.as_dict(_digits(prec)) for r in reports]
    return render_json(args, payload)


def cmd_zeros_count(args):
    from .zeros import critical_line_report, line_zero_scan, ON_LINE

    q = q_from_args(args, need="Z")
    q.require_analytic()
    from .analysis import from_q
    cd = from_q(q)
    if args.samples < 2:
        raise ValidationError("--samples must be at least 2")
    prec = precision_from_args(args)
    # open interval (0, T): samples at T k / (samples + 1)
    grid = [cd.T * (k + 1) / (args.samples + 1) for k in range(args.samples)]
    scan = line_zero_scan(q, args.n, grid, prec=prec, jump_limit=args.jump_limit,
                          source=args.source, cd=cd)
    payload = {
        "q": q.describe(),
        "n": args.n,
        "T": cd.T,
        "samples": args.samples,
        "count": scan.count,
        "coarse_grid": scan.coarse,
        "max_jump": scan.max_jump if math.isfinite(scan.max_jump) else "inf",
    }
    if args.cross_check:
        rep = critical_line_report(q, args.n, precision=max(prec, 256))
        upper = [r for r in rep.roots if r.label == ON_LINE and r.value.imag > 0
                 and r.value.imag < args.n * cd.T]
        payload["root_finder_on_line_upper"] = len(upper)
        payload["consistent"] = scan.count <= len(upper)
    path = figure_path(args)
    if path:
        def draw(ax):
            vals = [float(v) for v in scan.values]
            ax.plot(grid, [math.copysign(math.log1p(abs(v)), v) for v in vals])
            ax.axhline(0, color="k", lw=0.5)
            ax.set_xlabel("t")
            ax.set_ylabel("sign(h) log(1 + |h|)")
            ax.set_title(f"parity component of H_{args.n}(1/2 + i n t)")
        save_figure(path, draw)
    if args.format == "csv":
        digits = min(_digits(prec), 30)
        return render_csv(args, ["t", "component"],
                          [[repr(t), mpmath.nstr(v, digits)] for t, v in zip(grid, scan.values)])
    return render_json(args, payload)


# -- parser ---------------------------------------------------------------------------------


def _add_common(p, formats=("json",), figure=False):
    p.add_argument("--precision", type=int, default=None,
                   help="working precision in bits (default: RC_PRECISION or 128)")
    p.add_argument("--output", "-o", default=None, help="output file (default: stdout)")
    p.add_argument("--format", choices=formats, default=formats[0])
    p.add_argument("--jobs", type=int, default=1, help="worker processes for sweeps")
    if figure:
        p.add_argument("--figure", default=None, help="also write an SVG plot to this path")
        p.add_argument("--svg", action="store_true", help="write an SVG next to --output")


def _add_ab(p):
    p.add_argument("--a", default=None, help="Q = (1 + a z)(1 + b z)")
    p.add_argument("--b", default=None)


def _add_zz(p):
    p.add_argument("--z1", default=None, help="Q = (z1 - z)(z2 - z), 0 < z1 < z2")
    p.add_argument("--z2", default=None)


def _csv_help(key):
    return f"CSV columns: {CSV_COLUMNS[key]}" if key in CSV_COLUMNS else None


def build_parser():
    parser = argparse.ArgumentParser(
        prog=TOOL_NAME,
        description="Sheffer polynomials from Q(z)^x Q(-z)^(1-x): coefficients, Riordan "
                    "combinatorics, loop-integral asymptotics and critical-line zeros.",
    )
    parser.add_argument("--version", action="version", version=f"{TOOL_NAME} {__version__}")
    groups = parser.add_subparsers(dest="group", required=True)

    g = groups.add_parser("sheffer", help="coefficients of H_n").add_subparsers(dest="command", required=True)
    p = g.add_parser("coeffs", help="rows of the coefficient matrix", epilog=_csv_help("sheffer coeffs"))
    _add_ab(p)
    _add_zz(p)
    p.add_argument("--nmax", type=int, required=True)
    p.add_argument("--basis", choices=("power", "falling"), default="power")
    _add_common(p, ("json", "csv"))
    p.set_defaults(handler=cmd_sheffer_coeffs)

    g = groups.add_parser("riordan", help="Riordan matrices").add_subparsers(dest="command", required=True)
    p = g.add_parser("production", help="production matrix via the horizontal pair",
                     epilog=_csv_help("riordan production"))
    _add_ab(p)
    _add_zz(p)
    p.add_argument("--of", choices=("LQ", "A", "C"), default="LQ",
                   help="LQ (needs --a/--b), the coefficient matrix A, or the falling-basis matrix C")
    p.add_argument("--size", type=int, default=6)
    _add_common(p, ("json", "csv"))
    p.set_defaults(handler=cmd_riordan_production)

    g = groups.add_parser("combinat", help="trees and lattice paths").add_subparsers(dest="command", required=True)
    p = g.add_parser("tree", help="marked generating tree of L_Q")
    _add_ab(p)
    p.add_argument("--depth", type=int, default=5)
    _add_common(p)
    p.set_defaults(handler=cmd_combinat_tree)
    p = g.add_parser("paths", help="weighted lattice-path sums sigma(n, k)")
    _add_ab(p)
    p.add_argument("--nmax", type=int, default=8)
    _add_common(p)
    p.set_defaults(handler=cmd_combinat_paths)

    g = groups.add_parser("analysis", help="critical curves and asymptotics").add_subparsers(dest="command", required=True)
    p = g.add_parser("curves", help="zeta_1, zeta_2 and phi on 0 <= t <= T",
                     epilog=_csv_help("analysis curves"))
    _add_zz(p)
    p.set_defaults(a=None, b=None)
    p.add_argument("--samples", type=int, default=200)
    _add_common(p, ("csv", "json"), figure=True)
    p.set_defaults(handler=cmd_analysis_curves)
    p = g.add_parser("compare", help="loop integral against an asymptotic approximant")
    _add_zz(p)
    p.set_defaults(a=None, b=None)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--t", type=float, required=True)
    p.add_argument("--method", choices=("saddle", "layer", "smallt"), required=True)
    p.add_argument("--layer", choices=("atT", "atT1_minus", "atT1_plus"), default="atT")
    p.add_argument("--rel-tol", type=float, default=1e-10)
    p.add_argument("--no-gate", action="store_true", help="skip the admissible-window check")
    _add_common(p)
    p.set_defaults(handler=cmd_analysis_compare)

    g = groups.add_parser("zeros", help="roots of H_n").add_subparsers(dest="command", required=True)
    p = g.add_parser("verify", help="classify all roots against Re x = 1/2",
                     epilog=_csv_help("zeros verify"))
    _add_ab(p)
    _add_zz(p)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--nmax", type=int, default=None, help="sweep n..nmax")
    p.add_argument("--tol", type=float, default=1e-8)
    _add_common(p, ("json", "csv"), figure=True)
    p.set_defaults(handler=cmd_zeros_verify)
    p = g.add_parser("count", help="sign changes of H_n(1/2 + i n t) on (0, T)",
                     epilog=_csv_help("zeros count"))
    _add_zz(p)
    p.set_defaults(a=None, b=None)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--samples", type=int, default=400)
    p.add_argument("--source", choices=("exact", "contour"), default="exact")
    p.add_argument("--jump-limit", type=float, default=1e6)
    p.add_argument("--cross-check", action="store_true", help="compare with the root finder")
    _add_common(p, ("json", "csv"), figure=True)
    p.set_defaults(handler=cmd_zeros_count)
    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        if args.precision is not None:
            check_precision(args.precision)
        else:
            default_precision()
        if args.jobs < 1:
            raise ValidationError("--jobs must be at least 1")
        text = args.handler(args)
        emit(args, text)
    except ValidationError as exc:
        print(f"{TOOL_NAME}: error: {exc}", file=sys.stderr)
        return 2
    except ConvergenceError as exc:
        print(f"{TOOL_NAME}: did not converge: {exc}", file=sys.stderr)
        return 3
    return 0


if __name__ == "__main__":
    sys.exit(main())
