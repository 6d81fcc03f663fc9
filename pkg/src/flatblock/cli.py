"""``flatblock`` command-line interface.

Exit codes:

====  =====================================================
0     success, or verdict YES
1     verdict NO (decide), self saddle connection found
2     verdict UNKNOWN
3     a search budget ran out (``--budget-length``, ``--max-n``)
64    usage error, unreadable or invalid input file
====  =====================================================

Commands exchange data through files (see :mod:`flatblock.io`).
"""
from __future__ import annotations

import argparse
import random
import sys
from fractions import Fraction

from . import billiard as bl
from . import io
from .blocking import (
    DEFAULT_MAX_N,
    BudgetExceeded,
    RationalAlpha,
    Verdict,
    decide_fbp,
    irrational_billiard_demo,
    lift_blocking_set,
    no_self_saddle_check,
    torus_blocking_set,
    witness_geodesic,
)
from .exactnum import common_field
from .flow import (
    connecting_geodesics,
    decompose,
    find_two_cylinder_config,
    saddle_connections,
    trace,
)
from .render import LAYERS, render_svg
from .surface import (
    SurfaceError,
    SurfacePoint,
    covering_from_lattice,
    double_cover_fomin,
    l_shaped,
    normalized_ngon_surface,
    regular_ngon_surface,
    torus,
    two_cylinder_surface,
)

EXIT_YES, EXIT_NO, EXIT_UNKNOWN, EXIT_BUDGET, EXIT_USAGE = 0, 1, 2, 3, 64


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


# -- argument helpers ---------------------------------------------------------


def _sympy_real(tok: str):
    import sympy

    try:
        e = sympy.sympify(tok, locals={"sqrt": sympy.sqrt, "cos": sympy.cos, "sin": sympy.sin,
                                       "tan": sympy.tan, "pi": sympy.pi})
    except (sympy.SympifyError, SyntaxError, TypeError) as exc:
        raise UsageError(f"cannot parse number {tok!r}") from exc
    if e.free_symbols or not e.is_real:
        raise UsageError(f"{tok!r} is not a real constant")
    return e


def _reals(*toks):
    """Exact field elements for numeric arguments such as ``3/2`` or ``sqrt(2)``."""
    F, vals = common_field(*[_sympy_real(t) for t in toks])
    return F, vals


def _in_field(tok: str, F):
    """A coordinate in ``F``: a rational, a polynomial in the generator ``t``, or ``c0,c1,...``."""
    if "," in tok:
        try:
            return io.parse_element(tok, F)
        except io.ParseError as e:
            raise UsageError(str(e)) from e
    try:
        return F(Fraction(tok))
    except (ValueError, ZeroDivisionError):
        pass
    import sympy

    t = sympy.Symbol("t")
    try:
        e = sympy.sympify(tok.replace("^", "**"), locals={"t": t})
        poly = sympy.Poly(e, t, domain="QQ")
    except (sympy.SympifyError, SyntaxError, TypeError, sympy.PolynomialError) as exc:
        raise UsageError(f"cannot read {tok!r} as an element of the surface field") from exc
    acc, pw, gen = F(0), F(1), F.gen()
    for c in reversed(poly.all_coeffs()):
        acc = acc + pw * F(Fraction(int(c.p), int(c.q)))
        pw = pw * gen
    return acc


def _point(vals, s) -> SurfacePoint:
    p, x, y = vals
    try:
        p = int(p)
    except ValueError as e:
        raise UsageError(f"polygon index {p!r} is not an integer") from e
    if not 0 <= p < len(s.polygons):
        raise UsageError(f"polygon index {p} out of range")
    return SurfacePoint(p, _in_field(x, s.field), _in_field(y, s.field))


def _vector(vals, s):
    return (_in_field(vals[0], s.field), _in_field(vals[1], s.field))


def _read(path: str) -> str:
    try:
        if path == "-":
            return sys.stdin.read()
        with open(path) as fh:
            return fh.read()
    except OSError as e:
        raise UsageError(str(e)) from e


def _write(path: str | None, text: str) -> None:
    if path is None or path == "-":
        sys.stdout.write(text)
        return
    try:
        with open(path, "w") as fh:
            fh.write(text)
    except OSError as e:
        raise UsageError(str(e)) from e


def _load_surface(path):
    return io.load_surface(_read(path))


# -- build --------------------------------------------------------------------


def _table(args):
    """A billiard table from ``--square`` style flags or a billiard file."""
    if getattr(args, "billiard", None):
        return io.load_billiard(_read(args.billiard))
    if args.square:
        return bl.unit_square()
    if args.triangle:
        try:
            a = Fraction(args.triangle)
        except (ValueError, ZeroDivisionError) as e:
            raise UsageError(f"bad angle {args.triangle!r}") from e
        if a.numerator != 1 or a.denominator < 3:
            raise UsageError("--triangle takes 1/n with n >= 3 (right triangle with angle pi/n)")
        return bl.right_triangle(a.denominator)
    if args.equilateral:
        return bl.equilateral_triangle()
    if args.half_equilateral:
        return bl.half_equilateral_triangle()
    if args.notched:
        return bl.notched_polygon()
    if args.regular:
        return bl.regular_polygon(args.regular)
    raise UsageError("choose a table: --square, --triangle 1/n, --equilateral, --half-equilateral, "
                     "--notched, --regular n or --billiard FILE")


def cmd_build(args) -> int:
    kind, params = args.kind, args.params

    def need(k):
        if len(params) != k:
            raise UsageError(f"build {kind} takes {k} parameter(s), got {len(params)}")

    if kind == "ngon":
        need(1)
        s = regular_ngon_surface(_int(params[0]))
    elif kind == "ngon-normalized":
        need(1)
        s = normalized_ngon_surface(_int(params[0]))
    elif kind == "lshaped":
        need(2)
        F, (a, b) = _reals(*params)
        s = l_shaped(a, b, field=F)
    elif kind == "torus":
        if params:
            need(2)
            F, (w, h) = _reals(*params)
            s = torus(w, h, field=F)
        else:
            s = torus()
    elif kind == "two-cylinder":
        need(5)
        F, vals = _reals(*params)
        s = two_cylinder_surface(*vals, field=F)
    elif kind == "fomin-cover":
        need(0)
        s, _ = double_cover_fomin()
    elif kind == "zk":
        need(0)
        s, _ = bl.zk_unfold(_table(args))
    elif kind == "irrational-demo":
        need(1)
        F, (alpha,) = _reals(params[0])
        s, _ = irrational_billiard_demo(args.theta, alpha)
    elif kind == "from-file":
        need(1)
        s = _load_surface(params[0])
    else:
        raise UsageError(f"unknown builder {kind!r}")
    _write(args.output, io.dump_surface(s))
    print(s.summary(), file=sys.stderr if args.output in (None, "-") else sys.stdout)
    return EXIT_YES


def _int(tok) -> int:
    try:
        return int(tok)
    except ValueError as e:
        raise UsageError(f"expected an integer, got {tok!r}") from e


# -- decide / block / witness -------------------------------------------------


def _demo_points(s):
    """Two distinct interior points of polygon 0 with exact coordinates."""
    from .flow import _ear_clip

    poly = s.polygons[0]
    i, j, k = _ear_clip(poly)[0]
    a, b, c = poly[i], poly[j], poly[k]
    O = ((a[0] + b[0] + c[0]) / 3, (a[1] + b[1] + c[1]) / 3)
    A = ((a[0] + 2 * b[0] + 4 * c[0]) / 7, (a[1] + 2 * b[1] + 4 * c[1]) / 7)
    return SurfacePoint(0, *O), SurfacePoint(0, *A)


def _config_index(cfg) -> int:
    for i, c in enumerate(find_two_cylinder_config(cfg.decomposition)):
        if (c.c1 is cfg.c1 and c.c2 is cfg.c2) or \
                (c.w1 == cfg.w1 and c.w2 == cfg.w2 and c.l == cfg.l and c.a1 == cfg.a1 and c.a2 == cfg.a2):
            return i
    raise AssertionError("configuration not found in its own decomposition")


def certificate_of(s, dec) -> io.Certificate:
    c = io.Certificate(dec.verdict.value, s)
    if dec.verdict == Verdict.NO:
        cfg = dec.no_data.config
        c.direction = cfg.decomposition.direction.vector
        c.config_index = _config_index(cfg)
        c.widths = (cfg.w1, cfg.w2)
        r = cfg.w2 / cfg.w1
        c.ratio = r if r > 1 else 1 / r
    elif dec.verdict == Verdict.YES:
        cov = dec.yes_data.covering
        c.lattice = cov.lattice
        c.shifts = [t for _, t in cov.cell_map]
        c.degree = cov.degree
    else:
        for k, v in sorted(dec.budget_report.items()):
            c.budget[k] = len(v) if isinstance(v, list) else v
    return c


def cmd_decide(args) -> int:
    s = _load_surface(args.surface)
    dec = decide_fbp(s, saddle_length=args.saddle_length, decomp_length=args.budget_length,
                     directions=args.directions)
    cert = certificate_of(s, dec)
    print(dec.verdict.value)
    if dec.verdict == Verdict.NO:
        print(f"direction ({cert.direction[0]}, {cert.direction[1]})")
        print(f"widths {cert.widths[0]} {cert.widths[1]}")
        print(f"ratio {cert.ratio} ~ {float(cert.ratio):.6f}")
    elif dec.verdict == Verdict.YES:
        print(f"covering degree {cert.degree}, lattice {_vec(cert.lattice[0])} {_vec(cert.lattice[1])}")
        O, A = _demo_points(s)
        pts = dec.yes_data.blocking_set(O, A)
        print(f"blocking {O} and {A} with {len(pts)} points:")
        for p in pts:
            print(f"  {p}")
    else:
        for k, v in sorted(cert.budget.items()):
            print(f"budget {k} {v}")
    if args.output:
        _write(args.output, io.dump_certificate(cert))
    return {Verdict.YES: EXIT_YES, Verdict.NO: EXIT_NO}.get(dec.verdict, EXIT_UNKNOWN)


def _vec(v) -> str:
    return f"({v[0]}, {v[1]})"


def _load_cert(path, want):
    cert = io.load_certificate(_read(path))
    if cert.verdict != want:
        raise UsageError(f"this command needs a {want} certificate, got {cert.verdict}")
    return cert


def cmd_block(args) -> int:
    cert = _load_cert(args.certificate, "YES")
    s = cert.surface
    cov = covering_from_lattice(s, cert.lattice, cert.shifts)
    O, A = _point(args.O, s), _point(args.A, s)
    pts = lift_blocking_set(cov, O, A, torus_blocking_set)
    for p in pts:
        print(p)
    if args.output:
        _write(args.output, io.dump_points(pts, s.field))
    return EXIT_YES


def _config_from_cert(cert, budget_length):
    s = cert.surface
    dec = decompose(s, cert.direction, budget_length)
    if dec is None:
        raise BudgetExceeded("direction does not decompose within --budget-length")
    cfgs = find_two_cylinder_config(dec)
    if cert.config_index is None or not 0 <= cert.config_index < len(cfgs):
        raise UsageError("certificate names a configuration that does not exist")
    cfg = cfgs[cert.config_index]
    if cert.widths is not None and (cfg.w1, cfg.w2) != tuple(cert.widths):
        raise UsageError("certificate widths do not match the surface")
    return cfg


def _random_avoid(cfg, k, seed):
    rng = random.Random(seed)
    F = cfg.surface.field
    out = []
    for _ in range(k):
        u = F(Fraction(rng.randrange(1, 1000), 1000))
        v = F(Fraction(rng.randrange(1, 1000), 1000))
        if rng.random() < 0.5:
            out.append(cfg.embedding(u * cfg.w1, -v * cfg.h1))
        else:
            out.append(cfg.embedding(cfg.w1 - cfg.l + u * cfg.w2, v * cfg.h2))
    return out


def cmd_witness(args) -> int:
    cert = _load_cert(args.certificate, "NO")
    s = cert.surface
    cfg = _config_from_cert(cert, args.budget_length)
    avoid = []
    if args.avoid:
        avoid += io.load_points(_read(args.avoid), s.field)
    if args.random_avoid:
        avoid += _random_avoid(cfg, args.random_avoid, args.seed)
    rec = witness_geodesic(cfg, avoid=avoid, max_n=args.max_n)
    print(f"n {rec.n} pair ({rec.pair.p}, {rec.pair.q}) crossings {rec.crossings}")
    print(f"holonomy {_vec(rec.path.holonomy)}, {len(rec.path.segments)} segments, "
          f"avoiding {len(avoid)} points")
    pr = io.PathRecord(rec.n, rec.pair.p, rec.pair.q, rec.path.holonomy, list(rec.path.segments))
    if args.output:
        _write(args.output, io.dump_path(pr, s.field))
    if args.svg:
        _write(args.svg, render_svg(s, blockers=avoid, paths=[rec.path]))
    return EXIT_YES


# -- geometry commands --------------------------------------------------------


class _Segments:
    """Minimal path object for rendering and folding stored paths."""

    def __init__(self, segments):
        self.segments = segments


def cmd_render(args) -> int:
    s = _load_surface(args.surface)
    layers = tuple(args.layers.split(",")) if args.layers else LAYERS
    blockers = io.load_points(_read(args.blockers), s.field) if args.blockers else ()
    paths = [_Segments(io.load_path(_read(p), s.field).segments) for p in args.path or ()]
    cyl = None
    if args.cylinders:
        cyl = decompose(s, _vector(args.cylinders, s), args.budget_length)
        if cyl is None:
            raise BudgetExceeded("direction does not decompose within --budget-length")
    try:
        svg = render_svg(s, blockers=blockers, paths=paths, cylinders=cyl, layers=layers,
                         scale=args.scale, digits=args.digits)
    except ValueError as e:
        raise UsageError(str(e)) from e
    _write(args.output, svg)
    return EXIT_YES


def cmd_trace(args) -> int:
    s = _load_surface(args.surface)
    start = _point(args.start, s)
    d = _vector(args.direction, s)
    blk = io.load_points(_read(args.blockers), s.field) if args.blockers else ()
    path = trace(s, start, d, args.length, blockers=blk)
    print(f"terminal {path.terminal}")
    print(f"end {path.end}")
    print(f"holonomy {_vec(path.holonomy)} length ~ {path.length:.6f}")
    if args.output:
        _write(args.output, io.dump_path(io.PathRecord(0, 0, 0, path.holonomy, list(path.segments)), s.field))
    return EXIT_YES


def cmd_connect(args) -> int:
    s = _load_surface(args.surface)
    O, A = _point(args.source, s), _point(args.target, s)
    blk = io.load_points(_read(args.blockers), s.field) if args.blockers else ()
    paths = connecting_geodesics(s, O, A, args.length, blockers=blk)
    print(f"{'#':>4}  {'length':>10}  holonomy")
    for i, p in enumerate(paths):
        print(f"{i:>4}  {p.length:>10.5f}  {_vec(p.holonomy)}")
    print(f"{len(paths)} geodesics of length <= {args.length}" + (" avoiding the blockers" if blk else ""))
    return EXIT_YES


def cmd_cylinders(args) -> int:
    s = _load_surface(args.surface)
    dec = decompose(s, _vector(args.direction, s), args.budget_length)
    if dec is None:
        print("no cylinder decomposition within --budget-length")
        return EXIT_BUDGET
    print(f"{'#':>3}  {'width':>10}  {'height':>10}  {'modulus':>10}  exact width | height")
    for i, c in enumerate(dec.cylinders):
        print(f"{i:>3}  {float(c.width):>10.5f}  {float(c.height):>10.5f}  {float(c.modulus):>10.5f}  "
              f"{c.width} | {c.height}")
    cfgs = find_two_cylinder_config(dec)
    print(f"{len(dec.cylinders)} cylinders, {len(cfgs)} two-cylinder configurations")
    return EXIT_YES


def cmd_saddles(args) -> int:
    s = _load_surface(args.surface)
    conns = saddle_connections(s, args.length)
    print(f"{'from':>4}  {'to':>4}  {'length':>10}  holonomy")
    for c in sorted(conns, key=lambda c: (float(c.length_sq), c.start_class, c.end_class, str(c.holonomy))):
        print(f"{c.start_class:>4}  {c.end_class:>4}  {float(c.length_sq) ** 0.5:>10.5f}  {_vec(c.holonomy)}")
    print(f"{len(conns)} saddle connections of length <= {args.length}")
    return EXIT_YES


def cmd_check_self_saddle(args) -> int:
    s = _load_surface(args.surface)
    rep = no_self_saddle_check(s, args.length)
    print(f"{len(rep.connections)} connections from classes {rep.singular_classes}, "
          f"{len(rep.self_connections)} return to their start")
    for a, _, h in rep.self_connections[:10]:
        print(f"  class {a}: {_vec(h)}")
    return EXIT_YES if rep.ok else EXIT_NO


def cmd_unfold(args) -> int:
    b = _table(args)
    if args.table_out:
        _write(args.table_out, io.dump_billiard(b))
    s, _ = bl.zk_unfold(b)
    _write(args.output, io.dump_surface(s))
    print(f"{b.group_order} copies; {s.summary()}", file=sys.stderr if args.output in (None, "-") else sys.stdout)
    return EXIT_YES


def cmd_fold(args) -> int:
    b = _table(args)
    s, fm = bl.zk_unfold(b)
    rec = io.load_path(_read(args.path), s.field)
    for p, _, _ in rec.segments:
        if not 0 <= p < len(s.polygons):
            raise UsageError("path does not live on the unfolding of this table")
    traj = bl.fold_path(fm, _Segments(rec.segments))
    for i, pt in enumerate(traj.points):
        tag = f"  bounce on side {traj.edges[i - 1]}" if 0 < i <= len(traj.edges) else ""
        print(f"{i:>3}  {_vec(pt)}{tag}")
    print(f"{traj.bounces} bounces")
    return EXIT_YES


# -- parser -------------------------------------------------------------------


def _table_flags(p, with_file=True):
    t = p.add_argument_group("billiard table")
    t.add_argument("--square", action="store_true", help="unit square")
    t.add_argument("--triangle", metavar="1/n", help="right triangle with smallest angle pi/n")
    t.add_argument("--equilateral", action="store_true")
    t.add_argument("--half-equilateral", action="store_true", help="30-60-90 triangle")
    t.add_argument("--notched", action="store_true", help="right-angled hexagon with heights 0, 1, sqrt(2)")
    t.add_argument("--regular", type=int, metavar="n", help="regular n-gon")
    if with_file:
        t.add_argument("--billiard", metavar="FILE", help="billiard table file")


def _global_flags(p, default):
    p.add_argument("--budget-length", type=Fraction, default=default,
                   help="length budget for separatrices and decompositions (default 40)")
    p.add_argument("--max-n", type=int, default=default,
                   help=f"approximation pairs tried by witness searches (default {DEFAULT_MAX_N})")
    p.add_argument("--seed", type=int, default=default, help="seed for randomly generated test points (default 0)")


def build_parser() -> argparse.ArgumentParser:
    ap = _Parser(prog="flatblock", description="Finite blocking on translation surfaces and rational billiards.")
    _global_flags(ap, argparse.SUPPRESS)
    ap.set_defaults(budget_length=Fraction(40), max_n=DEFAULT_MAX_N, seed=0)
    common = _Parser(add_help=False)
    _global_flags(common, argparse.SUPPRESS)
    sub = ap.add_subparsers(dest="command", required=True, parser_class=_Parser)
    _add = sub.add_parser

    def add_parser(name, **kw):
        return _add(name, parents=[common], **kw)

    sub.add_parser = add_parser

    p = sub.add_parser("build", help="write a surface file")
    p.add_argument("kind", choices=["ngon", "ngon-normalized", "lshaped", "torus", "two-cylinder",
                                    "fomin-cover", "zk", "irrational-demo", "from-file"])
    p.add_argument("params", nargs="*")
    p.add_argument("-o", "--output")
    p.add_argument("--theta", default=None, help="irrational-demo: angle of the table (informational)")
    _table_flags(p)
    p.set_defaults(func=cmd_build)

    p = sub.add_parser("decide", help="decide the finite blocking property")
    p.add_argument("surface")
    p.add_argument("-o", "--output", help="certificate file")
    p.add_argument("--saddle-length", type=Fraction, default=Fraction(6),
                   help="length bound for candidate directions (default 6)")
    p.add_argument("--directions", type=int, default=12, help="directions tried (default 12)")
    p.set_defaults(func=cmd_decide)

    p = sub.add_parser("block", help="blocking set from a YES certificate")
    p.add_argument("certificate")
    p.add_argument("--O", nargs=3, required=True, metavar=("P", "X", "Y"))
    p.add_argument("--A", nargs=3, required=True, metavar=("P", "X", "Y"))
    p.add_argument("-o", "--output", help="points file")
    p.set_defaults(func=cmd_block)

    p = sub.add_parser("witness", help="unblocked geodesic from a NO certificate")
    p.add_argument("certificate")
    p.add_argument("--avoid", metavar="FILE", help="points file")
    p.add_argument("--random-avoid", type=int, default=0, metavar="K",
                   help="also avoid K random points of the two cylinders (uses --seed)")
    p.add_argument("-o", "--output", help="path file")
    p.add_argument("--svg", help="SVG with the path and the avoided points")
    p.set_defaults(func=cmd_witness)

    p = sub.add_parser("render", help="SVG drawing of a surface")
    p.add_argument("surface")
    p.add_argument("--blockers", metavar="FILE")
    p.add_argument("--path", action="append", metavar="FILE")
    p.add_argument("--cylinders", nargs=2, metavar=("DX", "DY"))
    p.add_argument("--layers", help=f"comma-separated subset of {','.join(LAYERS)}")
    p.add_argument("--scale", type=float, default=100.0)
    p.add_argument("--digits", type=int, default=3)
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_render)

    p = sub.add_parser("trace", help="follow a straight line")
    p.add_argument("surface")
    p.add_argument("--start", nargs=3, required=True, metavar=("P", "X", "Y"))
    p.add_argument("--direction", nargs=2, required=True, metavar=("DX", "DY"))
    p.add_argument("--length", type=Fraction, required=True)
    p.add_argument("--blockers", metavar="FILE")
    p.add_argument("-o", "--output", help="path file")
    p.set_defaults(func=cmd_trace)

    p = sub.add_parser("connect", help="list geodesics between two points")
    p.add_argument("surface")
    p.add_argument("--from", dest="source", nargs=3, required=True, metavar=("P", "X", "Y"))
    p.add_argument("--to", dest="target", nargs=3, required=True, metavar=("P", "X", "Y"))
    p.add_argument("--length", type=Fraction, required=True)
    p.add_argument("--blockers", metavar="FILE")
    p.set_defaults(func=cmd_connect)

    p = sub.add_parser("cylinders", help="cylinder decomposition in a direction")
    p.add_argument("surface")
    p.add_argument("--direction", nargs=2, default=["1", "0"], metavar=("DX", "DY"))
    p.set_defaults(func=cmd_cylinders)

    p = sub.add_parser("saddles", help="list saddle connections")
    p.add_argument("surface")
    p.add_argument("--length", type=Fraction, required=True)
    p.set_defaults(func=cmd_saddles)

    p = sub.add_parser("check-self-saddle", help="look for saddle connections from a singularity to itself")
    p.add_argument("surface")
    p.add_argument("--length", type=Fraction, required=True)
    p.set_defaults(func=cmd_check_self_saddle)

    p = sub.add_parser("unfold", help="unfold a rational billiard table")
    _table_flags(p)
    p.add_argument("--table-out", metavar="FILE", help="also write the table as a billiard file")
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_unfold)

    p = sub.add_parser("fold", help="project a path on the unfolding back to the table")
    _table_flags(p)
    p.add_argument("path")
    p.set_defaults(func=cmd_fold)
    return ap


def main(argv=None) -> int:
    ap = build_parser()
    args = ap.parse_args(argv)
    try:
        return args.func(args)
    except BudgetExceeded as e:
        print(f"flatblock: budget exceeded: {e}", file=sys.stderr)
        return EXIT_BUDGET
    except (UsageError, io.ParseError, SurfaceError, RationalAlpha, bl.IrrationalAngle) as e:
        print(f"flatblock: error: {e}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
