"""Plain-text file formats with exact coordinates.

Every file starts with a header line ``flatblock-<kind> 1``.  Numbers are
written exactly: a field element is the comma-separated list of its
rational coordinates on the power basis ``1, theta, theta^2, ...``.
Lines starting with ``#`` and blank lines are ignored on input.

Surface::

    flatblock-surface 1
    field <c0> <c1> ... <cd> interval <lo> <hi>     (or: field QQ)
    polygon <k>
    vertex <x> <y>                                   (k lines)
    glue <p> <e> <q> <f>                             (p, e) < (q, f)
    mark <name> <p> <x> <y>
    end

Points (avoid sets)::

    flatblock-points 1
    point <p> <x> <y>
    end

Certificate::

    flatblock-certificate 1
    verdict YES|NO|UNKNOWN
    <surface block without its header, up to its end line>
    direction <dx> <dy>            NO: decomposition direction
    config <index>                 NO: index among the configurations in that direction
    widths <w1> <w2>               NO: for re-verification
    ratio <r>                      NO: the larger of w2/w1 and w1/w2
    lattice <ax> <ay> <bx> <by>    YES: covering lattice
    shift <p> <tx> <ty>            YES: one per polygon
    degree <d>                     YES
    budget <key> <value>           UNKNOWN
    end

Billiard table (counterclockwise vertices, interior angles as multiples of pi)::

    flatblock-billiard 1
    field ...
    vertex <x> <y>
    angle <a>                      one per vertex, in order
    end

Path::

    flatblock-path 1
    pair <n> <p> <q>
    holonomy <x> <y>
    segment <p> <x0> <y0> <x1> <y1>
    end
"""
from __future__ import annotations

from dataclasses import dataclass, field as dc_field
from fractions import Fraction

from .exactnum import QQ, FieldElement, NumberField
from .surface import SurfacePoint, SurfacePresentation, build

__all__ = [
    "ParseError",
    "format_element",
    "parse_element",
    "dump_surface",
    "load_surface",
    "dump_points",
    "load_points",
    "Certificate",
    "dump_certificate",
    "load_certificate",
    "dump_billiard",
    "load_billiard",
    "PathRecord",
    "dump_path",
    "load_path",
]

VERSION = "1"


class ParseError(ValueError):
    pass


def _frac(x: Fraction) -> str:
    x = Fraction(x)
    return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"


def format_element(x, F: NumberField) -> str:
    x = F(x)
    return ",".join(_frac(c) for c in x.coords())


def parse_element(tok: str, F: NumberField) -> FieldElement:
    try:
        cs = [Fraction(t) for t in tok.split(",")]
    except (ValueError, ZeroDivisionError) as e:
        raise ParseError(f"bad number {tok!r}") from e
    if len(cs) > F.degree:
        raise ParseError(f"{tok!r} has more than {F.degree} coordinates")
    return F.from_coords(cs + [Fraction(0)] * (F.degree - len(cs)))


def _lines(text: str, kind: str):
    rows = []
    for raw in text.splitlines():
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        rows.append(line.split())
    if not rows or rows[0] != [f"flatblock-{kind}", VERSION]:
        raise ParseError(f"missing header 'flatblock-{kind} {VERSION}'")
    return rows[1:]


# -- surfaces -----------------------------------------------------------------


def _field_line(F: NumberField) -> str:
    if F.degree == 1:
        return "field QQ"
    lo, hi = F.isolating_interval
    return "field " + " ".join(str(c) for c in F.min_poly) + f" interval {_frac(lo)} {_frac(hi)}"


def _parse_field(row) -> NumberField:
    if row[:1] != ["field"]:
        raise ParseError("expected a field line")
    if row[1:] == ["QQ"]:
        return QQ
    try:
        k = row.index("interval")
        coeffs = [int(c) for c in row[1:k]]
        lo, hi = Fraction(row[k + 1]), Fraction(row[k + 2])
    except (ValueError, IndexError) as e:
        raise ParseError("malformed field line") from e
    try:
        return NumberField(coeffs, (lo, hi))
    except ValueError as e:
        raise ParseError(str(e)) from e


def _surface_body(s: SurfacePresentation) -> list[str]:
    F = s.field
    out = [_field_line(F)]
    for poly in s.polygons:
        out.append(f"polygon {len(poly)}")
        for x, y in poly:
            out.append(f"vertex {format_element(x, F)} {format_element(y, F)}")
    for (p, e), (q, f) in sorted(s.gluings.items()):
        if (p, e) < (q, f):
            out.append(f"glue {p} {e} {q} {f}")
    for name in sorted(s.labels):
        pt = s.labels[name]
        out.append(f"mark {name} {pt.polygon} {format_element(pt.x, F)} {format_element(pt.y, F)}")
    out.append("end")
    return out


def dump_surface(s: SurfacePresentation) -> str:
    return "\n".join([f"flatblock-surface {VERSION}"] + _surface_body(s)) + "\n"


def _parse_surface_rows(rows, i=0):
    F = _parse_field(rows[i])
    i += 1
    polys, gl, labels = [], {}, {}
    while i < len(rows):
        row = rows[i]
        i += 1
        try:
            if row[0] == "polygon":
                k = int(row[1])
                verts = []
                for _ in range(k):
                    vr = rows[i]
                    i += 1
                    if vr[0] != "vertex" or len(vr) != 3:
                        raise ParseError("expected a vertex line")
                    verts.append((parse_element(vr[1], F), parse_element(vr[2], F)))
                polys.append(verts)
            elif row[0] == "glue":
                p, e, q, f = (int(t) for t in row[1:5])
                gl[(p, e)] = (q, f)
            elif row[0] == "mark":
                labels[row[1]] = SurfacePoint(int(row[2]), parse_element(row[3], F), parse_element(row[4], F))
            elif row[0] == "end":
                break
            else:
                raise ParseError(f"unknown line {' '.join(row)!r}")
        except (IndexError, ValueError) as e:
            if isinstance(e, ParseError):
                raise
            raise ParseError(f"malformed line {' '.join(row)!r}") from e
    else:
        raise ParseError("missing end line")
    try:
        s = build(F, polys, gl, labels=labels)
    except ValueError as e:
        raise ParseError(f"invalid surface: {e}") from e
    return s, i


def load_surface(text: str) -> SurfacePresentation:
    rows = _lines(text, "surface")
    if not rows:
        raise ParseError("empty surface file")
    s, _ = _parse_surface_rows(rows)
    return s


# -- points -------------------------------------------------------------------


def dump_points(points, F: NumberField) -> str:
    out = [f"flatblock-points {VERSION}"]
    for pt in points:
        out.append(f"point {pt.polygon} {format_element(pt.x, F)} {format_element(pt.y, F)}")
    out.append("end")
    return "\n".join(out) + "\n"


def load_points(text: str, F: NumberField) -> list[SurfacePoint]:
    out = []
    for row in _lines(text, "points"):
        if row[0] == "end":
            return out
        if row[0] != "point" or len(row) != 4:
            raise ParseError(f"bad point line {' '.join(row)!r}")
        try:
            out.append(SurfacePoint(int(row[1]), parse_element(row[2], F), parse_element(row[3], F)))
        except ValueError as e:
            raise ParseError(str(e)) from e
    raise ParseError("missing end line")


# -- certificates -------------------------------------------------------------


@dataclass
class Certificate:
    verdict: str
    surface: SurfacePresentation
    direction: tuple | None = None
    config_index: int | None = None
    widths: tuple | None = None
    ratio: object = None
    lattice: tuple | None = None
    shifts: list = dc_field(default_factory=list)
    degree: int | None = None
    budget: dict = dc_field(default_factory=dict)

    def __eq__(self, other):
        if not isinstance(other, Certificate):
            return NotImplemented
        return dump_certificate(self) == dump_certificate(other)


def dump_certificate(c: Certificate) -> str:
    F = c.surface.field
    fe = lambda x: format_element(x, F)  # noqa: E731
    out = [f"flatblock-certificate {VERSION}", f"verdict {c.verdict}"] + _surface_body(c.surface)
    if c.direction is not None:
        out.append(f"direction {fe(c.direction[0])} {fe(c.direction[1])}")
    if c.config_index is not None:
        out.append(f"config {c.config_index}")
    if c.widths is not None:
        out.append(f"widths {fe(c.widths[0])} {fe(c.widths[1])}")
    if c.ratio is not None:
        out.append(f"ratio {fe(c.ratio)}")
    if c.lattice is not None:
        (ax, ay), (bx, by) = c.lattice
        out.append(f"lattice {fe(ax)} {fe(ay)} {fe(bx)} {fe(by)}")
    for p, (tx, ty) in enumerate(c.shifts):
        out.append(f"shift {p} {fe(tx)} {fe(ty)}")
    if c.degree is not None:
        out.append(f"degree {c.degree}")
    for k in sorted(c.budget):
        out.append(f"budget {k} {c.budget[k]}")
    out.append("end")
    return "\n".join(out) + "\n"


def load_certificate(text: str) -> Certificate:
    rows = _lines(text, "certificate")
    if not rows or rows[0][0] != "verdict" or len(rows[0]) != 2:
        raise ParseError("expected a verdict line")
    verdict = rows[0][1]
    if verdict not in ("YES", "NO", "UNKNOWN"):
        raise ParseError(f"unknown verdict {verdict!r}")
    s, i = _parse_surface_rows(rows, 1)
    F = s.field
    c = Certificate(verdict, s)
    shifts = {}
    for row in rows[i:]:
        try:
            key = row[0]
            if key == "direction":
                c.direction = (parse_element(row[1], F), parse_element(row[2], F))
            elif key == "config":
                c.config_index = int(row[1])
            elif key == "widths":
                c.widths = (parse_element(row[1], F), parse_element(row[2], F))
            elif key == "ratio":
                c.ratio = parse_element(row[1], F)
            elif key == "lattice":
                v = [parse_element(t, F) for t in row[1:5]]
                c.lattice = ((v[0], v[1]), (v[2], v[3]))
            elif key == "shift":
                shifts[int(row[1])] = (parse_element(row[2], F), parse_element(row[3], F))
            elif key == "degree":
                c.degree = int(row[1])
            elif key == "budget":
                c.budget[row[1]] = " ".join(row[2:])
            elif key == "end":
                break
            else:
                raise ParseError(f"unknown line {' '.join(row)!r}")
        except (IndexError, ValueError) as e:
            if isinstance(e, ParseError):
                raise
            raise ParseError(f"malformed line {' '.join(row)!r}") from e
    else:
        raise ParseError("missing end line")
    c.shifts = [shifts[k] for k in sorted(shifts)]
    return c


# -- billiards ----------------------------------------------------------------


def dump_billiard(b) -> str:
    F = b.field
    out = [f"flatblock-billiard {VERSION}", _field_line(F)]
    for x, y in b.polygon:
        out.append(f"vertex {format_element(x, F)} {format_element(y, F)}")
    for a in b.angles:
        out.append(f"angle {_frac(a)}")
    out.append("end")
    return "\n".join(out) + "\n"


def load_billiard(text: str):
    from .billiard import RationalBilliard

    rows = _lines(text, "billiard")
    if not rows:
        raise ParseError("empty billiard file")
    F = _parse_field(rows[0])
    verts, angles = [], []
    for row in rows[1:]:
        try:
            if row[0] == "vertex":
                verts.append((parse_element(row[1], F), parse_element(row[2], F)))
            elif row[0] == "angle":
                angles.append(Fraction(row[1]))
            elif row[0] == "end":
                try:
                    return RationalBilliard(F, tuple(verts), tuple(angles))
                except ValueError as e:
                    raise ParseError(f"invalid billiard: {e}") from e
            else:
                raise ParseError(f"unknown line {' '.join(row)!r}")
        except (IndexError, ValueError, ZeroDivisionError) as e:
            if isinstance(e, ParseError):
                raise
            raise ParseError(f"malformed line {' '.join(row)!r}") from e
    raise ParseError("missing end line")


# -- paths --------------------------------------------------------------------


@dataclass
class PathRecord:
    n: int
    p: int
    q: int
    holonomy: tuple
    segments: list  # (polygon, (x0, y0), (x1, y1))

    def __eq__(self, other):
        if not isinstance(other, PathRecord):
            return NotImplemented
        return (self.n, self.p, self.q, self.holonomy, self.segments) == \
            (other.n, other.p, other.q, other.holonomy, other.segments)


def dump_path(r: PathRecord, F: NumberField) -> str:
    fe = lambda x: format_element(x, F)  # noqa: E731
    out = [f"flatblock-path {VERSION}", f"pair {r.n} {r.p} {r.q}",
           f"holonomy {fe(r.holonomy[0])} {fe(r.holonomy[1])}"]
    for p, a, b in r.segments:
        out.append(f"segment {p} {fe(a[0])} {fe(a[1])} {fe(b[0])} {fe(b[1])}")
    out.append("end")
    return "\n".join(out) + "\n"


def load_path(text: str, F: NumberField) -> PathRecord:
    rows = _lines(text, "path")
    n = p = q = 0
    hol = None
    segs = []
    for row in rows:
        try:
            if row[0] == "pair":
                n, p, q = int(row[1]), int(row[2]), int(row[3])
            elif row[0] == "holonomy":
                hol = (parse_element(row[1], F), parse_element(row[2], F))
            elif row[0] == "segment":
                v = [parse_element(t, F) for t in row[2:6]]
                segs.append((int(row[1]), (v[0], v[1]), (v[2], v[3])))
            elif row[0] == "end":
                return PathRecord(n, p, q, hol, segs)
            else:
                raise ParseError(f"unknown line {' '.join(row)!r}")
        except (IndexError, ValueError) as e:
            if isinstance(e, ParseError):
                raise
            raise ParseError(f"malformed line {' '.join(row)!r}") from e
    raise ParseError("missing end line")
