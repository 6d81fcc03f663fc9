"""Translation surfaces presented as polygons glued by translations.

Every vertex of the presentation is a marked point.  Vertex classes with
cone angle ``2 pi`` are removable; the others are the singularities that
determine the stratum.
"""
from __future__ import annotations

from dataclasses import dataclass, field as dc_field
from fractions import Fraction
from functools import cached_property
from typing import Iterable, Sequence

from . import _geom as g
from .exactnum import QQ, FieldElement, NumberField, cos_field, floor

__all__ = [
    "SurfaceError",
    "EdgeMismatch",
    "NotConnected",
    "OrientationError",
    "ConeAngleError",
    "SingularMatrix",
    "UnsupportedN",
    "NonPositiveParameter",
    "NotACovering",
    "SurfacePoint",
    "Singularity",
    "StratumSignature",
    "SurfacePresentation",
    "BranchedCovering",
    "build",
    "apply_gl2",
    "torus",
    "lattice_torus",
    "l_shaped",
    "two_cylinder_surface",
    "square_tiled",
    "regular_ngon_surface",
    "chord_ratios",
    "double_cover_fomin",
    "verify_covering",
    "covering_from_lattice",
    "relative_period_lattice",
    "IncommensurableInput",
    "cylinder_presentation",
    "normalized_ngon_surface",
    "synthesize_torus_cover",
]


class SurfaceError(ValueError):
    pass


class EdgeMismatch(SurfaceError):
    pass


class NotConnected(SurfaceError):
    pass


class OrientationError(SurfaceError):
    pass


class ConeAngleError(SurfaceError):
    pass


class SingularMatrix(SurfaceError):
    pass


class UnsupportedN(SurfaceError):
    pass


class NonPositiveParameter(SurfaceError):
    pass


class NotACovering(SurfaceError):
    pass


@dataclass(frozen=True)
class SurfacePoint:
    """A point given in the coordinates of one polygon."""

    polygon: int
    x: object
    y: object

    @property
    def position(self):
        return (self.x, self.y)

    def __str__(self) -> str:
        return f"[{self.polygon}]({self.x}, {self.y})"


@dataclass(frozen=True)
class Singularity:
    vertex_class: tuple[tuple[int, int], ...]
    cone_angle: int  # in units of pi
    multiplicity: int

    @property
    def removable(self) -> bool:
        return self.multiplicity == 0


@dataclass(frozen=True)
class StratumSignature:
    multiplicities: tuple[int, ...]

    @property
    def genus(self) -> int:
        return 1 + sum(self.multiplicities) // 2

    def __str__(self) -> str:
        if not self.multiplicities:
            return "H(0)"
        return "H(" + ",".join(str(m) for m in self.multiplicities) + ")"


class SurfacePresentation:
    """Polygons with edge identifications by translation.

    ``gluings`` maps ``(polygon, edge)`` to ``(polygon, edge)``; edge ``e`` of
    a polygon runs from vertex ``e`` to vertex ``e + 1``.
    """

    def __init__(self, field: NumberField, polygons, gluings, labels=None, validate: bool = True):
        self.field = field
        self.polygons: tuple[tuple[tuple, ...], ...] = tuple(
            tuple((field(x), field(y)) for x, y in poly) for poly in polygons)
        gl = {}
        for a, b in dict(gluings).items():
            a, b = (int(a[0]), int(a[1])), (int(b[0]), int(b[1]))
            gl[a] = b
            gl[b] = a
        self.gluings: dict[tuple[int, int], tuple[int, int]] = gl
        self.labels: dict[str, SurfacePoint] = dict(labels or {})
        if validate:
            self._validate()

    # -- basic geometry ----------------------------------------------------
    def vertex(self, p: int, i: int):
        poly = self.polygons[p]
        return poly[i % len(poly)]

    def edge_vector(self, p: int, e: int):
        return g.sub(self.vertex(p, e + 1), self.vertex(p, e))

    def glued(self, p: int, e: int) -> tuple[int, int]:
        return self.gluings[(p, e % len(self.polygons[p]))]

    def edge_translation(self, p: int, e: int):
        """Translation carrying edge ``e`` of ``p`` onto its partner edge."""
        q, f = self.glued(p, e)
        return g.sub(self.vertex(q, f + 1), self.vertex(p, e))

    def edges(self) -> Iterable[tuple[int, int]]:
        for p, poly in enumerate(self.polygons):
            for e in range(len(poly)):
                yield p, e

    def edge_pairs(self) -> list[tuple[tuple[int, int], tuple[int, int]]]:
        return sorted({tuple(sorted((a, b))) for a, b in self.gluings.items()})

    def _validate(self) -> None:
        for p, poly in enumerate(self.polygons):
            if len(poly) < 3:
                raise OrientationError(f"polygon {p} has fewer than 3 vertices")
            if g.sgn(g.signed_area(poly)) <= 0:
                raise OrientationError(f"polygon {p} is not counterclockwise")
            n = len(poly)
            for i in range(n):
                if g.is_zero_vec(self.edge_vector(p, i)):
                    raise OrientationError(f"polygon {p} has a degenerate edge {i}")
            for i in range(n):
                for j in range(i + 2, n):
                    if i == 0 and j == n - 1:
                        continue
                    if g.segments_cross(poly[i], poly[(i + 1) % n], poly[j], poly[(j + 1) % n]):
                        raise OrientationError(f"polygon {p} is not simple (edges {i}, {j})")
        for p, e in self.edges():
            if (p, e) not in self.gluings:
                raise EdgeMismatch(f"edge {(p, e)} is not identified")
            q, f = self.gluings[(p, e)]
            if (q, f) == (p, e):
                raise EdgeMismatch(f"edge {(p, e)} glued to itself")
            if q >= len(self.polygons) or f >= len(self.polygons[q]):
                raise EdgeMismatch(f"edge {(p, e)} glued to missing edge {(q, f)}")
            if not g.is_zero_vec(g.add(self.edge_vector(p, e), self.edge_vector(q, f))):
                raise EdgeMismatch(f"edges {(p, e)} and {(q, f)} are not opposite translates")
        seen = {0}
        stack = [0]
        while stack:
            p = stack.pop()
            for e in range(len(self.polygons[p])):
                q, _ = self.gluings[(p, e)]
                if q not in seen:
                    seen.add(q)
                    stack.append(q)
        if len(seen) != len(self.polygons):
            raise NotConnected("glued complex is not connected")
        gb = sum(k - 1 for k in self.cone_angles)
        if gb != 2 * self.genus - 2:
            raise ConeAngleError("Gauss-Bonnet fails for the computed cone angles")

    # -- vertex classes ------------------------------------------------------
    def corner_sector(self, p: int, i: int):
        """Counterclockwise sector ``[u, w)`` of directions at corner ``(p, i)``."""
        v = self.vertex(p, i)
        return g.sub(self.vertex(p, i + 1), v), g.sub(self.vertex(p, i - 1), v)

    def next_corner(self, p: int, i: int) -> tuple[int, int]:
        q, f = self.glued(p, i - 1)
        return q, f

    @cached_property
    def vertex_classes(self) -> list[tuple[tuple[int, int], ...]]:
        seen = set()
        classes = []
        for p, poly in enumerate(self.polygons):
            for i in range(len(poly)):
                if (p, i) in seen:
                    continue
                cyc = []
                c = (p, i)
                while c not in seen:
                    seen.add(c)
                    cyc.append(c)
                    c = self.next_corner(*c)
                classes.append(tuple(cyc))
        return classes

    @cached_property
    def class_of(self) -> dict[tuple[int, int], int]:
        return {c: k for k, cls in enumerate(self.vertex_classes) for c in cls}

    @cached_property
    def cone_angles(self) -> list[int]:
        """Cone angle of each vertex class as a multiple of ``2 pi``."""
        ref = (self.field.one(), self.field.zero())
        out = []
        for cls in self.vertex_classes:
            k = 0
            for p, i in cls:
                u, w = self.corner_sector(p, i)
                if g.in_sector(u, w, ref):
                    k += 1
            out.append(k)
        return out

    @cached_property
    def singularities(self) -> list[Singularity]:
        return [Singularity(cls, 2 * k, k - 1) for cls, k in zip(self.vertex_classes, self.cone_angles)]

    @cached_property
    def genus(self) -> int:
        V = len(self.vertex_classes)
        E = len(self.gluings) // 2
        F = len(self.polygons)
        chi = V - E + F
        return (2 - chi) // 2

    @cached_property
    def stratum(self) -> StratumSignature:
        return StratumSignature(tuple(sorted(s.multiplicity for s in self.singularities if s.multiplicity > 0)))

    @cached_property
    def area(self):
        total = self.field.zero()
        for poly in self.polygons:
            total = total + g.signed_area(poly)
        return total

    def is_removable_class(self, k: int) -> bool:
        return self.cone_angles[k] == 1

    # -- points ---------------------------------------------------------------
    def point(self, p: int, x, y) -> SurfacePoint:
        return SurfacePoint(p, self.field(x), self.field(y))

    def locate(self, pt: SurfacePoint) -> tuple[str, int]:
        return g.point_in_polygon(pt.position, self.polygons[pt.polygon])

    def representatives(self, pt: SurfacePoint) -> list[SurfacePoint]:
        """All ``(polygon, position)`` descriptions of the same surface point."""
        kind, idx = self.locate(pt)
        if kind == "outside":
            raise SurfaceError(f"{pt} lies outside polygon {pt.polygon}")
        if kind == "inside":
            return [pt]
        if kind == "edge":
            q, f = self.glued(pt.polygon, idx)
            t = self.edge_translation(pt.polygon, idx)
            other = g.add(pt.position, t)
            return [pt, SurfacePoint(q, other[0], other[1])]
        cls = self.vertex_classes[self.class_of[(pt.polygon, idx)]]
        return [SurfacePoint(p, *self.vertex(p, i)) for p, i in cls]

    def canonical(self, pt: SurfacePoint) -> SurfacePoint:
        """Representative with the smallest polygon index (then edge or corner index)."""
        kind, idx = self.locate(pt)
        if kind == "inside":
            return pt
        if kind == "edge":
            q, f = self.glued(pt.polygon, idx)
            if (q, f) < (pt.polygon, idx):
                t = self.edge_translation(pt.polygon, idx)
                other = g.add(pt.position, t)
                return SurfacePoint(q, other[0], other[1])
            return pt
        cls = self.vertex_classes[self.class_of[(pt.polygon, idx)]]
        p, i = min(cls)
        return SurfacePoint(p, *self.vertex(p, i))

    def same_point(self, a: SurfacePoint, b: SurfacePoint) -> bool:
        return self.canonical(a) == self.canonical(b)

    def vertex_class_of_point(self, pt: SurfacePoint) -> int | None:
        kind, idx = self.locate(pt)
        if kind != "vertex":
            return None
        return self.class_of[(pt.polygon, idx)]

    def singularity_points(self, include_removable: bool = True) -> list[SurfacePoint]:
        out = []
        for k, cls in enumerate(self.vertex_classes):
            if include_removable or not self.is_removable_class(k):
                p, i = min(cls)
                out.append(SurfacePoint(p, *self.vertex(p, i)))
        return out

    # -- comparisons -------------------------------------------------------
    def __eq__(self, other) -> bool:
        return (isinstance(other, SurfacePresentation) and self.polygons == other.polygons
                and self.gluings == other.gluings)

    def __hash__(self) -> int:
        return hash(self.polygons)

    def __repr__(self) -> str:
        return (f"SurfacePresentation({len(self.polygons)} polygons, genus {self.genus}, "
                f"{self.stratum})")

    def summary(self) -> str:
        return f"genus {self.genus}, {self.stratum}, area {self.area}"


def build(field: NumberField, polygons, identifications, labels=None) -> SurfacePresentation:
    """Validated surface from raw polygon and gluing data."""
    return SurfacePresentation(field, polygons, identifications, labels=labels, validate=True)


def apply_gl2(M, s: SurfacePresentation) -> SurfacePresentation:
    """Image of ``s`` under the linear map ``M`` (a 2x2 nested sequence)."""
    F = s.field
    M = tuple(tuple(F(x) for x in row) for row in M)
    det = g.det2(M)
    if not det:
        raise SingularMatrix("matrix is not invertible")
    flip = det < 0
    polys = []
    for poly in s.polygons:
        img = [g.matvec(M, v) for v in poly]
        if flip:
            img = [img[0]] + img[1:][::-1]
        polys.append(img)
    if not flip:
        gl = dict(s.gluings)
    else:
        def re(p, e):
            n = len(s.polygons[p])
            return p, (-e - 1) % n
        gl = {re(*a): re(*b) for a, b in s.gluings.items()}
    labels = {}
    for name, pt in s.labels.items():
        x, y = g.matvec(M, pt.position)
        labels[name] = SurfacePoint(pt.polygon, x, y)
    return SurfacePresentation(F, polys, gl, labels=labels, validate=False)


# ---------------------------------------------------------------------------
# builders


def _rect(x0, y0, w, h):
    return [(x0, y0), (x0 + w, y0), (x0 + w, y0 + h), (x0, y0 + h)]


def torus(width=1, height=1, field: NumberField = QQ) -> SurfacePresentation:
    """Rectangle with opposite sides identified."""
    F = field
    return build(F, [_rect(F(0), F(0), F(width), F(height))], {(0, 0): (0, 2), (0, 1): (0, 3)})


def lattice_torus(b1, b2, field: NumberField = QQ) -> SurfacePresentation:
    """The torus ``R^2 / (Z b1 + Z b2)`` as one parallelogram (``b1, b2`` positively oriented)."""
    F = field
    b1 = (F(b1[0]), F(b1[1]))
    b2 = (F(b2[0]), F(b2[1]))
    if g.cross(b1, b2) < 0:
        b1, b2 = b2, b1
    o = (F(0), F(0))
    poly = [o, b1, g.add(b1, b2), b2]
    return build(F, [poly], {(0, 0): (0, 2), (0, 1): (0, 3)})


def l_shaped(a, b, field: NumberField | None = None) -> SurfacePresentation:
    """The L-shaped surface: unit square with a horizontal leg ``a`` and vertical leg ``b``."""
    F = field or _field_of(a, b)
    a, b = F(a), F(b)
    if a <= 0 or b <= 0:
        raise NonPositiveParameter("L-shape parameters must be positive")
    z, one = F(0), F(1)
    poly = [(z, z), (one, z), (one + a, z), (one + a, one), (one, one),
            (one, one + b), (z, one + b), (z, one)]
    gl = {
        (0, 0): (0, 5),  # bottom [0,1] with top of the vertical leg
        (0, 1): (0, 3),  # bottom [1,1+a] with top of the horizontal leg
        (0, 2): (0, 7),  # right side of the horizontal leg with left [0,1]
        (0, 4): (0, 6),  # right side of the vertical leg with left [1,1+b]
    }
    return build(F, [poly], gl)


def _field_of(*vals) -> NumberField:
    for v in vals:
        if isinstance(v, FieldElement) and v.field.degree > 1:
            return v.field
    return QQ


def two_cylinder_surface(w1, h1, w2, h2, l, field: NumberField | None = None) -> SurfacePresentation:
    """Two horizontal cylinders in the standard chart.

    The lower cylinder is ``[0, w1] x [-h1, 0]`` and the upper one is
    ``[w1 - l, w1 - l + w2] x [0, h2]``; they share ``[w1 - l, w1] x {0}``.
    Every other horizontal boundary point ``(x, y_down)`` facing down is glued
    to the point with the same ``x`` facing up.
    """
    F = field or _field_of(w1, h1, w2, h2, l)
    w1, h1, w2, h2, l = (F(v) for v in (w1, h1, w2, h2, l))
    if min(w1, h1, w2, h2, l) <= 0 or l > w1 or l > w2:
        raise NonPositiveParameter("need positive sizes with l <= min(w1, w2)")
    z = F(0)
    x0 = w1 - l
    x1 = x0 + w2
    cuts = sorted({z, x0, w1, x1})

    def between(a, b):
        return [c for c in cuts if a <= c <= b]

    lb, lt = between(z, w1), between(z, w1)
    ub, ut = between(x0, x1), between(x0, x1)
    lower = [(x, -h1) for x in lb] + [(x, z) for x in reversed(lt)]
    upper = [(x, z) for x in ub] + [(x, h2) for x in reversed(ut)]
    lower = _dedupe_corners(lower)
    upper = _dedupe_corners(upper)
    polys = [lower, upper]

    def edge(pi, a, b):
        poly = polys[pi]
        n = len(poly)
        for e in range(n):
            if poly[e] == a and poly[(e + 1) % n] == b:
                return pi, e
        raise AssertionError((pi, a, b))

    gl = {edge(0, (w1, -h1), (w1, z)): edge(0, (z, z), (z, -h1)),
          edge(1, (x1, z), (x1, h2)): edge(1, (x0, h2), (x0, z))}
    for a, b in zip(cuts, cuts[1:]):
        if b <= w1:
            down = edge(0, (a, -h1), (b, -h1))
        else:
            down = edge(1, (a, z), (b, z))
        if a >= x0:
            up = edge(1, (b, h2), (a, h2))
        else:
            up = edge(0, (b, z), (a, z))
        gl[down] = up
        if x0 <= a and b <= w1:
            gl[edge(0, (b, z), (a, z))] = edge(1, (a, z), (b, z))
    return build(F, polys, gl)


def _dedupe_corners(poly):
    out = []
    for v in poly:
        if not out or out[-1] != v:
            out.append(v)
    if out[0] == out[-1]:
        out.pop()
    return out


def square_tiled(right: Sequence[int], up: Sequence[int], side=1, field: NumberField = QQ,
                 positions=None) -> SurfacePresentation:
    """Origami: square ``i`` has right neighbour ``right[i]`` and top neighbour ``up[i]``."""
    F = field
    s = F(side)
    n = len(right)
    polys = []
    for i in range(n):
        x0, y0 = (F(positions[i][0]), F(positions[i][1])) if positions else (F(2 * i) * s, F(0))
        polys.append(_rect(x0, y0, s, s))
    gl = {}
    for i in range(n):
        gl[(i, 1)] = (right[i], 3)
        gl[(i, 2)] = (up[i], 0)
    return build(F, polys, gl)


def chord_ratios(n: int):
    """``d_k = sin(k pi/n) / sin(pi/n)`` for ``k = 0..n`` in ``Q(2cos(pi/n))``."""
    F, t = cos_field(n)
    d = [F(0), F(1)]
    for _ in range(2, n + 1):
        d.append(t * d[-1] - d[-2])
    return F, d


def _ngon_edges(n: int):
    """Edge vectors of the regular n-gon in the frame where e_0 = (1,0), e_1 = (0,1)."""
    F, t = cos_field(n)
    c = t * t - 2  # 2cos(2pi/n)
    e = [(F(1), F(0)), (F(0), F(1))]
    for _ in range(2, n):
        a, b = e[-1], e[-2]
        e.append((c * a[0] - b[0], c * a[1] - b[1]))
    return F, e


def regular_ngon_surface(n: int) -> SurfacePresentation:
    """The translation surface of the right triangle with angle ``pi/n``.

    Odd ``n``: two centrally symmetric regular n-gons with parallel sides
    identified.  Even ``n``: one regular n-gon with opposite sides
    identified.  Coordinates are in an affine frame where two consecutive
    unit sides are ``(1, 0)`` and ``(0, 1)``, so all data lie in
    ``Q(2cos(pi/n))``; the result is a GL(2,R) image of the Euclidean
    picture.
    """
    if n < 3:
        raise UnsupportedN("need n >= 3")
    F, e = _ngon_edges(n)
    verts = [(F(0), F(0))]
    for k in range(n - 1):
        verts.append(g.add(verts[-1], e[k]))
    if n % 2 == 0:
        gl = {(0, k): (0, k + n // 2) for k in range(n // 2)}
        return build(F, [verts], gl)
    xmax = max((v[0] for v in verts), key=lambda x: x)
    xmin = min((v[0] for v in verts), key=lambda x: x)
    shift = xmax - xmin + xmax + 1
    other = [(shift - x, -y) for x, y in verts]
    # start the reflected polygon at its lowest-left vertex so indices stay parallel
    gl = {(0, k): (1, k) for k in range(n)}
    return build(F, [verts, other], gl)


def double_cover_fomin() -> tuple[SurfacePresentation, "BranchedCovering"]:
    """Degree 2 cover of ``R^2/Z^2`` branched over the four half-lattice points.

    Eight squares of side 1/2: square ``(c, r, sheet)`` sits over the base
    square with lower-left corner ``(c/2, r/2)``.  Crossing ``x = 1/2`` in the
    bottom row or ``x = 0`` in the top row switches sheets, which gives
    monodromy ``-1`` around each of A=(0,0), B=(1/2,0), C=(0,1/2), D=(1/2,1/2).
    """
    F = QQ
    idx = {}
    cells = []
    for sheet in (0, 1):
        for r in (0, 1):
            for c in (0, 1):
                idx[(c, r, sheet)] = len(cells)
                cells.append((c, r, sheet))
    right, up, pos = [], [], []
    for c, r, sh in cells:
        flip = (c == 0 and r == 0) or (c == 1 and r == 1)
        right.append(idx[((c + 1) % 2, r, sh ^ int(flip))])
        up.append(idx[(c, (r + 1) % 2, sh)])
        pos.append((Fraction(c, 2) + Fraction(3 * sh, 2), Fraction(r, 2)))
    half = Fraction(1, 2)
    s = square_tiled(right, up, side=half, field=F, positions=pos)
    base = torus()
    shifts = []
    for i, (c, r, sh) in enumerate(cells):
        px, py = pos[i]
        shifts.append((F(Fraction(c, 2) - px), F(Fraction(r, 2) - py)))
    cov = covering_from_lattice(s, ((F(1), F(0)), (F(0), F(1))), shifts, target=base)
    return s, cov


# ---------------------------------------------------------------------------
# coverings of tori


@dataclass
class BranchedCovering:
    """A branched covering onto the torus ``R^2 / Lambda``.

    ``cell_map[p] = (0, t_p)``: a point ``x`` of source polygon ``p`` maps to
    ``x + t_p`` reduced modulo the lattice spanned by ``lattice``; ``target``
    is the torus presented by one fundamental parallelogram (polygon 0).
    """

    source: SurfacePresentation
    target: SurfacePresentation
    cell_map: list[tuple[int, tuple]]
    lattice: tuple[tuple, tuple]
    degree: int
    branch_points: list[SurfacePoint] = dc_field(default_factory=list)

    def reduce(self, v) -> tuple:
        """Representative of ``v`` in the fundamental parallelogram."""
        b1, b2 = self.lattice
        a, b = g.solve_basis(b1, b2, v)
        a = a - floor(a)
        b = b - floor(b)
        return g.add(g.scale(b1, a), g.scale(b2, b))

    def image(self, pt: SurfacePoint) -> SurfacePoint:
        _, t = self.cell_map[pt.polygon]
        x, y = self.reduce(g.add(pt.position, t))
        return SurfacePoint(0, x, y)

    def preimages(self, pt: SurfacePoint) -> list[SurfacePoint]:
        """All source points over a target point, canonical and sorted."""
        out = set()
        src = self.source
        for p, poly in enumerate(src.polygons):
            _, t = self.cell_map[p]
            base = g.sub(pt.position, t)
            for cand in _lattice_points_in_polygon(base, self.lattice, poly):
                out.add(src.canonical(SurfacePoint(p, cand[0], cand[1])))
        return sorted(out, key=_point_key)


def _point_key(pt: SurfacePoint):
    return (pt.polygon, float(pt.x), float(pt.y), str(pt.x), str(pt.y))


def _lattice_points_in_polygon(base, lattice, poly, closed: bool = True):
    """Points ``base + m b1 + n b2`` inside the polygon."""
    b1, b2 = lattice
    coords = [g.solve_basis(b1, b2, g.sub(v, base)) for v in poly]
    amin = floor(min(c[0] for c in coords))
    amax = floor(max(c[0] for c in coords)) + 1
    bmin = floor(min(c[1] for c in coords))
    bmax = floor(max(c[1] for c in coords)) + 1
    out = []
    for m in range(amin, amax + 1):
        for n in range(bmin, bmax + 1):
            cand = g.add(base, g.add(g.scale(b1, m), g.scale(b2, n)))
            kind, _ = g.point_in_polygon(cand, poly)
            if kind == "inside" or (closed and kind != "outside"):
                out.append(cand)
    return out


def _in_lattice(v, lattice) -> bool:
    a, b = g.solve_basis(lattice[0], lattice[1], v)
    for c in (a, b):
        if isinstance(c, FieldElement):
            if not c.is_rational() or c.to_fraction().denominator != 1:
                return False
        elif Fraction(c).denominator != 1:
            return False
    return True


def covering_from_lattice(source: SurfacePresentation, lattice, shifts=None, target=None) -> BranchedCovering:
    """Covering ``x -> x + shift_p mod lattice``; shifts default to ``-(vertex 0)``."""
    F = source.field
    b1, b2 = ((F(lattice[0][0]), F(lattice[0][1])), (F(lattice[1][0]), F(lattice[1][1])))
    if g.cross(b1, b2) < 0:
        b1, b2 = b2, b1
    if shifts is None:
        shifts = [g.neg(poly[0]) for poly in source.polygons]
    shifts = [(F(t[0]), F(t[1])) for t in shifts]
    if target is None:
        target = lattice_torus(b1, b2, field=F)
    covol = g.cross(b1, b2)
    ratio = source.area / covol
    deg = ratio.to_fraction() if isinstance(ratio, FieldElement) and ratio.is_rational() else None
    degree = int(deg) if deg is not None and deg.denominator == 1 else 0
    cov = BranchedCovering(source, target, [(0, t) for t in shifts], (b1, b2), degree)
    cov.branch_points = _branch_points(cov)
    return cov


def _branch_points(cov: BranchedCovering) -> list[SurfacePoint]:
    pts = {}
    for cls in cov.source.vertex_classes:
        p, i = cls[0]
        im = cov.image(SurfacePoint(p, *cov.source.vertex(p, i)))
        pts[(im.x, im.y)] = im
    return sorted(pts.values(), key=_point_key)


@dataclass
class CoveringReport:
    degree: int
    branch_points: list[SurfacePoint]
    ok: bool


def verify_covering(c: BranchedCovering) -> CoveringReport:
    """Check local translation compatibility and constant fibre size."""
    src = c.source
    if len(c.cell_map) != len(src.polygons):
        raise NotACovering("cell_map does not cover every polygon")
    for (p, e), (q, f) in src.gluings.items():
        tau = src.edge_translation(p, e)
        d = g.add(tau, g.sub(c.cell_map[q][1], c.cell_map[p][1]))
        if not _in_lattice(d, c.lattice):
            raise NotACovering(f"gluing {(p, e)} -> {(q, f)} is not compatible with the map")
    covol = g.cross(*c.lattice)
    ratio = src.area / covol
    if not (isinstance(ratio, FieldElement) and ratio.is_rational() and ratio.to_fraction().denominator == 1):
        raise NotACovering(f"area ratio {ratio} is not an integer")
    degree = int(ratio.to_fraction())
    # fibre over a generic point
    F = src.field
    b1, b2 = c.lattice
    for a, b in ((Fraction(3141, 10007), Fraction(2718, 10009)), (Fraction(1618, 10037), Fraction(5772, 10039))):
        y = g.add(g.scale(b1, F(a)), g.scale(b2, F(b)))
        count = 0
        boundary = False
        for p, poly in enumerate(src.polygons):
            base = g.sub(y, c.cell_map[p][1])
            for cand in _lattice_points_in_polygon(base, c.lattice, poly, closed=True):
                kind, _ = g.point_in_polygon(cand, poly)
                if kind != "inside":
                    boundary = True
                count += 1
        if not boundary:
            break
    if boundary:
        raise NotACovering("could not find a generic test point")
    if count != degree:
        raise NotACovering(f"fibre has {count} points, expected {degree}")
    if c.degree and c.degree != degree:
        raise NotACovering(f"declared degree {c.degree} differs from {degree}")
    return CoveringReport(degree, _branch_points(c), True)


def relative_period_lattice(s: SurfacePresentation):
    """Z-basis of the group generated by edge vectors, or ``None`` if it is not discrete."""
    vecs = []
    for p, e in s.edges():
        v = s.edge_vector(p, e)
        if not g.is_zero_vec(v):
            vecs.append(v)
    b1 = vecs[0]
    b2 = next((v for v in vecs if g.sgn(g.cross(b1, v)) != 0), None)
    if b2 is None:
        return None
    coords = []
    for v in vecs:
        a, b = g.solve_basis(b1, b2, v)
        ra = a.to_fraction() if isinstance(a, FieldElement) and a.is_rational() else (a if isinstance(a, Fraction) else None)
        rb = b.to_fraction() if isinstance(b, FieldElement) and b.is_rational() else (b if isinstance(b, Fraction) else None)
        if ra is None or rb is None:
            return None
        coords.append((ra, rb))
    basis = _hnf_basis(coords)
    F = s.field
    out = []
    for a, b in basis:
        out.append(g.add(g.scale(b1, F(a)), g.scale(b2, F(b))))
    if g.cross(out[0], out[1]) < 0:
        out = [out[1], out[0]]
    return tuple(out)


def _hnf_basis(vectors):
    """Z-basis of a rank-2 subgroup of Q^2 generated by ``vectors``."""
    from math import gcd as _gcd

    den = 1
    for a, b in vectors:
        for x in (a, b):
            den = den * x.denominator // _gcd(den, x.denominator)
    ints = [(int(a * den), int(b * den)) for a, b in vectors]
    # column-style reduction to a 2x2 upper triangular basis
    rows = [list(v) for v in ints if v != (0, 0)]
    # gcd on first coordinate
    basis = []
    while True:
        nz = [r for r in rows if r[0] != 0]
        if len(nz) <= 1:
            break
        nz.sort(key=lambda r: abs(r[0]))
        piv = nz[0]
        new = [piv]
        for r in rows:
            if r is piv:
                continue
            if r[0] != 0:
                q = r[0] // piv[0]
                r = [r[0] - q * piv[0], r[1] - q * piv[1]]
            new.append(r)
        rows = [r for r in new if r != [0, 0]]
    first = next(r for r in rows if r[0] != 0)
    g2 = 0
    for r in rows:
        if r is not first:
            g2 = _gcd(g2, r[1])
    if g2 == 0:
        raise ValueError("vectors do not span a lattice")
    basis = [(Fraction(first[0], den), Fraction(first[1], den)), (Fraction(0), Fraction(g2, den))]
    return basis


# ---------------------------------------------------------------------------
# re-presentation along a cylinder decomposition


class IncommensurableInput(SurfaceError):
    pass


def cylinder_presentation(decomp) -> SurfacePresentation:
    """Cut the surface along the saddle connections of a decomposition and reglue.

    Each cylinder becomes one parallelogram with horizontal top and bottom
    (a rectangle whenever a bottom and a top vertex line up vertically).
    Bottom and top sides are subdivided at the saddle connection endpoints
    and glued as the saddle connections dictate; the slanted sides of each
    parallelogram are glued to each other.  The result lives in the frame
    of the decomposition, where the cylinders are horizontal.
    """
    polys, owners = [], []
    y0 = None
    for ci, c in enumerate(decomp.cylinders):
        w, h = c.width, c.height
        bot = sorted(((c._mod(off), sidx) for sidx, off in c.bottom), key=lambda t: t[0])
        top = sorted(((c._mod(off), sidx) for sidx, off in c.top), key=lambda t: t[0])
        ub = bot[0][0]
        top_starts = {u for u, _ in top}
        ut = ub if ub in top_starts else top[0][0]
        tau = c._mod(ut - ub)
        if tau > w / 2:
            tau = tau - w
        base_y = y0 if y0 is not None else h * 0
        verts, tags = [], []
        for u, sidx in bot:
            verts.append((c._mod(u - ub), base_y))
            tags.append(("bot", sidx))
        verts.append((w, base_y))
        tags.append(("right", ci))
        tops = sorted(((c._mod(u - ut), sidx) for u, sidx in top), key=lambda t: t[0])
        # top side runs right to left, one edge per saddle connection
        verts.append((tau + w, base_y + h))
        tags.append(("top", tops[-1][1]))
        for k in range(len(tops) - 1, 0, -1):
            verts.append((tau + tops[k][0], base_y + h))
            tags.append(("top", tops[k - 1][1]))
        verts.append((tau, base_y + h))
        tags.append(("left", ci))
        cleaned, ctags = verts, tags
        polys.append(cleaned)
        owners.append(ctags)
        y0 = base_y + h + 1
    # edge i of polygon p goes from vertex i to i+1 and carries tag i
    where = {}
    for p, tags in enumerate(owners):
        for i, t in enumerate(tags):
            where.setdefault(t, []).append((p, i))
    gl = {}
    for (kind, key), locs in where.items():
        if kind == "bot":
            gl[locs[0]] = where[("top", key)][0]
        elif kind == "right":
            gl[locs[0]] = where[("left", key)][0]
    return build(decomp.sheared.field, polys, gl)


def normalized_ngon_surface(n: int) -> SurfacePresentation:
    """Regular n-gon surface re-presented along its short-diagonal cylinders.

    The result is horizontal two-cylinder data ``w1 = l = d2``,
    ``w2 = d2 + d4``, ``h1 = d1``, ``h2 = d3`` with ``d1 = 1``; the
    configuration is attached as ``marked_config``.
    """
    from .flow import decompose, find_two_cylinder_config

    if n < 5 or n == 6:
        raise UnsupportedN(f"no normalized two-cylinder form for n={n}")
    s = regular_ngon_surface(n)
    F = s.field
    _, d = chord_ratios(n)
    dec = decompose(s, (F(1), F(1)), 64)
    if dec is None:
        raise SurfaceError("short-diagonal direction did not decompose")
    rect = cylinder_presentation(dec)
    w_target = d[2]
    stretch = ((w_target / _pick_width(dec, d), F(0)), (F(0), F(1)))
    out = apply_gl2(stretch, rect)
    hdec = decompose(out, (F(1), F(0)), 64)
    want = (d[2], d[1], d[2] + d[4], d[3], d[2])
    for cfg in find_two_cylinder_config(hdec):
        if (cfg.w1, cfg.h1, cfg.w2, cfg.h2, cfg.l) == want:
            out.__dict__["marked_config"] = cfg
            return out
    raise SurfaceError(f"expected configuration not found for n={n}")


def _pick_width(dec, d):
    """Width of the narrower of the two cylinders (the one carrying ``w1``)."""
    return min((c.width for c in dec.cylinders), key=lambda w: w)


def synthesize_torus_cover(s: SurfacePresentation, dir1, dir2, decomp1, decomp2):
    """Covering of a torus branched over one point, from two commensurable decompositions.

    Returns ``None`` when the relative periods do not form a lattice.
    """
    for dec in (decomp1, decomp2):
        if dec is None:
            raise IncommensurableInput("decomposition missing")
        w0 = dec.cylinders[0].width
        for c in dec.cylinders:
            for ratio in (c.width / w0, c.height / c.width):
                if isinstance(ratio, FieldElement) and not ratio.is_rational():
                    raise IncommensurableInput("cylinder data are not commensurable")
    if g.sgn(g.cross(tuple(dir1.vector if hasattr(dir1, "vector") else dir1),
                     tuple(dir2.vector if hasattr(dir2, "vector") else dir2))) == 0:
        raise IncommensurableInput("directions are parallel")
    lat = relative_period_lattice(s)
    if lat is None:
        return None
    cov = covering_from_lattice(s, lat)
    return cov
