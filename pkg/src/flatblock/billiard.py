"""Rational polygonal billiards and their unfolding to translation surfaces."""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

from . import _geom as g
from .exactnum import QQ, FieldElement, NumberField, floor
from .surface import (SurfacePoint, SurfacePresentation, _hnf_basis, build)
from .flow import GeodesicPath, REACHED

__all__ = [
    "IrrationalAngle",
    "InvalidReflection",
    "NotAlmostIntegrable",
    "RationalBilliard",
    "FoldingMap",
    "BilliardTrajectory",
    "LatticeBasis",
    "zk_unfold",
    "fold_path",
    "lift_path",
    "is_almost_integrable",
    "almost_integrable_blocking",
    "affine_group",
    "pi_enclosure",
    "unit_square",
    "right_triangle",
    "equilateral_triangle",
    "half_equilateral_triangle",
    "notched_polygon",
    "regular_polygon",
    "blocking_bound",
    "orbit_in_table",
    "BlockingResult",
    "billiard_blocking_report",
]


class IrrationalAngle(ValueError):
    pass


class InvalidReflection(ValueError):
    pass


class NotAlmostIntegrable(ValueError):
    pass


def _reflection(u):
    """Linear reflection fixing the line spanned by ``u``."""
    a, b = u
    n2 = a * a + b * b
    return ((( a * a - b * b) / n2, (2 * a * b) / n2), ((2 * a * b) / n2, (b * b - a * a) / n2))


@dataclass
class RationalBilliard:
    """A simple counterclockwise polygon whose angles are ``angles[i] * pi``.

    Angles are checked to sum to ``(n - 2) pi`` exactly and to agree with
    the vertex coordinates in floating point.
    """

    field: NumberField
    polygon: tuple
    angles: tuple  # Fractions: interior angle at vertex i divided by pi

    def __post_init__(self):
        F = self.field
        self.polygon = tuple((F(x), F(y)) for x, y in self.polygon)
        self.angles = tuple(Fraction(a) for a in self.angles)
        n = len(self.polygon)
        if len(self.angles) != n:
            raise ValueError("one angle per vertex is required")
        if sum(self.angles) != n - 2:
            raise IrrationalAngle("angles do not sum to (n-2) pi")
        if g.sgn(g.signed_area(self.polygon)) <= 0:
            raise ValueError("polygon must be counterclockwise")
        for i in range(n):
            a = self.polygon[i]
            u = g.sub(self.polygon[(i + 1) % n], a)
            w = g.sub(self.polygon[i - 1], a)
            ang = math.atan2(float(g.cross(u, w)), float(g.dot(u, w))) % (2 * math.pi)
            if abs(ang - float(self.angles[i]) * math.pi) > 1e-9:
                raise IrrationalAngle(f"angle at vertex {i} does not match {self.angles[i]} pi")

    @property
    def q(self) -> int:
        """Least common denominator of the angles."""
        out = 1
        for a in self.angles:
            out = math.lcm(out, a.denominator)
        return out

    def edge(self, i: int):
        n = len(self.polygon)
        return g.sub(self.polygon[(i + 1) % n], self.polygon[i])

    @property
    def reflections(self):
        return [_reflection(self.edge(i)) for i in range(len(self.polygon))]

    @property
    def group(self) -> list:
        """Elements of the finite linear reflection group, identity first."""
        F = self.field
        one, zero = F(1), F(0)
        ident = ((one, zero), (zero, one))
        elems = [ident]
        seen = {ident}
        i = 0
        gens = self.reflections
        while i < len(elems):
            for r in gens:
                m = g.matmul(elems[i], r)
                if m not in seen:
                    seen.add(m)
                    elems.append(m)
                    if len(elems) > 4 * 10**4:
                        raise IrrationalAngle("reflection group is too large")
            i += 1
        return elems

    @property
    def group_order(self) -> int:
        return len(self.group)

    @property
    def area(self):
        return g.signed_area(self.polygon)

    def diameter_sq(self):
        best = None
        for a in self.polygon:
            for b in self.polygon:
                d = g.norm2(g.sub(a, b))
                if best is None or d > best:
                    best = d
        return best


def unit_square() -> RationalBilliard:
    h = Fraction(1, 2)
    return RationalBilliard(QQ, ((0, 0), (1, 0), (1, 1), (0, 1)), (h, h, h, h))


def right_triangle(n: int) -> RationalBilliard:
    """Right triangle ``(0,0), (1,0), (1, tan(pi/n))`` over ``Q(tan(pi/n))``."""
    from .exactnum import tan_field as _tan_field

    F, tn = _tan_field(n)
    return RationalBilliard(F, ((0, 0), (1, 0), (1, tn)),
                            (Fraction(1, n), Fraction(1, 2), Fraction(n - 2, 2 * n)))


def equilateral_triangle() -> RationalBilliard:
    from .exactnum import tan_field as _tan_field

    F, r3 = _tan_field(3)  # tan(pi/3) = sqrt(3)
    t = Fraction(1, 3)
    return RationalBilliard(F, ((0, 0), (2, 0), (1, r3)), (t, t, t))


def half_equilateral_triangle() -> RationalBilliard:
    from .exactnum import tan_field as _tan_field

    F, r3 = _tan_field(3)
    return RationalBilliard(F, ((0, 0), (1, 0), (1, r3)),
                            (Fraction(1, 3), Fraction(1, 2), Fraction(1, 6)))


def notched_polygon() -> RationalBilliard:
    """Right-angled hexagon with horizontal sides at heights ``0, 1, sqrt 2``."""
    from .exactnum import make_field

    F = make_field([-2, 0, 1], (Fraction(141, 100), Fraction(142, 100)))
    r2 = F.gen()
    h, th = Fraction(1, 2), Fraction(3, 2)
    return RationalBilliard(F, ((0, 0), (2, 0), (2, 1), (1, 1), (1, r2), (0, r2)),
                            (h, h, h, th, h, h))


# ---------------------------------------------------------------------------
# unfolding


@dataclass
class FoldingMap:
    """Copy ``k`` of the unfolded surface is ``group[k]`` applied to the table, then shifted."""

    billiard: RationalBilliard
    surface: SurfacePresentation
    group: list
    shifts: list
    flipped: list

    def _index_map(self, k: int, i: int) -> int:
        n = len(self.billiard.polygon)
        return (-i) % n if self.flipped[k] else i

    def copy_vertex(self, k: int, i: int) -> int:
        """Index in copy ``k`` of the image of table vertex ``i``."""
        return self._index_map(k, i)

    def copy_edge(self, k: int, e: int) -> int:
        n = len(self.billiard.polygon)
        return (-e - 1) % n if self.flipped[k] else e

    def to_copy(self, k: int, x):
        return g.add(g.matvec(self.group[k], x), self.shifts[k])

    def fold_point(self, pt: SurfacePoint):
        k = pt.polygon
        inv = g.matinv(self.group[k])
        return g.matvec(inv, g.sub(pt.position, self.shifts[k]))

    def lift_point(self, k: int, x) -> SurfacePoint:
        y = self.to_copy(k, x)
        return SurfacePoint(k, y[0], y[1])


def zk_unfold(b: RationalBilliard) -> tuple[SurfacePresentation, FoldingMap]:
    """One copy of the table per element of the reflection group, glued along mirrored sides."""
    grp = b.group
    index = {m: k for k, m in enumerate(grp)}
    refl = b.reflections
    n = len(b.polygon)
    F = b.field
    polys, shifts, flipped = [], [], []
    x_cursor = F(0)
    for m in grp:
        img = [g.matvec(m, v) for v in b.polygon]
        neg = g.det2(m) < 0
        if neg:
            img = [img[0]] + img[1:][::-1]
        xmin = min((v[0] for v in img), key=lambda z: z)
        xmax = max((v[0] for v in img), key=lambda z: z)
        sh = (x_cursor - xmin, F(0))
        x_cursor = x_cursor + (xmax - xmin) + 1
        polys.append([g.add(v, sh) for v in img])
        shifts.append(sh)
        flipped.append(neg)
    fm = FoldingMap(b, None, grp, shifts, flipped)
    gl = {}
    for k, m in enumerate(grp):
        for e in range(n):
            k2 = index[g.matmul(m, refl[e])]
            gl[(k, fm.copy_edge(k, e))] = (k2, fm.copy_edge(k2, e))
    s = build(F, polys, gl)
    fm.surface = s
    return s, fm


@dataclass
class BilliardTrajectory:
    """Polygonal billiard path: ``points[0]`` to ``points[-1]`` bouncing at the interior points."""

    points: list
    edges: list  # edge index of each bounce

    @property
    def length_sq_pieces(self):
        return [g.norm2(g.sub(b, a)) for a, b in zip(self.points, self.points[1:])]

    @property
    def bounces(self) -> int:
        return len(self.edges)


def fold_path(f: FoldingMap, path: GeodesicPath) -> BilliardTrajectory:
    """Project a geodesic on the unfolded surface to the table."""
    pts = []
    edges = []
    b = f.billiard
    for p, a, c in path.segments:
        A = f.fold_point(SurfacePoint(p, *a))
        C = f.fold_point(SurfacePoint(p, *c))
        if g.same_point(A, C):
            continue
        if pts and g.same_point(pts[-1], A):
            # straight continuation inside the table (diagonal crossing) or a bounce
            if len(pts) >= 2 and g.sgn(g.cross(g.sub(pts[-1], pts[-2]), g.sub(C, A))) == 0 and \
                    g.sgn(g.dot(g.sub(pts[-1], pts[-2]), g.sub(C, A))) > 0:
                pts[-1] = C
                continue
            edges.append(_edge_of(b, A))
            pts.append(C)
        else:
            if pts:
                edges.append(_edge_of(b, A))
            pts.extend([A, C] if not pts else [C])
    return BilliardTrajectory(pts, edges)


def _edge_of(b: RationalBilliard, x) -> int:
    n = len(b.polygon)
    for i in range(n):
        if g.on_segment(x, b.polygon[i], b.polygon[(i + 1) % n]):
            return i
    return -1


def lift_path(f: FoldingMap, start_copy: int, traj: BilliardTrajectory) -> GeodesicPath:
    """Unfold a billiard trajectory starting in copy ``start_copy``."""
    b = f.billiard
    refl = b.reflections
    index = {m: k for k, m in enumerate(f.group)}
    k = start_copy
    segs = []
    hol = None
    n = len(b.polygon)
    for i, (x, y) in enumerate(zip(traj.points, traj.points[1:])):
        a, c = f.to_copy(k, x), f.to_copy(k, y)
        segs.append((k, a, c))
        v = g.sub(c, a)
        if hol is not None and g.sgn(g.cross(hol, v)) != 0:
            raise InvalidReflection(f"segment {i} breaks the reflection law")
        if hol is not None and g.sgn(g.dot(hol, v)) <= 0:
            raise InvalidReflection(f"segment {i} reverses direction")
        hol = v if hol is None else g.add(hol, v)
        if i < len(traj.edges):
            e = traj.edges[i]
            if not g.on_segment(y, b.polygon[e], b.polygon[(e + 1) % n]):
                raise InvalidReflection(f"bounce {i} is not on edge {e}")
            k = index[g.matmul(f.group[k], refl[e])]
    start = SurfacePoint(start_copy, *segs[0][1])
    end = SurfacePoint(segs[-1][0], *segs[-1][2])
    return GeodesicPath(start, end, hol, hol, REACHED, _segments=segs)


# ---------------------------------------------------------------------------
# almost integrable tables


@dataclass(frozen=True)
class LatticeBasis:
    v1: tuple
    v2: tuple

    @property
    def det(self):
        return g.cross(self.v1, self.v2)


def affine_group(b: RationalBilliard):
    """Coset representatives ``(matrix, translation)`` of the affine reflection group.

    Representative ``k`` has linear part ``b.group[k]``; also returns the
    Schreier generators of the translation subgroup.
    """
    grp = b.group
    index = {m: k for k, m in enumerate(grp)}
    n = len(b.polygon)
    gens = []
    for i in range(n):
        r = _reflection(b.edge(i))
        v = b.polygon[i]
        gens.append((r, g.sub(v, g.matvec(r, v))))
    F = b.field
    zero = (F(0), F(0))
    reps = {0: (grp[0], zero)}
    order = [0]
    j = 0
    while j < len(order):
        k = order[j]
        m, t = reps[k]
        for r, tr in gens:
            m2 = g.matmul(m, r)
            t2 = g.add(g.matvec(m, tr), t)
            k2 = index[m2]
            if k2 not in reps:
                reps[k2] = (m2, t2)
                order.append(k2)
        j += 1
    trans = []
    for k in range(len(grp)):
        m, t = reps[k]
        for r, tr in gens:
            # reps[k] * gen * reps[k2]^{-1} is a translation
            m2 = g.matmul(m, r)
            t2 = g.add(g.matvec(m, tr), t)
            mk, tk = reps[index[m2]]
            vec = g.sub(t2, tk)
            if not g.is_zero_vec(vec):
                trans.append(vec)
    return [reps[k] for k in range(len(grp))], trans


def _rational(x):
    if isinstance(x, FieldElement):
        return x.to_fraction() if x.is_rational() else None
    return Fraction(x)


def is_almost_integrable(b: RationalBilliard) -> LatticeBasis | None:
    """Basis of the translation subgroup if it is a lattice, ``None`` if it is not discrete."""
    _, trans = affine_group(b)
    if not trans:
        return None
    b1 = trans[0]
    b2 = next((v for v in trans if g.sgn(g.cross(b1, v)) != 0), None)
    if b2 is None:
        return None
    coords = []
    for v in trans:
        a, c = g.solve_basis(b1, b2, v)
        ra, rc = _rational(a), _rational(c)
        if ra is None or rc is None:
            return None
        coords.append((ra, rc))
    basis = _hnf_basis(coords)
    F = b.field
    vs = [g.add(g.scale(b1, F(x)), g.scale(b2, F(y))) for x, y in basis]
    return LatticeBasis(*_reduce_basis(vs[0], vs[1]))


def _reduce_basis(u, v):
    """Gauss-reduced basis, oriented positively, first vector nearest the x-axis."""
    if g.norm2(u) > g.norm2(v):
        u, v = v, u
    while True:
        k = floor(g.dot(u, v) / g.norm2(u) + Fraction(1, 2))
        if k == 0:
            break
        v = g.sub(v, g.scale(u, k))
        if g.norm2(v) < g.norm2(u):
            u, v = v, u
        else:
            break

    def canon(w):
        return g.neg(w) if g.sgn(w[0]) < 0 or (g.sgn(w[0]) == 0 and g.sgn(w[1]) < 0) else w

    u, v = canon(u), canon(v)
    if g.sgn(g.cross(u, v)) < 0:
        u, v = v, u
    return u, v


# -- enclosures ---------------------------------------------------------------

_PI_DIGITS = "3.14159265358979323846264338327950288419716939937510582097494459230781640628620899"


def pi_enclosure(digits: int = 6) -> tuple[Fraction, Fraction]:
    """Rational ``lo < pi < hi``; ``digits <= 2`` gives the classical 333/106, 355/113."""
    if digits <= 2:
        return Fraction(333, 106), Fraction(355, 113)
    digits = min(digits, len(_PI_DIGITS) - 3)
    lo = Fraction(_PI_DIGITS[: digits + 2])
    return lo, lo + Fraction(1, 10 ** digits)


def _enclose(x, bits: int) -> tuple[Fraction, Fraction]:
    if not isinstance(x, FieldElement):
        x = Fraction(x)
        return x, x
    if x.is_rational():
        v = x.to_fraction()
        return v, v
    f = Fraction(float(x))
    eps = Fraction(1, 1 << bits) * (1 + abs(f))
    lo, hi = f - eps, f + eps
    while not (x > lo):
        lo -= eps
    while not (x < hi):
        hi += eps
    return lo, hi


def _sqrt_lo(x: Fraction, bits: int) -> Fraction:
    k = 1 << bits
    return Fraction(math.isqrt(floor(x * k * k)), k) if x > 0 else Fraction(0)


def _sqrt_hi(x: Fraction, bits: int) -> Fraction:
    k = 1 << bits
    r = math.isqrt(-floor(-x * k * k))
    if r * r < x * k * k:
        r += 1
    return Fraction(r, k)


def blocking_bound(b: RationalBilliard, basis: LatticeBasis, bits: int = 40) -> int:
    """``8 q * floor(pi (D / sqrt 3 + (|v1| + |v2|) / 2)^2 / det)`` using the upper enclosure."""
    while True:
        vals = []
        for which in (0, 1):
            pi = pi_enclosure(20 if bits > 40 else 8)[which]
            d2 = _enclose(b.diameter_sq(), bits)[which]
            n1 = _enclose(g.norm2(basis.v1), bits)[which]
            n2 = _enclose(g.norm2(basis.v2), bits)[which]
            det = _enclose(abs(basis.det), bits)[1 - which]
            sq = _sqrt_lo if which == 0 else _sqrt_hi
            a = sq(d2 / 3, bits)
            c = (sq(n1, bits) + sq(n2, bits)) / 2
            vals.append(pi * (a + c) ** 2 / det)
        lo, hi = floor(vals[0]), floor(vals[1])
        if lo == hi or bits > 200:
            return 8 * b.q * hi
        bits *= 2


def _lattice_points(base, basis: LatticeBasis, poly):
    """Points ``base + m v1 + n v2`` in the closed polygon."""
    from .surface import _lattice_points_in_polygon

    return _lattice_points_in_polygon(base, (basis.v1, basis.v2), poly, closed=True)


def orbit_in_table(b: RationalBilliard, basis: LatticeBasis, x) -> list:
    """All points of the affine reflection-group orbit of ``x`` lying in the closed table."""
    reps, _ = affine_group(b)
    out = {}
    for m, t in reps:
        y = g.add(g.matvec(m, x), t)
        for z in _lattice_points(y, basis, b.polygon):
            out[z] = z
    return sorted(out.values(), key=lambda z: (float(z[0]), float(z[1])))


@dataclass
class BlockingResult:
    points: list
    bound: int
    degenerate: bool = False


def almost_integrable_blocking(b: RationalBilliard, basis: LatticeBasis | None, O, A) -> BlockingResult:
    """Midpoint construction: orbits of ``(O + g A) / 2`` plus half-lattice shifts, folded into the table."""
    if basis is None:
        raise NotAlmostIntegrable("translation subgroup is not a lattice")
    F = b.field
    O = (F(O[0]), F(O[1]))
    A = (F(A[0]), F(A[1]))
    reps, _ = affine_group(b)
    half = F(Fraction(1, 2))
    pts = {}
    for m, t in reps:
        gA = g.add(g.matvec(m, A), t)
        mid = g.scale(g.add(O, gA), half)
        for i in (0, 1):
            for j in (0, 1):
                x = g.add(mid, g.add(g.scale(basis.v1, F(Fraction(i, 2))), g.scale(basis.v2, F(Fraction(j, 2)))))
                for z in orbit_in_table(b, basis, x):
                    pts[z] = z
    degenerate = O in pts or A in pts
    pts.pop(O, None)
    pts.pop(A, None)
    out = sorted(pts.values(), key=lambda z: (float(z[0]), float(z[1]), str(z[0]), str(z[1])))
    return BlockingResult(out, blocking_bound(b, basis), degenerate)


def regular_polygon(n: int) -> RationalBilliard:
    """Regular n-gon table inscribed in the unit circle, one vertex at ``(1, 0)``."""
    import sympy

    from .exactnum import common_field

    if n < 3:
        raise ValueError("n must be at least 3")
    exprs = []
    for k in range(n):
        exprs += [sympy.cos(2 * sympy.pi * k / n), sympy.sin(2 * sympy.pi * k / n)]
    F, vals = common_field(*exprs)
    poly = [(vals[2 * k], vals[2 * k + 1]) for k in range(n)]
    ang = Fraction(n - 2, n)
    return RationalBilliard(F, poly, (ang,) * n)


def billiard_blocking_report(b: RationalBilliard, basis: LatticeBasis, O, A, blockers, max_length):
    """Exhaustive unfolding check for an almost integrable table.

    Every billiard path from ``O`` to ``A`` of length at most ``max_length``
    is a straight segment from ``O`` to an image of ``A`` under the affine
    reflection group; it is blocked when some image of a blocker lies on its
    interior.  Returns ``(number of paths, unblocked endpoints)``.
    """
    from ._lattice import SegmentScan

    F = b.field
    reps, _ = affine_group(b)
    v1, v2 = basis.v1, basis.v2

    def lat(p):
        x, y = g.solve_basis(v1, v2, p)
        return (_rational(x), _rational(y))

    O = (F(O[0]), F(O[1]))
    A = (F(A[0]), F(A[1]))
    targets, blk = [], []
    for m, t in reps:
        targets.append(lat(g.add(g.matvec(m, A), t)))
        for p in blockers:
            blk.append(lat(g.add(g.matvec(m, (F(p[0]), F(p[1]))), t)))
    if any(c is None for pt in targets + blk for c in pt):
        raise NotAlmostIntegrable("points are not rational in the lattice frame")
    targets = list(dict.fromkeys(targets))
    scan = SegmentScan(lat(O), targets, blk)
    G11, G12, G22 = g.norm2(v1), g.dot(v1, v2), g.norm2(v2)
    f11, f12, f22 = float(G11), float(G12), float(G22)
    L2 = F(max_length) * F(max_length)
    fl2 = float(L2)

    def norm_le(b1, b2, D):
        val = (f11 * b1 * b1 + 2 * f12 * b1 * b2 + f22 * b2 * b2) / (D * D)
        if abs(val - fl2) > 1e-9 * (1 + fl2):
            return val < fl2
        ex = (G11 * (b1 * b1) + G12 * (2 * b1 * b2) + G22 * (b2 * b2)) / (D * D)
        return ex <= L2

    det = abs(float(g.cross(v1, v2)))
    box = int(float(max_length) * max(math.sqrt(f11), math.sqrt(f22)) / det) + 2
    count, bad = scan.scan(norm_le, box)
    back = [g.add(g.scale(v1, F(x)), g.scale(v2, F(y))) for x, y in bad]
    return count, back
