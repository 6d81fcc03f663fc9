"""Straight-line flow on translation surfaces.

Geodesics are traced exactly across edge identifications.  Connecting
geodesics and saddle connections are enumerated by a visibility search
over a triangulation: every node is a developed triangle together with the
open wedge of directions from the source that reach it without meeting an
obstacle.  Cylinder decompositions are obtained by cutting along all
saddle connections in a direction.
"""
from __future__ import annotations

from dataclasses import dataclass, field as dc_field
from fractions import Fraction
from typing import Callable, Iterable, Sequence

from . import _geom as g
from .exactnum import FieldElement, floor
from .surface import SurfacePoint, SurfacePresentation, apply_gl2

__all__ = [
    "ZeroDirection",
    "Direction",
    "GeodesicPath",
    "SaddleConnection",
    "Cylinder",
    "CylinderDecomposition",
    "TwoCylinderConfig",
    "trace",
    "connecting_geodesics",
    "path_hits",
    "saddle_connections",
    "saddle_directions",
    "decompose",
    "find_two_cylinder_config",
    "triangulate",
]

REACHED = "ReachedTarget"
SINGULAR = "HitSingularity"
BUDGET = "BudgetExhausted"
BLOCKED = "Blocked"


class ZeroDirection(ValueError):
    pass


# ---------------------------------------------------------------------------
# scalars


def _fast_scalar(x):
    if isinstance(x, FieldElement) and x.field.degree == 1:
        return Fraction(x.nums[0], x.den)
    return x


class _Kernel:
    """Surface data in the cheapest exact scalar type (Fraction when rational)."""

    def __init__(self, s: SurfacePresentation):
        self.s = s
        self.rational = s.field.degree == 1
        conv = _fast_scalar if self.rational else (lambda x: x)
        self.conv = conv
        self.polys = [tuple((conv(x), conv(y)) for x, y in poly) for poly in s.polygons]
        self.trans = {}
        for (p, e) in s.gluings:
            q, f = s.gluings[(p, e)]
            a = self.polys[p][e]
            b = self.polys[q][(f + 1) % len(self.polys[q])]
            self.trans[(p, e)] = (q, f, g.sub(b, a))
        self.removable = [k == 1 for k in s.cone_angles]

    def pt(self, v):
        return (self.conv(v[0]), self.conv(v[1]))

    def back(self, v):
        F = self.s.field
        return (F(v[0]), F(v[1]))

    def reps(self, pt: SurfacePoint):
        return [(r.polygon, self.pt(r.position)) for r in self.s.representatives(pt)]


def _kernel(s: SurfacePresentation) -> _Kernel:
    k = s.__dict__.get("_flow_kernel")
    if k is None:
        k = _Kernel(s)
        s.__dict__["_flow_kernel"] = k
    return k


def _is_exact_square(x):
    """Exact square root of a nonnegative rational, else ``None``."""
    from math import isqrt

    if isinstance(x, FieldElement):
        if not x.is_rational():
            return None
        x = x.to_fraction()
    x = Fraction(x)
    if x < 0:
        return None
    a, b = isqrt(x.numerator), isqrt(x.denominator)
    if a * a == x.numerator and b * b == x.denominator:
        return Fraction(a, b)
    return None


# ---------------------------------------------------------------------------
# directions and paths


@dataclass(frozen=True)
class Direction:
    """Oriented direction scaled by a positive factor so that ``|dy| = 1`` (or ``|dx| = 1``)."""

    dx: object
    dy: object

    @staticmethod
    def of(dx, dy) -> "Direction":
        if g.sgn(dy) != 0:
            c = dy if g.sgn(dy) > 0 else -dy
        elif g.sgn(dx) != 0:
            c = dx if g.sgn(dx) > 0 else -dx
        else:
            raise ZeroDirection("direction vector is zero")
        return Direction(dx / c, dy / c)

    def line_key(self) -> "Direction":
        """Unoriented canonical form: ``dy = 1``, or ``dx = 1`` for horizontal lines."""
        if g.sgn(self.dy) != 0:
            return Direction(self.dx / self.dy, self.dy / self.dy)
        return Direction(self.dx / self.dx, self.dy)

    @property
    def vector(self):
        return (self.dx, self.dy)

    def __str__(self) -> str:
        return f"({self.dx}, {self.dy})"


@dataclass
class GeodesicPath:
    """A geodesic segment as a list of straight pieces ``(polygon, a, b)``.

    The Euclidean length is generally not in the coordinate field, so the
    exact invariant is the holonomy vector and ``length_sq``.
    """

    start: SurfacePoint
    end: SurfacePoint | None
    direction: tuple
    holonomy: tuple
    terminal: str
    _segments: list | None = None
    _builder: Callable[[], list] | None = dc_field(default=None, repr=False)
    vertices_passed: int = 0

    @property
    def segments(self) -> list:
        if self._segments is None:
            self._segments = self._builder()
        return self._segments

    @property
    def length_sq(self):
        return g.norm2(self.holonomy)

    @property
    def length(self) -> float:
        return float(self.length_sq) ** 0.5

    def points(self) -> list[SurfacePoint]:
        out = []
        for p, a, b in self.segments:
            out.append(SurfacePoint(p, a[0], a[1]))
        if self.segments:
            p, a, b = self.segments[-1]
            out.append(SurfacePoint(p, b[0], b[1]))
        return out


@dataclass(frozen=True)
class SaddleConnection:
    start_class: int
    end_class: int
    holonomy: tuple
    start_corner: tuple[int, int]
    path: GeodesicPath | None = None

    @property
    def length_sq(self):
        return g.norm2(self.holonomy)

    @property
    def direction(self) -> Direction:
        return Direction.of(*self.holonomy)


# ---------------------------------------------------------------------------
# tracing


def _exit(poly, x, d, excl):
    """First boundary event of the ray ``x + t d`` (t > 0) inside a polygon."""
    n = len(poly)
    best = None
    for j in range(n):
        if j in excl:
            continue
        r = g.line_param(x, d, poly[j], poly[(j + 1) % n])
        if r is None:
            continue
        t, sp = r
        if g.sgn(t) <= 0 or g.sgn(sp) < 0 or g.sgn(sp - 1) > 0:
            continue
        if best is None or t < best[0]:
            best = (t, j, sp)
    return best


def _first_hit(points, a, b, d, skip_start: bool):
    """Nearest point of ``points`` on the segment ``[a, b]`` (excluding ``a`` if asked)."""
    best = None
    for q in points:
        if skip_start and g.same_point(q, a):
            continue
        if g.on_segment(q, a, b):
            t = g.dot(g.sub(q, a), d)
            if best is None or t < best[0]:
                best = (t, q)
    return best


class _Walk:
    """Exact straight-line walk; collects every target hit until it stops."""

    def __init__(self, K: _Kernel, d, t0, tcap_sq, targets, blockers, stop_any: bool,
                 all_hits: bool):
        self.K = K
        self.d = d
        self.t0 = t0
        self.tcap_sq = tcap_sq  # (t0 + t)^2 <= tcap_sq
        self.targets = targets
        self.blockers = blockers
        self.stop_any = stop_any
        self.all_hits = all_hits
        self.segments = []
        self.t = 0
        self.hits = []  # (t, segment count, point, polygon, segment start)
        self.vertex_hits = []
        self.terminal = None
        self.end = None
        self.vertices = 0

    def _within(self, t) -> bool:
        tt = self.t0 + t
        return tt * tt <= self.tcap_sq

    def _segment(self, p, a, b, dt) -> bool:
        """Append segment; return False if the walk stops inside it."""
        d = self.d
        skip = True
        tl = self.targets.get(p, ())
        bl = self.blockers.get(p, ())
        bh = _first_hit(bl, a, b, d, skip) if bl else None
        cap_t = None
        if not self._within(self.t + dt):
            cap = _is_exact_square(self.tcap_sq)
            if cap is not None:
                cap_t = cap - self.t0 - self.t
        # targets in order along the segment
        if tl:
            hits = []
            for q in tl:
                if g.same_point(q, a) or not g.on_segment(q, a, b):
                    continue
                hits.append((g.dot(g.sub(q, a), d) / g.norm2(d), q))
            hits.sort(key=lambda h: h[0])
            for th, q in hits:
                if bh is not None and g.dot(g.sub(bh[1], a), d) / g.norm2(d) < th:
                    break
                if not self._within(self.t + th):
                    break
                self.hits.append((self.t + th, len(self.segments), q, p, a))
                if not self.all_hits:
                    self.segments.append((p, a, q))
                    self.t += th
                    self.terminal = REACHED
                    self.end = (p, q)
                    return False
        if bh is not None:
            tb = g.dot(g.sub(bh[1], a), d) / g.norm2(d)
            if self._within(self.t + tb):
                self.segments.append((p, a, bh[1]))
                self.t += tb
                self.terminal = BLOCKED
                self.end = (p, bh[1])
                return False
        if not self._within(self.t + dt):
            if cap_t is not None and g.sgn(cap_t) > 0:
                y = g.add(a, g.scale(d, cap_t))
                self.segments.append((p, a, y))
                self.t += cap_t
                self.end = (p, y)
            else:
                self.end = (p, a)
            self.terminal = BUDGET
            return False
        self.segments.append((p, a, b))
        self.t += dt
        return True

    def run_inside(self, p, x, excl):
        K = self.K
        d = self.d
        while True:
            poly = K.polys[p]
            ev = _exit(poly, x, d, excl)
            if ev is None:
                raise RuntimeError("ray left the polygon without crossing its boundary")
            t, j, sp = ev
            y = g.add(x, g.scale(d, t))
            if not self._segment(p, x, y, t):
                return
            n = len(poly)
            if g.sgn(sp) == 0 or g.sgn(sp - 1) == 0:
                if not self.at_vertex(p, j if g.sgn(sp) == 0 else (j + 1) % n):
                    return
                p, x, excl = self._next
                continue
            q, f, tau = K.trans[(p, j)]
            p, x, excl = q, g.add(y, tau), (f,)

    def _resume(self):
        p, x, excl = self._next
        self.run_inside(p, x, excl)

    def at_vertex(self, p, k) -> bool:
        """Handle arrival at vertex ``k`` of ``p``; sets ``_next`` and returns True to go on."""
        K = self.K
        s = K.s
        while True:
            self.vertices += 1
            cls = s.class_of[(p, k)]
            if self.stop_any or not K.removable[cls]:
                self.terminal = SINGULAR
                self.end = (p, K.polys[p][k])
                return False
            q, m = _sector_corner(K, cls, self.d)
            poly = K.polys[q]
            n = len(poly)
            u = g.sub(poly[(m + 1) % n], poly[m])
            if g.sgn(g.cross(u, self.d)) == 0:
                dt = u[0] / self.d[0] if g.sgn(self.d[0]) != 0 else u[1] / self.d[1]
                if not self._segment(q, poly[m], poly[(m + 1) % n], dt):
                    return False
                p, k = q, (m + 1) % n
                continue
            self._next = (q, poly[m], (m, (m - 1) % n))
            return True


def _sector_corner(K: _Kernel, cls: int, d, corner=None):
    s = K.s
    found = []
    for p, i in s.vertex_classes[cls]:
        poly = K.polys[p]
        n = len(poly)
        u = g.sub(poly[(i + 1) % n], poly[i])
        w = g.sub(poly[(i - 1) % n], poly[i])
        if g.in_sector(u, w, d):
            found.append((p, i))
    if corner is not None:
        if tuple(corner) not in found:
            raise ValueError(f"direction does not leave through corner {corner}")
        return tuple(corner)
    if len(found) != 1:
        raise ValueError("direction leaves a cone point through several sheets; pass corner=")
    return found[0]


def _group(K: _Kernel, pts: Iterable[SurfacePoint]):
    out: dict[int, list] = {}
    for pt in pts:
        for p, v in K.reps(pt):
            out.setdefault(p, []).append(v)
    return out


def _start_walk(K: _Kernel, walk: _Walk, start: SurfacePoint, corner=None):
    s = K.s
    d = walk.d
    p = start.polygon
    x = K.pt(start.position)
    kind, idx = s.locate(start)
    if kind == "inside":
        walk.run_inside(p, x, ())
        return
    if kind == "edge":
        poly = K.polys[p]
        n = len(poly)
        ev = g.sub(poly[(idx + 1) % n], poly[idx])
        c = g.sgn(g.cross(ev, d))
        if c > 0:
            walk.run_inside(p, x, (idx,))
        elif c < 0:
            q, f, tau = K.trans[(p, idx)]
            walk.run_inside(q, g.add(x, tau), (f,))
        else:
            if g.sgn(g.dot(ev, d)) > 0:
                k, b = (idx + 1) % n, poly[(idx + 1) % n]
            else:
                k, b = idx, poly[idx]
            dt = (b[0] - x[0]) / d[0] if g.sgn(d[0]) != 0 else (b[1] - x[1]) / d[1]
            if walk._segment(p, x, b, dt) and walk.at_vertex(p, k):
                walk._resume()
        return
    cls = s.class_of[(p, idx)]
    q, m = _sector_corner(K, cls, d, corner)
    poly = K.polys[q]
    n = len(poly)
    u = g.sub(poly[(m + 1) % n], poly[m])
    if g.sgn(g.cross(u, d)) == 0:
        dt = u[0] / d[0] if g.sgn(d[0]) != 0 else u[1] / d[1]
        if walk._segment(q, poly[m], poly[(m + 1) % n], dt) and walk.at_vertex(q, (m + 1) % n):
            walk._resume()
        return
    walk.run_inside(q, poly[m], (m, (m - 1) % n))


def _path_from_walk(K: _Kernel, start: SurfacePoint, walk: _Walk, d, prefix=None, hol0=None):
    segs = list(prefix or []) + [(p, K.back(a), K.back(b)) for p, a, b in walk.segments]
    hol = g.scale(d, walk.t)
    if hol0 is not None:
        hol = g.add(hol0, hol)
    end = None
    if walk.end is not None:
        p, v = walk.end
        end = SurfacePoint(p, *K.back(v))
    return GeodesicPath(start, end, K.back(d), K.back(hol), walk.terminal, _segments=segs,
                        vertices_passed=walk.vertices)


def trace(s: SurfacePresentation, start: SurfacePoint, direction, max_length, *,
          corner=None, targets: Sequence[SurfacePoint] = (), blockers: Sequence[SurfacePoint] = (),
          stop_at_vertices: bool = False) -> GeodesicPath:
    """Follow the straight line from ``start`` in ``direction`` for at most ``max_length``.

    The walk stops at the first target point, at a blocker, at a
    non-removable singularity (any vertex when ``stop_at_vertices``), or when
    the length budget runs out.  Removable vertices are passed straight
    through.  When ``start`` is a cone point of angle greater than ``2 pi``
    the outgoing sheet is chosen by ``corner=(polygon, vertex)``.
    The budget stop is exact when the stopping point has coordinates in the
    field; otherwise the walk ends at the last polygon side crossed within
    the budget.
    """
    K = _kernel(s)
    d = direction.vector if isinstance(direction, Direction) else direction
    d = K.pt(d)
    if g.is_zero_vec(d):
        raise ZeroDirection("direction vector is zero")
    L = K.conv(s.field(max_length)) if not isinstance(max_length, (int, Fraction)) else Fraction(max_length)
    tcap_sq = (L * L) / g.norm2(d)
    walk = _Walk(K, d, 0, tcap_sq, _group(K, targets), _group(K, blockers), stop_at_vertices, False)
    _start_walk(K, walk, start, corner)
    return _path_from_walk(K, start, walk, d)


def path_hits(path: GeodesicPath, blockers: Iterable[SurfacePoint], s: SurfacePresentation | None = None) -> bool:
    """True when some blocker lies on the path, its two endpoints excluded.

    Blockers are compared in every polygon they are represented in, so pass
    the surface ``s`` when blockers may sit on edges or vertices.
    """
    segs = path.segments
    if not segs:
        return False
    reps: dict[int, list] = {}
    for b in blockers:
        rr = s.representatives(b) if s is not None else [b]
        for r in rr:
            reps.setdefault(r.polygon, []).append(r.position)
    first = segs[0][1]
    last = segs[-1][2]
    for idx, (p, a, b) in enumerate(segs):
        for q in reps.get(p, ()):
            if not g.on_segment(q, a, b):
                continue
            if idx == 0 and g.same_point(q, first):
                continue
            if idx == len(segs) - 1 and g.same_point(q, last):
                continue
            return True
    return False


# ---------------------------------------------------------------------------
# triangulation


def _ear_clip(poly) -> list[tuple[int, int, int]]:
    idx = list(range(len(poly)))
    tris = []
    while len(idx) > 3:
        m = len(idx)
        for a in range(m):
            i0, i1, i2 = idx[a - 1], idx[a], idx[(a + 1) % m]
            if g.orient(poly[i0], poly[i1], poly[i2]) <= 0:
                continue
            ok = True
            for j in idx:
                if j in (i0, i1, i2):
                    continue
                pj = poly[j]
                if (g.orient(poly[i0], poly[i1], pj) >= 0 and g.orient(poly[i1], poly[i2], pj) >= 0
                        and g.orient(poly[i2], poly[i0], pj) >= 0):
                    ok = False
                    break
            if ok:
                tris.append((i0, i1, i2))
                idx.pop(a)
                break
        else:
            raise RuntimeError("ear clipping failed")
    tris.append(tuple(idx))
    return tris


class Triangulation:
    """Triangles of all polygons with their neighbours across every side."""

    def __init__(self, s: SurfacePresentation):
        K = _kernel(s)
        self.K = K
        self.tris: list[tuple[int, tuple[int, int, int]]] = []
        self.pts: list[tuple] = []
        by_poly: dict[int, list[int]] = {}
        edge_owner = {}
        for p, poly in enumerate(K.polys):
            for tri in _ear_clip(poly):
                k = len(self.tris)
                self.tris.append((p, tri))
                self.pts.append(tuple(poly[i] for i in tri))
                by_poly.setdefault(p, []).append(k)
                for j in range(3):
                    edge_owner[(p, tri[j], tri[(j + 1) % 3])] = (k, j)
        self.by_poly = by_poly
        zero = K.conv(s.field(0))
        self.nbr: list[list[tuple[int, int, tuple]]] = []
        for k, (p, tri) in enumerate(self.tris):
            n = len(K.polys[p])
            row = []
            for j in range(3):
                a, b = tri[j], tri[(j + 1) % 3]
                if b == (a + 1) % n:
                    q, f, tau = K.trans[(p, a)]
                    m = len(K.polys[q])
                    k2, j2 = edge_owner[(q, f, (f + 1) % m)]
                    row.append((k2, j2, tau))
                else:
                    k2, j2 = edge_owner[(p, b, a)]
                    row.append((k2, j2, (zero, zero)))
            self.nbr.append(row)

    def containing(self, p: int, x) -> list[int]:
        out = []
        for k in self.by_poly[p]:
            a, b, c = self.pts[k]
            if g.orient(a, b, x) >= 0 and g.orient(b, c, x) >= 0 and g.orient(c, a, x) >= 0:
                out.append(k)
        return out


def triangulate(s: SurfacePresentation) -> Triangulation:
    t = s.__dict__.get("_flow_tri")
    if t is None:
        t = Triangulation(s)
        s.__dict__["_flow_tri"] = t
    return t


# ---------------------------------------------------------------------------
# visibility search


class _Node:
    __slots__ = ("k", "T", "r", "l", "entry", "exits", "parent", "origin", "root")

    def __init__(self, k, T, r, l, entry, exits, parent, origin, root):
        self.k, self.T, self.r, self.l = k, T, r, l
        self.entry, self.exits, self.parent = entry, exits, parent
        self.origin, self.root = origin, root


def _strict_in(r, l, v) -> bool:
    return g.sgn(g.cross(r, v)) > 0 and g.sgn(g.cross(v, l)) > 0


class _Search:
    """Visibility search from a source point up to squared length ``R2``.

    Rational surfaces are searched in integer coordinates (everything scaled
    by a common denominator).  Callbacks receive search-scale vectors:
      ``on_target(v, node, X_dev, root, (k, T))`` for a target seen in an open wedge;
      ``on_vertex(v, node, V_dev, cls, corner, root, (k, T))`` for a vertex seen first on its ray.
    """

    def __init__(self, s, source: SurfacePoint, R2, targets=(), blockers=()):
        from math import lcm

        self.s = s
        self.Tr = triangulate(s)
        K = self.K = self.Tr.K
        self.source = source
        tg = _group(K, targets)
        bk = _group(K, blockers)
        src_reps = K.reps(source)
        if K.rational:
            D = 1
            vals = [c for tri in self.Tr.pts for v in tri for c in v]
            vals += [c for row in self.Tr.nbr for _, _, tau in row for c in tau]
            vals += [c for tab in (tg, bk) for pts in tab.values() for v in pts for c in v]
            vals += [c for _, v in src_reps for c in v]
            for c in vals:
                D = lcm(D, Fraction(c).denominator)
            self.D = D
            io = lambda x: int(Fraction(x) * D)
            self.io = lambda v: (io(v[0]), io(v[1]))
            self.out = lambda x: Fraction(x, D)
            R2s = Fraction(R2) * D * D
            self.R2 = R2s.numerator // R2s.denominator
        else:
            self.D = 1
            self.io = lambda v: v
            self.out = lambda x: x
            self.R2 = R2
        io2 = self.io
        self.pts = [tuple(io2(v) for v in tri) for tri in self.Tr.pts]
        self.nbr = [[(k2, j2, io2(tau)) for k2, j2, tau in row] for row in self.Tr.nbr]
        self.tgt = {p: [io2(v) for v in pts] for p, pts in tg.items()}
        self.blk = {p: [io2(v) for v in pts] for p, pts in bk.items()}
        self.src_reps = [(p, io2(v)) for p, v in src_reps]
        self.nodes_visited = 0

    def outv(self, v):
        return (self.out(v[0]), self.out(v[1]))

    def _pts_in_tri(self, table, k):
        p, _ = self.Tr.tris[k]
        pts = table.get(p)
        if not pts:
            return ()
        a, b, c = self.pts[k]
        out = []
        for x in pts:
            if g.orient(a, b, x) >= 0 and g.orient(b, c, x) >= 0 and g.orient(c, a, x) >= 0:
                if not (g.same_point(x, a) or g.same_point(x, b) or g.same_point(x, c)):
                    out.append(x)
        return out

    def _far(self, S, a, b) -> bool:
        """Squared distance from ``S`` to segment ``[a, b]`` exceeds ``R2``."""
        ab = g.sub(b, a)
        sa = g.sub(S, a)
        t = g.dot(sa, ab)
        if g.sgn(t) <= 0:
            return g.norm2(sa) > self.R2
        L = g.norm2(ab)
        if t >= L:
            return g.norm2(g.sub(S, b)) > self.R2
        c = g.cross(ab, sa)
        return c * c > self.R2 * L

    def run(self, on_target, on_vertex):
        s, K, Tr = self.s, self.K, self.Tr
        zero = 0 if K.rational else s.field(0)
        Tz = (zero, zero)
        roots, rays, seen = [], [], set()
        for p, S in self.src_reps:
            for k in Tr.by_poly[p]:
                pts = self.pts[k]
                if not (g.orient(pts[0], pts[1], S) >= 0 and g.orient(pts[1], pts[2], S) >= 0
                        and g.orient(pts[2], pts[0], S) >= 0):
                    continue
                _, tri = Tr.tris[k]
                vk = next((j for j in range(3) if g.same_point(pts[j], S)), None)
                root = (p, tri[vk]) if vk is not None else None
                for j in range(3):
                    a, b = pts[j], pts[(j + 1) % 3]
                    if g.on_segment(S, a, b):
                        continue
                    ra, rb = g.sub(a, S), g.sub(b, S)
                    if g.sgn(g.cross(ra, rb)) > 0:
                        roots.append(_Node(k, Tz, ra, rb, None, (j,), None, S, root))
                for j in range(3):
                    V = pts[j]
                    if g.same_point(V, S):
                        continue
                    v = g.sub(V, S)
                    corner = None
                    if root is not None:
                        # a ray along the far side of the root corner leaves through the next one
                        rc = root if g.in_sector(*s.corner_sector(*root), self.outv(v)) else s.next_corner(*root)
                        corner = _sector_corner(K, s.class_of[root], self.outv(v), corner=rc)
                    key = (corner, Direction.of(*v))
                    if key not in seen:
                        seen.add(key)
                        rays.append((k, S, V, tri[j], corner))
        for k, S, V, vidx, root in rays:
            self._ray(k, S, V, vidx, root, Tz, on_target, on_vertex)
        stack = list(reversed(roots))
        proc = self._process_int if K.rational else self._process
        while stack:
            node = stack.pop()
            self.nodes_visited += 1
            stack.extend(reversed(proc(node, on_target, on_vertex)))

    def _ray(self, k, S, V, vidx, root, T, on_target, on_vertex):
        """Straight segment from the source to a vertex of its own triangle."""
        p, _ = self.Tr.tris[k]
        v = g.sub(V, S)
        if g.norm2(v) > self.R2:
            return
        hits = []
        for kind, table in ((0, self.blk), (1, self.tgt)):
            for x in self._pts_in_tri(table, k):
                if g.on_segment(x, S, V) and not g.same_point(x, S):
                    hits.append((g.dot(g.sub(x, S), v), kind, x))
        hits.sort(key=lambda h: (h[0], h[1]))
        for _, kind, x in hits:
            if kind == 0:
                return
            on_target(g.sub(x, S), None, x, root, (k, T))
        on_vertex(v, None, V, self.s.class_of[(p, vidx)], (p, vidx), root, (k, T))

    def _process(self, node, on_target, on_vertex):
        Tr = self.Tr
        k, T, r, l, S = node.k, node.T, node.r, node.l, node.origin
        pts = self.pts[k]
        p, tri = Tr.tris[k]
        dev = [g.add(x, T) for x in pts]
        R2 = self.R2
        blk = []
        for x in self._pts_in_tri(self.blk, k):
            v = g.sub(g.add(x, T), S)
            if _strict_in(r, l, v):
                blk.append(v)
        for x in self._pts_in_tri(self.tgt, k):
            xd = g.add(x, T)
            v = g.sub(xd, S)
            if not _strict_in(r, l, v) or g.norm2(v) > R2:
                continue
            if any(g.sgn(g.cross(bv, v)) == 0 and g.dot(bv, v) > 0 and g.norm2(bv) < g.norm2(v) for bv in blk):
                continue
            on_target(v, node, xd, node.root, (k, T))
        splits = list(blk)
        if node.entry is not None:
            j = (node.entry + 2) % 3
            v = g.sub(dev[j], S)
            if _strict_in(r, l, v):
                if g.norm2(v) <= R2 and not any(
                        g.sgn(g.cross(bv, v)) == 0 and g.dot(bv, v) > 0 for bv in blk):
                    on_vertex(v, node, dev[j], self.s.class_of[(p, tri[j])], (p, tri[j]), node.root, (k, T))
                splits.append(v)
            exits = ((node.entry + 1) % 3, j)
        else:
            exits = node.exits
        children = []
        for j in exits:
            a, b = dev[j], dev[(j + 1) % 3]
            ra, rb = g.sub(a, S), g.sub(b, S)
            if g.sgn(g.cross(ra, rb)) <= 0:
                continue
            cr = r if g.sgn(g.cross(r, ra)) <= 0 else ra
            cl = l if g.sgn(g.cross(l, rb)) >= 0 else rb
            if g.sgn(g.cross(cr, cl)) <= 0 or self._far(S, a, b):
                continue
            cuts = [bv for bv in splits if _strict_in(cr, cl, bv)]
            if len(cuts) > 1:
                cuts.sort(key=_AngleKey(cr))
            bounds = [cr] + cuts + [cl]
            k2, j2, tau = self.nbr[k][j]
            T2 = g.sub(T, tau)
            for lo, hi in zip(bounds, bounds[1:]):
                if g.sgn(g.cross(lo, hi)) > 0:
                    children.append(_Node(k2, T2, lo, hi, j2, None, node, S, node.root))
        return children

    def _process_int(self, node, on_target, on_vertex):
        """Same as ``_process`` with plain integer arithmetic (rational surfaces)."""
        k, T, r, l, S = node.k, node.T, node.r, node.l, node.origin
        (r0, r1), (l0, l1), (s0, s1), (t0, t1) = r, l, S, T
        pts = self.pts[k]
        p, tri = self.Tr.tris[k]
        dev = [(x0 + t0, x1 + t1) for x0, x1 in pts]
        R2 = self.R2
        blk = []
        if self.blk or self.tgt:
            for x in self._pts_in_tri(self.blk, k):
                v = (x[0] + t0 - s0, x[1] + t1 - s1)
                if r0 * v[1] - r1 * v[0] > 0 and v[0] * l1 - v[1] * l0 > 0:
                    blk.append(v)
            for x in self._pts_in_tri(self.tgt, k):
                xd = (x[0] + t0, x[1] + t1)
                v = (xd[0] - s0, xd[1] - s1)
                if not (r0 * v[1] - r1 * v[0] > 0 and v[0] * l1 - v[1] * l0 > 0):
                    continue
                n2 = v[0] * v[0] + v[1] * v[1]
                if n2 > R2:
                    continue
                if any(bv[0] * v[1] - bv[1] * v[0] == 0 and bv[0] * v[0] + bv[1] * v[1] > 0
                       and bv[0] * bv[0] + bv[1] * bv[1] < n2 for bv in blk):
                    continue
                on_target(v, node, xd, node.root, (k, T))
        splits = blk
        if node.entry is not None:
            j = (node.entry + 2) % 3
            v = (dev[j][0] - s0, dev[j][1] - s1)
            if r0 * v[1] - r1 * v[0] > 0 and v[0] * l1 - v[1] * l0 > 0:
                if v[0] * v[0] + v[1] * v[1] <= R2 and not any(
                        bv[0] * v[1] - bv[1] * v[0] == 0 and bv[0] * v[0] + bv[1] * v[1] > 0 for bv in blk):
                    on_vertex(v, node, dev[j], self.s.class_of[(p, tri[j])], (p, tri[j]), node.root, (k, T))
                splits = blk + [v]
            exits = ((node.entry + 1) % 3, j)
        else:
            exits = node.exits
        children = []
        nbr = self.nbr[k]
        for j in exits:
            a, b = dev[j], dev[(j + 1) % 3]
            ra = (a[0] - s0, a[1] - s1)
            rb = (b[0] - s0, b[1] - s1)
            if ra[0] * rb[1] - ra[1] * rb[0] <= 0:
                continue
            cr = r if r0 * ra[1] - r1 * ra[0] <= 0 else ra
            cl = l if l0 * rb[1] - l1 * rb[0] >= 0 else rb
            if cr[0] * cl[1] - cr[1] * cl[0] <= 0:
                continue
            # distance from S to the exit segment
            ab0, ab1 = b[0] - a[0], b[1] - a[1]
            sa0, sa1 = -ra[0], -ra[1]
            tt = sa0 * ab0 + sa1 * ab1
            if tt <= 0:
                if sa0 * sa0 + sa1 * sa1 > R2:
                    continue
            else:
                LL = ab0 * ab0 + ab1 * ab1
                if tt >= LL:
                    if rb[0] * rb[0] + rb[1] * rb[1] > R2:
                        continue
                else:
                    c = ab0 * sa1 - ab1 * sa0
                    if c * c > R2 * LL:
                        continue
            k2, j2, tau = nbr[j]
            T2 = (t0 - tau[0], t1 - tau[1])
            if splits:
                cuts = [bv for bv in splits if cr[0] * bv[1] - cr[1] * bv[0] > 0
                        and bv[0] * cl[1] - bv[1] * cl[0] > 0]
            else:
                cuts = ()
            if not cuts:
                children.append(_Node(k2, T2, cr, cl, j2, None, node, S, node.root))
                continue
            if len(cuts) > 1:
                cuts.sort(key=_AngleKey(cr))
            bounds = [cr] + cuts + [cl]
            for lo, hi in zip(bounds, bounds[1:]):
                if lo[0] * hi[1] - lo[1] * hi[0] > 0:
                    children.append(_Node(k2, T2, lo, hi, j2, None, node, S, node.root))
        return children

    # -- path reconstruction in kernel scalars -------------------------------
    def segments_along(self, node, S, X):
        """Pieces of the developed segment ``S -> X`` through the triangles of a node chain."""
        K, Tr = self.K, self.Tr
        chain = _chain(node) if node is not None else []
        out = self.outv
        Sk, Xk = out(S), out(X)
        v = g.sub(Xk, Sk)
        segs = []
        t_prev = 0
        for i, nd in enumerate(chain):
            Tk = out(nd.T)
            if i + 1 < len(chain):
                nxt = chain[i + 1]
                j = next(jj for jj in range(3) if self.nbr[nd.k][jj][0] == nxt.k
                         and self.nbr[nd.k][jj][1] == nxt.entry
                         and g.same_point(g.sub(nd.T, self.nbr[nd.k][jj][2]), nxt.T))
                pts = Tr.pts[nd.k]
                a, b = g.add(pts[j], Tk), g.add(pts[(j + 1) % 3], Tk)
                t_next = g.line_param(Sk, v, a, b)[0]
            else:
                t_next = 1
            p, _ = Tr.tris[nd.k]
            A = g.sub(g.add(Sk, g.scale(v, t_prev)), Tk)
            B = g.sub(g.add(Sk, g.scale(v, t_next)), Tk)
            if segs and segs[-1][0] == p and g.same_point(segs[-1][2], A):
                segs[-1] = (p, segs[-1][1], B)
            else:
                segs.append((p, A, B))
            t_prev = t_next
        if not chain:
            return None
        return [(p, K.back(a), K.back(b)) for p, a, b in segs]

    def root_segment(self, k, S, X):
        p, _ = self.Tr.tris[k]
        return [(p, self.K.back(self.outv(S)), self.K.back(self.outv(X)))]


class _AngleKey:
    def __init__(self, u):
        self.u = u

    def __call__(self, v):
        return _AngleCmp(self.u, v)


class _AngleCmp:
    __slots__ = ("u", "v")

    def __init__(self, u, v):
        self.u, self.v = u, v

    def __lt__(self, other):
        return g.angle_lt(self.u, self.v, other.v)


def _chain(node):
    out = []
    while node is not None:
        out.append(node)
        node = node.parent
    out.reverse()
    return out


def connecting_geodesics(s: SurfacePresentation, O: SurfacePoint, A: SurfacePoint, max_length,
                         blockers: Sequence[SurfacePoint] = (), continue_removable: bool = True,
                         ) -> list[GeodesicPath]:
    """All geodesics from ``O`` to ``A`` of length at most ``max_length``.

    Paths pass straight through removable vertices and end at non-removable
    ones.  With ``blockers`` only the paths avoiding every blocker are
    returned.  Output is sorted by (squared length, direction).
    """
    K = _kernel(s)
    L = K.conv(s.field(max_length))
    R2 = L * L
    a_cls = s.vertex_class_of_point(A)
    targets = [] if a_cls is not None else [A]
    blk_pts = [b for b in blockers if s.vertex_class_of_point(b) is None]
    blk_cls = {s.vertex_class_of_point(b) for b in blockers} - {None}
    search = _Search(s, O, R2, targets=targets, blockers=blk_pts)
    found: dict = {}
    tgt_reps = _group(K, targets)
    blk_reps = _group(K, blk_pts)
    outv = search.outv

    def add(key, hol, builder, end_pt):
        if key not in found:
            found[key] = GeodesicPath(O, end_pt, hol, hol, REACHED, _builder=builder)

    def prefix(node, k, S, X):
        if node is None:
            return lambda: search.root_segment(k, S, X)
        return lambda: search.segments_along(node, S, X)

    def on_target(v, node, Xd, root, kt):
        k, T = kt
        S = g.sub(Xd, v)
        p, _ = search.Tr.tris[k]
        end = SurfacePoint(p, *K.back(outv(g.sub(Xd, T))))
        vk = K.back(outv(v))
        add((root, vk), vk, prefix(node, k, S, Xd), end)

    def on_vertex(v, node, Vd, cls, corner, root, kt):
        k, T = kt
        S = g.sub(Vd, v)
        pre = prefix(node, k, S, Vd)
        vk = K.back(outv(v))
        if cls in blk_cls:
            return
        if cls == a_cls:
            p, i = corner
            add((root, vk), vk, pre, SurfacePoint(p, *s.vertex(p, i)))
        if not continue_removable or not K.removable[cls]:
            return
        d = outv(v)
        walk = _Walk(K, d, 1, R2 / g.norm2(d), tgt_reps, blk_reps, False, True)
        _continue_through(walk, corner[0], corner[1], a_cls, blk_cls, first=True)
        for th, nseg, X, px, a0 in walk.hits:
            hol = K.back(g.scale(d, 1 + th))
            fn = (lambda pre=pre, walk=walk, nseg=nseg, X=X, px=px, a0=a0:
                  pre() + [(pp, K.back(a), K.back(b)) for pp, a, b in walk.segments[:nseg]]
                  + [(px, K.back(a0), K.back(X))])
            add((root, hol), hol, fn, SurfacePoint(px, *K.back(X)))
        for th, nseg, X, px in walk.vertex_hits:
            hol = K.back(g.scale(d, 1 + th))
            fn = (lambda pre=pre, walk=walk, nseg=nseg: pre()
                  + [(pp, K.back(a), K.back(b)) for pp, a, b in walk.segments[:nseg]])
            add((root, hol), hol, fn, SurfacePoint(px, *K.back(X)))

    search.run(on_target, on_vertex)
    out = list(found.values())
    out.sort(key=lambda gp: (g.norm2(gp.holonomy), float(gp.holonomy[0]), float(gp.holonomy[1])))
    return out


def _run_collect(walk: _Walk, p, x, excl, a_cls, blk_cls):
    """Walk collecting every target hit; vertex targets and blockers are handled by class."""
    K = walk.K
    while True:
        poly = K.polys[p]
        t, j, sp = _exit(poly, x, walk.d, excl)
        y = g.add(x, g.scale(walk.d, t))
        if not walk._segment(p, x, y, t):
            return
        if g.sgn(sp) == 0 or g.sgn(sp - 1) == 0:
            k = j if g.sgn(sp) == 0 else (j + 1) % len(poly)
            if not _continue_through(walk, p, k, a_cls, blk_cls):
                return
            p, x, excl = walk._next
            continue
        q, f, tau = K.trans[(p, j)]
        p, x, excl = q, g.add(y, tau), (f,)


def _continue_through(walk: _Walk, p, k, a_cls, blk_cls, first: bool = False) -> bool:
    """Pass a removable vertex; with ``first`` the walk is started and run to the end."""
    K = walk.K
    s = K.s
    while True:
        cls = s.class_of[(p, k)]
        if not first:
            if cls == a_cls:
                walk.vertex_hits.append((walk.t, len(walk.segments), K.polys[p][k], p))
            if cls in blk_cls or not K.removable[cls]:
                return False
        q, m = _sector_corner(K, cls, walk.d)
        poly = K.polys[q]
        n = len(poly)
        u = g.sub(poly[(m + 1) % n], poly[m])
        if g.sgn(g.cross(u, walk.d)) == 0:
            dt = u[0] / walk.d[0] if g.sgn(walk.d[0]) != 0 else u[1] / walk.d[1]
            if not walk._segment(q, poly[m], poly[(m + 1) % n], dt):
                return False
            p, k, first = q, (m + 1) % n, False
            continue
        walk._next = (q, poly[m], (m, (m - 1) % n))
        if first:
            _run_collect(walk, *walk._next, a_cls, blk_cls)
            return False
        return True


# ---------------------------------------------------------------------------
# saddle connections


def saddle_connections(s: SurfacePresentation, max_length, classes: Iterable[int] | None = None,
                       ) -> list[SaddleConnection]:
    """Saddle connections of length at most ``max_length`` leaving the given vertex classes.

    Every vertex is an endpoint candidate, so connections end at the first
    vertex they meet.  Each connection is reported once from each of its
    endpoints that is in ``classes``.
    """
    K = _kernel(s)
    L = K.conv(s.field(max_length))
    R2 = L * L
    out: dict = {}
    for cls in (range(len(s.vertex_classes)) if classes is None else classes):
        p, i = min(s.vertex_classes[cls])
        src = SurfacePoint(p, *s.vertex(p, i))
        search = _Search(s, src, R2)

        def on_vertex(v, node, Vd, vcls, corner, root, kt, cls=cls, search=search):
            vk = K.back(search.outv(v))
            key = (cls, root, vk)
            if key not in out:
                out[key] = SaddleConnection(cls, vcls, vk, root)

        search.run(lambda *a: None, on_vertex)
    res = list(out.values())
    res.sort(key=lambda c: (c.start_class, g.norm2(c.holonomy), float(c.holonomy[0]), float(c.holonomy[1]),
                            c.start_corner))
    return res


def saddle_directions(s: SurfacePresentation, max_length) -> list[Direction]:
    """Unoriented directions of all saddle connections up to ``max_length``."""
    keys = {}
    for c in saddle_connections(s, max_length):
        d = c.direction.line_key()
        keys.setdefault(d, c.length_sq)
    dirs = list(keys)
    dirs.sort(key=lambda d: (keys[d], float(d.dx), float(d.dy)))
    return dirs


# ---------------------------------------------------------------------------
# cylinder decomposition


def _shear_to_horizontal(s: SurfacePresentation, d):
    """Matrix of determinant 1 sending ``d`` to ``(1, 0)``."""
    F = s.field
    dx, dy = F(d[0]), F(d[1])
    n2 = dx * dx + dy * dy
    return ((dx / n2, dy / n2), (-dy, dx))


@dataclass
class _Cell:
    polygon: int
    ya: object
    yb: object
    left: int
    right: int
    poly: tuple
    offset: tuple = None

    def x_at(self, poly, j, y):
        n = len(poly)
        a, b = poly[j], poly[(j + 1) % n]
        return a[0] + (y - a[1]) * (b[0] - a[0]) / (b[1] - a[1])


@dataclass
class Cylinder:
    """A maximal flat cylinder in a periodic direction.

    Lengths are measured in the frame where the direction is horizontal
    (``frame`` maps the surface into that frame with determinant 1).
    Cylinder coordinates ``(u, v)`` have ``u`` modulo ``width`` and
    ``0 <= v <= height``.
    """

    direction: Direction
    width: object
    height: object
    cells: list
    bottom: list  # (saddle connection index, offset): u = arclength + offset (mod width)
    top: list
    frame: tuple
    sheared: SurfacePresentation = dc_field(repr=False)
    source: SurfacePresentation = dc_field(repr=False)

    @property
    def area(self):
        return self.width * self.height

    @property
    def modulus(self):
        return self.height / self.width

    def _mod(self, u):
        return u - self.width * floor(u / self.width)

    def to_sheared(self, u, v) -> SurfacePoint:
        for c in self.cells:
            ox, oy = c.offset
            y = v - oy
            if y < c.ya or y > c.yb:
                continue
            poly = self.sheared.polygons[c.polygon]
            xl, xr = c.x_at(poly, c.left, y), c.x_at(poly, c.right, y)
            x = u - ox
            k = floor((xl - x) / self.width)
            x = x + k * self.width
            if x < xl:
                x = x + self.width
            if x <= xr:
                return SurfacePoint(c.polygon, x, y)
        raise ValueError(f"({u}, {v}) is not in the cylinder")

    def to_surface(self, u, v) -> SurfacePoint:
        pt = self.to_sheared(u, v)
        inv = g.matinv(self.frame)
        x, y = g.matvec(inv, pt.position)
        return SurfacePoint(pt.polygon, x, y)

    def coords(self, pt: SurfacePoint):
        """Cylinder coordinates of a surface point, or ``None`` if it is outside."""
        x, y = g.matvec(self.frame, pt.position)
        sp = SurfacePoint(pt.polygon, x, y)
        for r in self.sheared.representatives(sp):
            for c in self.cells:
                if c.polygon != r.polygon:
                    continue
                kind, _ = g.point_in_polygon(r.position, c.poly)
                if kind != "outside":
                    return self._mod(r.x + c.offset[0]), r.y + c.offset[1]
        return None


@dataclass
class CylinderDecomposition:
    direction: Direction
    cylinders: list
    saddles: list  # per connection: dict with segments, length, classes
    frame: tuple
    sheared: SurfacePresentation = dc_field(repr=False)
    source: SurfacePresentation = dc_field(repr=False)

    def __iter__(self):
        return iter(self.cylinders)

    def __len__(self) -> int:
        return len(self.cylinders)

    def __getitem__(self, i):
        return self.cylinders[i]

    @property
    def total_area(self):
        acc = self.cylinders[0].area
        for c in self.cylinders[1:]:
            acc = acc + c.area
        return acc


def decompose(s: SurfacePresentation, direction, budget_length) -> CylinderDecomposition | None:
    """Cylinder decomposition in ``direction`` if every separatrix closes within the budget.

    ``budget_length`` bounds each separatrix in the frame where the
    direction is the unit horizontal vector.
    """
    F = s.field
    d = direction.vector if isinstance(direction, Direction) else direction
    d = (F(d[0]), F(d[1]))
    if g.is_zero_vec(d):
        raise ZeroDirection("direction vector is zero")
    M = _shear_to_horizontal(s, d)
    sh = apply_gl2(M, s)
    one, zero = F(1), F(0)
    east = (one, zero)
    saddles = []
    for cls, corners in enumerate(sh.vertex_classes):
        for p, i in corners:
            u, w = sh.corner_sector(p, i)
            if not g.in_sector(u, w, east):
                continue
            path = trace(sh, SurfacePoint(p, *sh.vertex(p, i)), east, budget_length, corner=(p, i),
                         stop_at_vertices=True)
            if path.terminal != SINGULAR:
                return None
            end_cls = sh.vertex_class_of_point(path.end)
            saddles.append({"segments": path.segments, "length": path.holonomy[0],
                            "start": cls, "end": end_cls, "corner": (p, i)})
    # saddle pieces per polygon: (y, xa, xb, saddle index, arclength at xa)
    pieces: dict[int, list] = {}
    for idx, sc in enumerate(saddles):
        acc = zero
        for p, a, b in sc["segments"]:
            pieces.setdefault(p, []).append((a[1], a[0], b[0], idx, acc))
            # a piece lying on a polygon side is also seen from the glued side
            poly = sh.polygons[p]
            n = len(poly)
            for j in range(n):
                if g.on_segment(a, poly[j], poly[(j + 1) % n]) and g.on_segment(b, poly[j], poly[(j + 1) % n]):
                    q, _ = sh.glued(p, j)
                    tau = sh.edge_translation(p, j)
                    pieces.setdefault(q, []).append((a[1] + tau[1], a[0] + tau[0], b[0] + tau[0], idx, acc))
                    break
            acc = acc + (b[0] - a[0])
    cells: list[_Cell] = []
    per_poly: dict[int, list[int]] = {}
    for p, poly in enumerate(sh.polygons):
        n = len(poly)
        levels = {v[1] for v in poly} | {pc[0] for pc in pieces.get(p, ())}
        levels = sorted(levels)
        for ya, yb in zip(levels, levels[1:]):
            ym = (ya + yb) / 2
            crossing = []
            for j in range(n):
                a, b = poly[j], poly[(j + 1) % n]
                lo, hi = (a[1], b[1]) if a[1] < b[1] else (b[1], a[1])
                if lo <= ya and hi >= yb and a[1] != b[1]:
                    x = a[0] + (ym - a[1]) * (b[0] - a[0]) / (b[1] - a[1])
                    crossing.append((x, j, b[1] < a[1]))
            crossing.sort(key=lambda c: c[0])
            for (xl, jl, down), (xr, jr, down2) in zip(crossing[::2], crossing[1::2]):
                if not down or down2:
                    raise RuntimeError("inconsistent slab boundary orientation")
                c = _Cell(p, ya, yb, jl, jr, ())
                xla, xra = c.x_at(poly, jl, ya), c.x_at(poly, jr, ya)
                xlb, xrb = c.x_at(poly, jl, yb), c.x_at(poly, jr, yb)
                pts = [(xla, ya), (xra, ya), (xrb, yb), (xlb, yb)]
                dd = []
                for v in pts:
                    if not dd or not g.same_point(dd[-1], v):
                        dd.append(v)
                if g.same_point(dd[0], dd[-1]):
                    dd.pop()
                c.poly = tuple(dd)
                per_poly.setdefault(p, []).append(len(cells))
                cells.append(c)
    # adjacency
    adj: dict[int, list[tuple[int, tuple]]] = {i: [] for i in range(len(cells))}

    def covered(p, y, x):
        for yy, xa, xb, _, _ in pieces.get(p, ()):
            if yy == y and xa <= x <= xb:
                return True
        return False

    for p, ids in per_poly.items():
        poly = sh.polygons[p]
        for i in ids:
            ci = cells[i]
            for j in ids:
                cj = cells[j]
                if cj.ya != ci.yb:
                    continue
                y = ci.yb
                lo = max(ci.x_at(poly, ci.left, y), cj.x_at(poly, cj.left, y))
                hi = min(ci.x_at(poly, ci.right, y), cj.x_at(poly, cj.right, y))
                if lo < hi and not covered(p, y, (lo + hi) / 2):
                    adj[i].append((j, (zero, zero)))
                    adj[j].append((i, (zero, zero)))
    right_index: dict[tuple[int, int], list[int]] = {}
    for i, c in enumerate(cells):
        right_index.setdefault((c.polygon, c.right), []).append(i)
    for i, c in enumerate(cells):
        q, f = sh.glued(c.polygon, c.left)
        tau = sh.edge_translation(c.polygon, c.left)
        ya, yb = c.ya + tau[1], c.yb + tau[1]
        for j in right_index.get((q, f), ()):
            cj = cells[j]
            if max(ya, cj.ya) < min(yb, cj.yb):
                adj[i].append((j, g.neg(tau)))
                adj[j].append((i, tau))
    # components with offsets: cylinder coordinates are position + offset
    comp = [-1] * len(cells)
    groups = []
    for i0 in range(len(cells)):
        if comp[i0] >= 0:
            continue
        gid = len(groups)
        comp[i0] = gid
        cells[i0].offset = (zero, zero)
        stack, members = [i0], [i0]
        while stack:
            i = stack.pop()
            for j, shift in adj[i]:
                # position x in cell i equals x + tau in cell j, so offset_j = offset_i - tau
                if comp[j] < 0:
                    comp[j] = gid
                    cells[j].offset = g.add(cells[i].offset, shift)
                    stack.append(j)
                    members.append(j)
        groups.append(members)
    dirn = Direction.of(*d)
    cylinders = []
    for members in groups:
        vmin = min(cells[i].ya + cells[i].offset[1] for i in members)
        vmax = max(cells[i].yb + cells[i].offset[1] for i in members)
        for i in members:
            ox, oy = cells[i].offset
            cells[i].offset = (ox, oy - vmin)
        h = vmax - vmin
        area = zero
        for i in members:
            area = area + g.signed_area(cells[i].poly)
        w = area / h
        cyl = Cylinder(dirn, w, h, [cells[i] for i in members], [], [], M, sh, s)
        bottom, top = {}, {}
        for i in members:
            c = cells[i]
            poly = sh.polygons[c.polygon]
            for y, side in ((c.ya, bottom), (c.yb, top)):
                v = y + c.offset[1]
                if v != 0 and v != h:
                    continue
                if (v == 0) != (side is bottom):
                    continue
                xl, xr = c.x_at(poly, c.left, y), c.x_at(poly, c.right, y)
                for yy, xa, xb, sidx, arc in pieces.get(c.polygon, ()):
                    if yy == y and max(xa, xl) < min(xb, xr):
                        side.setdefault(sidx, cyl._mod(c.offset[0] + xa - arc))
        cyl.bottom = sorted(bottom.items(), key=lambda kv: kv[1])
        cyl.top = sorted(top.items(), key=lambda kv: kv[1])
        cylinders.append(cyl)
    cylinders.sort(key=lambda c: (-float(c.width), float(c.height)))
    return CylinderDecomposition(dirn, cylinders, saddles, M, sh, s)


# ---------------------------------------------------------------------------
# two-cylinder configurations


@dataclass
class TwoCylinderConfig:
    """Two distinct parallel cylinders sharing a boundary interval of length ``l``.

    Chart: ``c1`` is ``[0, w1] x [-h1, 0]``, ``c2`` is
    ``[w1 - l, w1 - l + w2] x [0, h2]`` and the shared interval is
    ``[w1 - l, w1] x {0}``; horizontal chart coordinates are periodic in
    each cylinder.  Lengths are those of the decomposition frame.
    """

    c1: Cylinder
    c2: Cylinder
    l: object
    a1: object  # start of the shared interval on the top of c1, in c1 coordinates
    a2: object  # start of the shared interval on the bottom of c2, in c2 coordinates
    decomposition: CylinderDecomposition = dc_field(repr=False)

    @property
    def w1(self):
        return self.c1.width

    @property
    def h1(self):
        return self.c1.height

    @property
    def w2(self):
        return self.c2.width

    @property
    def h2(self):
        return self.c2.height

    @property
    def surface(self) -> SurfacePresentation:
        return self.c1.source

    @property
    def frame(self):
        return self.c1.frame

    def embedding(self, x, y) -> SurfacePoint:
        """Surface point (original coordinates) at chart position ``(x, y)``."""
        F = self.surface.field
        x, y = F(x), F(y)
        if y <= 0:
            return self.c1.to_surface(x - (self.w1 - self.l) + self.a1, y + self.h1)
        return self.c2.to_surface(x - (self.w1 - self.l) + self.a2, y)

    def chart(self, pt: SurfacePoint):
        """Chart coordinates of a surface point in ``c1`` or ``c2`` (``None`` otherwise)."""
        off = self.w1 - self.l
        cc = self.c1.coords(pt)
        if cc is not None:
            u, v = cc
            return self.c1._mod(u - self.a1 + off), v - self.h1
        cc = self.c2.coords(pt)
        if cc is not None:
            u, v = cc
            return self.c2._mod(u - self.a2) + off, v
        return None

    def widths_ratio(self):
        return self.w2 / self.w1


def find_two_cylinder_config(decomp: CylinderDecomposition) -> list[TwoCylinderConfig]:
    """One configuration per maximal interval shared by the top of one cylinder and the bottom of another."""
    out = []
    lengths = [sc["length"] for sc in decomp.saddles]
    for i, c1 in enumerate(decomp.cylinders):
        top = dict(c1.top)
        for j, c2 in enumerate(decomp.cylinders):
            if i == j:
                continue
            bot = dict(c2.bottom)
            shared = [sidx for sidx in top if sidx in bot]
            if not shared:
                continue
            shared.sort(key=lambda sidx: top[sidx])

            def follows(a, b):
                return (c1._mod(top[a] + lengths[a]) == top[b] and c2._mod(bot[a] + lengths[a]) == bot[b])

            nxt = {a: b for a in shared for b in shared if follows(a, b)}
            prv = {b: a for a, b in nxt.items()}
            used = set()
            starts = [a for a in shared if a not in prv]
            if not starts:
                starts = [shared[0]]
            for a in starts:
                run, cur = [], a
                while cur is not None and cur not in used:
                    used.add(cur)
                    run.append(cur)
                    cur = nxt.get(cur)
                l = lengths[run[0]]
                for r in run[1:]:
                    l = l + lengths[r]
                out.append(TwoCylinderConfig(c1, c2, l, top[run[0]], bot[run[0]], decomp))
    return out
