"""Exact planar predicates on pairs of field elements (or rationals)."""
from __future__ import annotations

from fractions import Fraction


def _sgn(x) -> int:
    if isinstance(x, (int, Fraction)):
        return (x > 0) - (x < 0)
    return x.sign()


def sub(a, b):
    return (a[0] - b[0], a[1] - b[1])


def add(a, b):
    return (a[0] + b[0], a[1] + b[1])


def scale(a, t):
    return (a[0] * t, a[1] * t)


def neg(a):
    return (-a[0], -a[1])


def cross(a, b):
    return a[0] * b[1] - a[1] * b[0]


def dot(a, b):
    return a[0] * b[0] + a[1] * b[1]


def norm2(a):
    return a[0] * a[0] + a[1] * a[1]


def sgn(x) -> int:
    return _sgn(x)


def orient(a, b, c) -> int:
    """Sign of the turn a -> b -> c (1 = counterclockwise)."""
    return _sgn(cross(sub(b, a), sub(c, a)))


def is_zero_vec(v) -> bool:
    return _sgn(v[0]) == 0 and _sgn(v[1]) == 0


def same_point(a, b) -> bool:
    return a[0] == b[0] and a[1] == b[1]


def signed_area(poly) -> object:
    n = len(poly)
    acc = 0
    for i in range(n):
        acc = acc + cross(poly[i], poly[(i + 1) % n])
    return acc / 2


def _half(u, v) -> int:
    c = _sgn(cross(u, v))
    if c > 0 or (c == 0 and _sgn(dot(u, v)) > 0):
        return 0
    return 1


def angle_lt(u, a, b) -> bool:
    """Counterclockwise angle from ``u`` to ``a`` is smaller than to ``b`` (in [0, 2pi))."""
    ha, hb = _half(u, a), _half(u, b)
    if ha != hb:
        return ha < hb
    return _sgn(cross(a, b)) > 0


def in_sector(u, w, d) -> bool:
    """``d`` lies in the half-open counterclockwise sector ``[u, w)``."""
    return angle_lt(u, d, w)


def on_segment(p, a, b) -> bool:
    """``p`` lies on the closed segment ``[a, b]``."""
    if _sgn(cross(sub(b, a), sub(p, a))) != 0:
        return False
    d1 = dot(sub(p, a), sub(b, a))
    return _sgn(d1) >= 0 and _sgn(dot(sub(p, b), sub(a, b))) >= 0


def on_open_segment(p, a, b) -> bool:
    return on_segment(p, a, b) and not same_point(p, a) and not same_point(p, b)


def segments_cross(a, b, c, d) -> bool:
    """Closed segments [a,b] and [c,d] intersect."""
    o1, o2 = orient(a, b, c), orient(a, b, d)
    o3, o4 = orient(c, d, a), orient(c, d, b)
    if o1 * o2 < 0 and o3 * o4 < 0:
        return True
    return (on_segment(c, a, b) or on_segment(d, a, b)
            or on_segment(a, c, d) or on_segment(b, c, d))


def point_in_polygon(p, poly) -> str:
    """Classify ``p`` against a simple ccw polygon: 'vertex', 'edge', 'inside', 'outside'.

    Returns a pair ``(kind, index)``.
    """
    n = len(poly)
    for i in range(n):
        if same_point(p, poly[i]):
            return "vertex", i
    for i in range(n):
        if on_segment(p, poly[i], poly[(i + 1) % n]):
            return "edge", i
    # ray casting to the right, exact
    inside = False
    x, y = p
    for i in range(n):
        a, b = poly[i], poly[(i + 1) % n]
        ya, yb = _sgn(a[1] - y), _sgn(b[1] - y)
        if (ya > 0) != (yb > 0):
            # x coordinate of crossing compared with x
            t_num = (y - a[1])
            dx = b[0] - a[0]
            dy = b[1] - a[1]
            # crossing x = a.x + t_num*dx/dy > x  <=>  (a.x - x)*dy + t_num*dx has sign of dy
            val = (a[0] - x) * dy + t_num * dx
            if _sgn(val) * _sgn(dy) > 0:
                inside = not inside
    return ("inside", -1) if inside else ("outside", -1)


def line_param(p, d, a, b):
    """Intersection of the ray p + t d with the line through a, b.

    Returns ``(t, s)`` with ``p + t d = a + s (b - a)`` or ``None`` if parallel.
    """
    e = sub(b, a)
    den = cross(d, e)
    if _sgn(den) == 0:
        return None
    ap = sub(a, p)
    t = cross(ap, e) / den
    s = cross(ap, d) / den
    return t, s


def det2(m) -> object:
    return m[0][0] * m[1][1] - m[0][1] * m[1][0]


def matvec(m, v):
    return (m[0][0] * v[0] + m[0][1] * v[1], m[1][0] * v[0] + m[1][1] * v[1])


def matmul(a, b):
    return ((a[0][0] * b[0][0] + a[0][1] * b[1][0], a[0][0] * b[0][1] + a[0][1] * b[1][1]),
            (a[1][0] * b[0][0] + a[1][1] * b[1][0], a[1][0] * b[0][1] + a[1][1] * b[1][1]))


def matinv(m):
    d = det2(m)
    return ((m[1][1] / d, -m[0][1] / d), (-m[1][0] / d, m[0][0] / d))


def solve_basis(b1, b2, v):
    """Coordinates (x, y) with v = x b1 + y b2."""
    d = cross(b1, b2)
    return cross(v, b2) / d, cross(b1, v) / d
