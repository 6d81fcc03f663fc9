"""Exact lattice arithmetic over the rationals, used by planar (unfolded) checks."""
from __future__ import annotations

from fractions import Fraction
from math import floor, gcd, isqrt

from . import _geom as g


def _q(x) -> Fraction:
    if hasattr(x, "to_fraction"):
        return x.to_fraction()
    return Fraction(x)


def _qv(v):
    return (_q(v[0]), _q(v[1]))


def _egcd(a: int, b: int):
    if b == 0:
        return (a, 1, 0) if a >= 0 else (-a, -1, 0)
    d, x, y = _egcd(b, a % b)
    return d, y, x - (a // b) * y


def _lcm_den(*xs) -> int:
    d = 1
    for x in xs:
        d = d * x.denominator // gcd(d, x.denominator)
    return d


def _int_strictly_between(a: Fraction, b: Fraction) -> bool:
    """Some integer j with a < j < b."""
    return floor(a) + 1 < b


def coset_hits_open_segment(c, basis, O, X) -> bool:
    """Does ``c + m v1 + n v2`` lie on the open segment ``(O, X)`` for some integers ``m, n``?"""
    v1, v2 = _qv(basis[0]), _qv(basis[1])
    c, O, X = _qv(c), _qv(O), _qv(X)
    # lattice coordinates
    o = g.solve_basis(v1, v2, g.sub(O, c))
    x = g.solve_basis(v1, v2, g.sub(X, c))
    d = (x[0] - o[0], x[1] - o[1])
    D = _lcm_den(o[0], o[1], d[0], d[1])
    A1, A2 = int(o[0] * D), int(o[1] * D)
    B1, B2 = int(d[0] * D), int(d[1] * D)
    # need k = (A + s B) / D integral with 0 < s < 1
    if B1 == 0 and B2 == 0:
        return False
    if B1 == 0 or B2 == 0:
        if B1 == 0:
            A1, A2, B1, B2 = A2, A1, B2, B1
        # now B2 == 0
        if A2 % D:
            return False
        lo, hi = sorted((Fraction(A1, D), Fraction(A1 + B1, D)))
        return _int_strictly_between(lo, hi)
    a, b, rhs = D * B2, -D * B1, A1 * B2 - A2 * B1
    gg, p, q = _egcd(a, b)
    if rhs % gg:
        return False
    k1_0 = p * (rhs // gg)
    step = b // gg
    lo, hi = sorted((Fraction(A1, D), Fraction(A1 + B1, D)))
    # k1 = k1_0 + j * step, lo < k1 < hi
    jl, jh = (lo - k1_0) / step, (hi - k1_0) / step
    if step < 0:
        jl, jh = jh, jl
    return _int_strictly_between(jl, jh)


def vectors_in_disk(base, basis, center, R2):
    """All ``X = base + m v1 + n v2`` with ``0 < |X - center|^2 <= R2``."""
    v1, v2 = _qv(basis[0]), _qv(basis[1])
    base, center = _qv(base), _qv(center)
    R2 = Fraction(R2)
    det = abs(g.cross(v1, v2))
    # |coordinate| bound: |m| <= R |v2| / det + 1
    r = isqrt(int(R2) + 1) + 1
    b1 = isqrt(int(g.norm2(v2) * r * r / (det * det)) + 1) + 2
    b2 = isqrt(int(g.norm2(v1) * r * r / (det * det)) + 1) + 2
    m0, n0 = g.solve_basis(v1, v2, g.sub(center, base))
    m0, n0 = floor(m0), floor(n0)
    out = []
    for m in range(m0 - b1, m0 + b1 + 1):
        for n in range(n0 - b2, n0 + b2 + 1):
            X = (base[0] + m * v1[0] + n * v2[0], base[1] + m * v1[1] + n * v2[1])
            d2 = g.norm2(g.sub(X, center))
            if 0 < d2 <= R2:
                out.append(X)
    return out


def _egcd_iter(a: int, b: int):
    x0, x1, y0, y1 = 1, 0, 0, 1
    while b:
        q, r = divmod(a, b)
        a, b = b, r
        x0, x1 = x1, x0 - q * x1
        y0, y1 = y1, y0 - q * y1
    if a < 0:
        return -a, -x0, -y0
    return a, x0, y0


class SegmentScan:
    """Exhaustive check of straight segments against lattice cosets, in integer arithmetic.

    All input points are given in coordinates of a lattice basis (so the
    lattice is ``Z^2``) and must be rational.  ``norm_le(b1, b2, D)``
    decides whether the vector ``(b1, b2) / D`` (lattice coordinates) is
    short enough.
    """

    def __init__(self, origin, targets, blockers):
        pts = [origin] + list(targets) + list(blockers)
        D = _lcm_den(*[c for pt in pts for c in _qv(pt)])
        self.D = D
        self.O = tuple(int(c * D) for c in _qv(origin))
        self.T = [tuple(int(c * D) for c in _qv(t)) for t in targets]
        res = []
        for b in blockers:
            r = tuple(int(c * D) % D for c in _qv(b))
            if r not in res:
                res.append(r)
        self.C = res

    def _blocker(self, B1, B2):
        """Index of a blocker coset meeting the open segment from O with integer vector B."""
        D = self.D
        O1, O2 = self.O
        C = self.C
        if B1 == 0 or B2 == 0:
            for i, (c1, c2) in enumerate(C):
                A1, A2 = O1 - c1, O2 - c2
                if B1 == 0:
                    if A1 % D:
                        continue
                    a, b = (A2, A2 + B2) if B2 > 0 else (A2 + B2, A2)
                else:
                    if A2 % D:
                        continue
                    a, b = (A1, A1 + B1) if B1 > 0 else (A1 + B1, A1)
                if (a // D + 1) * D < b:
                    self._bump(i)
                    return i
            return None
        g0, p, _ = _egcd_iter(B2, -B1)
        Dg = D * g0
        S = D * (-B1 // g0)
        for i, (c1, c2) in enumerate(C):
            A1, A2 = O1 - c1, O2 - c2
            rhs = A1 * B2 - A2 * B1
            if rhs % Dg:
                continue
            k1 = p * (rhs // Dg)
            lo, hi = (A1, A1 + B1) if B1 > 0 else (A1 + B1, A1)
            u, v = lo - D * k1, hi - D * k1
            SS = S
            if SS < 0:
                SS, u, v = -SS, -v, -u
            if (u // SS + 1) * SS < v:
                self._bump(i)
                return i
        return None

    def _bump(self, i):
        if i:
            self.C.insert(0, self.C.pop(i))

    def scan(self, norm_le, box):
        """Return ``(count, unblocked)`` over targets ``t + (m, n)`` with ``|m|, |n| <= box`` around O."""
        D = self.D
        O1, O2 = self.O
        count = 0
        unblocked = []
        for T1, T2 in self.T:
            m0 = (O1 - T1) // D
            n0 = (O2 - T2) // D
            for m in range(m0 - box, m0 + box + 2):
                B1 = T1 + m * D - O1
                for n in range(n0 - box, n0 + box + 2):
                    B2 = T2 + n * D - O2
                    if B1 == 0 and B2 == 0:
                        continue
                    if not norm_le(B1, B2, D):
                        continue
                    count += 1
                    if self._blocker(B1, B2) is None:
                        unblocked.append((Fraction(B1 + O1, D), Fraction(B2 + O2, D)))
        return count, unblocked


class CosetOracle:
    """Tests open segments against a fixed union of lattice cosets ``c_i + L``."""

    def __init__(self, basis, cosets):
        self.v1, self.v2 = _qv(basis[0]), _qv(basis[1])
        self.det = g.cross(self.v1, self.v2)
        self.cos = []
        seen = set()
        for c in cosets:
            a, b = self.coords(_qv(c))
            key = (a - floor(a), b - floor(b))
            if key not in seen:
                seen.add(key)
                self.cos.append(key)

    def coords(self, p):
        v1, v2, d = self.v1, self.v2, self.det
        return (p[0] * v2[1] - p[1] * v2[0]) / d, (v1[0] * p[1] - v1[1] * p[0]) / d

    def hit(self, O, X):
        """Index of a coset meeting the open segment ``(O, X)``, or ``None``."""
        o = self.coords(_qv(O))
        x = self.coords(_qv(X))
        d = (x[0] - o[0], x[1] - o[1])
        for i, (c1, c2) in enumerate(self.cos):
            if _hits_unit(o[0] - c1, o[1] - c2, d[0], d[1]):
                return i
        return None


def _hits_unit(o1, o2, d1, d2) -> bool:
    """Integer point on the open segment from ``o`` to ``o + d``."""
    D = _lcm_den(o1, o2, d1, d2)
    A1, A2 = int(o1 * D), int(o2 * D)
    B1, B2 = int(d1 * D), int(d2 * D)
    if B1 == 0 and B2 == 0:
        return False
    if B1 == 0 or B2 == 0:
        if B1 == 0:
            A1, A2, B1, B2 = A2, A1, B2, B1
        if A2 % D:
            return False
        lo, hi = (A1, A1 + B1) if B1 > 0 else (A1 + B1, A1)
        return (lo // D + 1) * D < hi
    a, b, rhs = D * B2, -D * B1, A1 * B2 - A2 * B1
    gg, p, _ = _egcd(a, b)
    if rhs % gg:
        return False
    k1_0 = p * (rhs // gg)
    step = b // gg
    lo, hi = (A1, A1 + B1) if B1 > 0 else (A1 + B1, A1)
    # lo < D (k1_0 + j step) < hi
    jl, jh = Fraction(lo - D * k1_0, D * step), Fraction(hi - D * k1_0, D * step)
    if step < 0:
        jl, jh = jh, jl
    return _int_strictly_between(jl, jh)
