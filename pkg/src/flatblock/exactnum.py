"""Exact arithmetic in real number fields.

A :class:`NumberField` is ``Q(theta)`` for a real algebraic ``theta`` given by
an irreducible integer polynomial and a rational interval isolating the
chosen real root.  Elements are stored on the power basis of an algebraic
*integer* ``phi = lc * theta`` (``lc`` the leading coefficient) as integer
numerators over a common positive denominator, which keeps multiplication in
integer arithmetic.  Signs are decided by interval evaluation at a dyadic
enclosure of ``phi`` that is refined on demand.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from math import gcd
from typing import Iterator, Sequence

__all__ = [
    "NumberFieldError",
    "ReducedPolynomial",
    "AmbiguousInterval",
    "FieldMismatch",
    "NumberField",
    "FieldElement",
    "ApproxPair",
    "QQ",
    "make_field",
    "cos_field",
    "tan_field",
    "algebraic_field",
    "common_field",
    "compare",
    "is_rational_ratio",
    "continued_fraction",
    "convergents",
    "approx_sequence",
    "window_sequence",
    "floor",
    "to_fraction",
]


class NumberFieldError(ValueError):
    pass


class ReducedPolynomial(NumberFieldError):
    """The defining polynomial is reducible or not square-free."""


class AmbiguousInterval(NumberFieldError):
    """The isolating interval holds zero or several real roots."""


class FieldMismatch(NumberFieldError):
    pass


def _as_fraction(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, int):
        return Fraction(x)
    if isinstance(x, str):
        return Fraction(x)
    raise TypeError(f"cannot read {x!r} as a rational")


def _poly_eval_sign_at(coeffs: Sequence[int], x: Fraction) -> int:
    # coeffs constant term first
    num, den = x.numerator, x.denominator
    d = len(coeffs) - 1
    acc = 0
    for i, c in enumerate(coeffs):
        acc += c * num**i * den ** (d - i)
    return (acc > 0) - (acc < 0)


class NumberField:
    """The real field ``Q(theta)``.

    Parameters
    ----------
    min_poly : sequence of int
        Coefficients of the minimal polynomial of ``theta``, constant term
        first.
    isolating_interval : pair of rationals
        Closed interval containing exactly one real root of ``min_poly``.
    check : bool
        Verify irreducibility and root isolation (uses sympy).
    """

    def __init__(self, min_poly: Sequence[int], isolating_interval, check: bool = True):
        poly = [int(c) for c in min_poly]
        while len(poly) > 1 and poly[-1] == 0:
            poly.pop()
        if len(poly) < 2:
            raise ReducedPolynomial("polynomial must have positive degree")
        if poly[-1] < 0:
            poly = [-c for c in poly]
        lo, hi = (_as_fraction(v) for v in isolating_interval)
        if lo > hi:
            lo, hi = hi, lo
        self.min_poly: tuple[int, ...] = tuple(poly)
        self.isolating_interval: tuple[Fraction, Fraction] = (lo, hi)
        self.degree: int = len(poly) - 1
        if check:
            self._check()

        lc = poly[-1]
        d = self.degree
        # monic integer polynomial of phi = lc * theta
        self._monic = tuple(poly[i] * lc ** (d - 1 - i) for i in range(d)) + (1,)
        self._lc = lc
        # phi^(d+k) on the power basis, k = 0 .. d-2
        self._reduce_table = self._build_reduce_table()
        # dyadic enclosure of phi: phi in [a/2^k, b/2^k]
        plo, phi_ = lo * lc, hi * lc
        self._enclosure = (plo, phi_)
        self._power_bounds: dict[int, list[tuple[int, int]]] = {}
        self._prec = 0
        self._zero = None
        self._one = None

    def _check(self) -> None:
        import sympy

        x = sympy.Symbol("x")
        p = sympy.Poly(list(reversed(self.min_poly)), x, domain="ZZ")
        if p.degree() > 1 and not p.is_irreducible:
            raise ReducedPolynomial(f"{p.as_expr()} is not irreducible over Q")
        if p.degree() == 1:
            root = Fraction(-self.min_poly[0], self.min_poly[1])
            if not (self.isolating_interval[0] <= root <= self.isolating_interval[1]):
                raise AmbiguousInterval("interval misses the rational root")
            return
        lo, hi = self.isolating_interval
        n = p.count_roots(sympy.Rational(lo.numerator, lo.denominator),
                          sympy.Rational(hi.numerator, hi.denominator))
        if n != 1:
            raise AmbiguousInterval(f"interval [{lo}, {hi}] contains {n} roots")

    def _build_reduce_table(self) -> list[tuple[int, ...]]:
        d = self.degree
        table = []
        # phi^d = -(m_0 + m_1 phi + ... + m_{d-1} phi^{d-1})
        cur = tuple(-c for c in self._monic[:d])
        for _ in range(max(d - 1, 0)):
            table.append(cur)
            top = cur[-1]
            shifted = (0,) + cur[:-1]
            cur = tuple(shifted[i] + top * table[0][i] for i in range(d))
        return table

    # -- structure ---------------------------------------------------------
    def __eq__(self, other) -> bool:
        return (isinstance(other, NumberField) and self.min_poly == other.min_poly
                and self._same_root(other))

    def _same_root(self, other: "NumberField") -> bool:
        a0, a1 = self.isolating_interval
        b0, b1 = other.isolating_interval
        if self.degree == 1:
            return True
        return not (a1 < b0 or b1 < a0)

    def __hash__(self) -> int:
        return hash(self.min_poly)

    def __repr__(self) -> str:
        if self.degree == 1:
            return "NumberField(Q)"
        lo, hi = self.isolating_interval
        return f"NumberField({list(self.min_poly)}, [{lo}, {hi}])"

    @property
    def is_rational(self) -> bool:
        return self.degree == 1

    def __call__(self, value) -> "FieldElement":
        return self.element(value)

    def element(self, value) -> "FieldElement":
        if isinstance(value, FieldElement):
            if value.field is self:
                return value
            if value.field.degree == 1:
                return self.rational(value.to_fraction())
            if value.field == self:
                return FieldElement(self, value.nums, value.den)
            raise FieldMismatch(f"{value.field!r} vs {self!r}")
        if isinstance(value, (int, Fraction)):
            return self.rational(value)
        if isinstance(value, str):
            return self.rational(Fraction(value))
        if isinstance(value, (list, tuple)):
            return self.from_coords(value)
        raise TypeError(f"cannot coerce {value!r} into {self!r}")

    def rational(self, q) -> "FieldElement":
        q = _as_fraction(q)
        nums = (q.numerator,) + (0,) * (self.degree - 1)
        return FieldElement(self, nums, q.denominator)

    def zero(self) -> "FieldElement":
        if self._zero is None:
            self._zero = self.rational(0)
        return self._zero

    def one(self) -> "FieldElement":
        if self._one is None:
            self._one = self.rational(1)
        return self._one

    def gen(self) -> "FieldElement":
        """The primitive element ``theta``."""
        return self.from_coords([0, 1] + [0] * (self.degree - 2)) if self.degree > 1 \
            else self.rational(Fraction(-self.min_poly[0], self.min_poly[1]))

    def from_coords(self, coords: Sequence) -> "FieldElement":
        """Element from rational coordinates on the basis 1, theta, ..."""
        coords = [_as_fraction(c) for c in coords]
        if len(coords) != self.degree:
            raise ValueError(f"expected {self.degree} coordinates, got {len(coords)}")
        # theta^i = phi^i / lc^i
        vals = [c / Fraction(self._lc) ** i for i, c in enumerate(coords)]
        den = 1
        for v in vals:
            den = den * v.denominator // gcd(den, v.denominator)
        nums = tuple(int(v * den) for v in vals)
        return FieldElement(self, nums, den)

    # -- sign determination ------------------------------------------------
    def _refine(self, prec: int) -> None:
        """Shrink the enclosure of phi below 2^-prec and cache power bounds."""
        lo, hi = self._enclosure
        monic = self._monic
        if self.degree == 1:
            return
        s_lo = _poly_eval_sign_at(monic, lo)
        if s_lo == 0:
            self._enclosure = (lo, lo)
            hi = lo
        width = Fraction(1, 2**prec)
        while hi - lo > width:
            mid = (lo + hi) / 2
            s = _poly_eval_sign_at(monic, mid)
            if s == 0:
                lo = hi = mid
                break
            if s == s_lo:
                lo = mid
            else:
                hi = mid
        self._enclosure = (lo, hi)
        K = prec + 8
        scale = 1 << K
        bounds = [(scale, scale)]
        plo, phi_ = lo, hi
        cur_lo, cur_hi = Fraction(1), Fraction(1)
        for _ in range(1, self.degree):
            cands = (cur_lo * plo, cur_lo * phi_, cur_hi * plo, cur_hi * phi_)
            cur_lo, cur_hi = min(cands), max(cands)
            bounds.append((_floor_frac(cur_lo * scale), -_floor_frac(-cur_hi * scale)))
        self._power_bounds[prec] = bounds
        self._prec = prec

    def sign(self, nums: Sequence[int]) -> int:
        if not any(nums):
            return 0
        if self.degree == 1:
            return (nums[0] > 0) - (nums[0] < 0)
        prec = self._prec or 64
        if not self._prec:
            self._refine(prec)
        while True:
            bounds = self._power_bounds[prec]
            low = high = 0
            for c, (bl, bh) in zip(nums, bounds):
                if c > 0:
                    low += c * bl
                    high += c * bh
                elif c < 0:
                    low += c * bh
                    high += c * bl
            if low > 0:
                return 1
            if high < 0:
                return -1
            prec *= 2
            if prec not in self._power_bounds:
                self._refine(prec)

    def approx(self, nums: Sequence[int], den: int) -> float:
        if self.degree == 1:
            return nums[0] / den
        if not self._prec:
            self._refine(64)
        bounds = self._power_bounds[self._prec]
        K = self._prec + 8
        acc = sum(c * (bl + bh) for c, (bl, bh) in zip(nums, bounds))
        return float(Fraction(acc, 2 * den) / (1 << K))


def _floor_frac(x: Fraction) -> int:
    return x.numerator // x.denominator


def _normalize(nums: Sequence[int], den: int) -> tuple[tuple[int, ...], int]:
    if den < 0:
        nums = [-n for n in nums]
        den = -den
    g = den
    for n in nums:
        if n:
            g = gcd(g, n)
            if g == 1:
                break
    if not any(nums):
        return tuple(0 for _ in nums), 1
    if g != 1:
        nums = [n // g for n in nums]
        den //= g
    return tuple(nums), den


class FieldElement:
    """Immutable element of a :class:`NumberField`."""

    __slots__ = ("field", "nums", "den", "_hash")

    def __init__(self, field: NumberField, nums: Sequence[int], den: int = 1, normalized: bool = False):
        self.field = field
        if normalized:
            self.nums, self.den = tuple(nums), den
        else:
            self.nums, self.den = _normalize(nums, den)
        self._hash = None

    # -- coercion ---------------------------------------------------------
    def _coerce(self, other) -> "FieldElement | None":
        if isinstance(other, FieldElement):
            if other.field is self.field:
                return other
            if other.field.degree == 1:
                return self.field.rational(other.to_fraction())
            if self.field.degree == 1:
                return None
            if other.field == self.field:
                return other
            raise FieldMismatch(f"{self.field!r} vs {other.field!r}")
        if isinstance(other, (int, Fraction)):
            return self.field.rational(other)
        return None

    # -- arithmetic ---------------------------------------------------------
    def __add__(self, other):
        o = self._coerce(other)
        if o is None:
            if isinstance(other, FieldElement):
                return other.__radd__(self)
            return NotImplemented
        if self.den == o.den:
            return FieldElement(self.field, [a + b for a, b in zip(self.nums, o.nums)], self.den)
        return FieldElement(self.field,
                            [a * o.den + b * self.den for a, b in zip(self.nums, o.nums)],
                            self.den * o.den)

    __radd__ = __add__

    def __neg__(self):
        return FieldElement(self.field, [-a for a in self.nums], self.den, normalized=True)

    def __pos__(self):
        return self

    def __sub__(self, other):
        o = self._coerce(other)
        if o is None:
            if isinstance(other, FieldElement):
                return (-other).__radd__(self)
            return NotImplemented
        return self + (-o)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        o = self._coerce(other)
        if o is None:
            if isinstance(other, FieldElement):
                return other.__rmul__(self)
            return NotImplemented
        f = self.field
        d = f.degree
        if d == 1:
            return FieldElement(f, (self.nums[0] * o.nums[0],), self.den * o.den)
        a, b = self.nums, o.nums
        if not any(b[1:]):
            s = b[0]
            return FieldElement(f, [x * s for x in a], self.den * o.den)
        if not any(a[1:]):
            s = a[0]
            return FieldElement(f, [x * s for x in b], self.den * o.den)
        prod = [0] * (2 * d - 1)
        for i, x in enumerate(a):
            if x:
                for j, y in enumerate(b):
                    if y:
                        prod[i + j] += x * y
        res = prod[:d]
        for k, c in enumerate(prod[d:]):
            if c:
                row = f._reduce_table[k]
                for i in range(d):
                    res[i] += c * row[i]
        return FieldElement(f, res, self.den * o.den)

    __rmul__ = __mul__

    def inverse(self) -> "FieldElement":
        f = self.field
        if not any(self.nums):
            raise ZeroDivisionError("inverse of zero")
        d = f.degree
        if d == 1:
            return FieldElement(f, (self.den,), self.nums[0])
        if not any(self.nums[1:]):
            return FieldElement(f, (self.den,) + (0,) * (d - 1), self.nums[0])
        # solve M x = e_0 with M the multiplication-by-self matrix
        cols = []
        basis = [FieldElement(f, [1 if i == j else 0 for i in range(d)], 1, normalized=True)
                 for j in range(d)]
        num_self = FieldElement(f, self.nums, 1, normalized=True)
        for e in basis:
            p = num_self * e
            cols.append([Fraction(n, p.den) for n in p.nums])
        M = [[cols[j][i] for j in range(d)] + [Fraction(int(i == 0))] for i in range(d)]
        for c in range(d):
            piv = next(r for r in range(c, d) if M[r][c] != 0)
            M[c], M[piv] = M[piv], M[c]
            pv = M[c][c]
            M[c] = [v / pv for v in M[c]]
            for r in range(d):
                if r != c and M[r][c] != 0:
                    fac = M[r][c]
                    M[r] = [vr - fac * vc for vr, vc in zip(M[r], M[c])]
        sol = [M[i][d] for i in range(d)]
        den = 1
        for v in sol:
            den = den * v.denominator // gcd(den, v.denominator)
        # (num_self)^-1 = self^-1 / den_self
        return FieldElement(f, [int(v * den) * self.den for v in sol], den)

    def __truediv__(self, other):
        o = self._coerce(other)
        if o is None:
            if isinstance(other, FieldElement):
                return other.__rtruediv__(self)
            return NotImplemented
        return self * o.inverse()

    def __rtruediv__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return o * self.inverse()

    def __pow__(self, k: int):
        if not isinstance(k, int):
            return NotImplemented
        if k < 0:
            return self.inverse() ** (-k)
        result = self.field.one()
        base = self
        while k:
            if k & 1:
                result = result * base
            base = base * base
            k >>= 1
        return result

    # -- comparisons ------------------------------------------------------
    def sign(self) -> int:
        return self.field.sign(self.nums)

    def __eq__(self, other) -> bool:
        try:
            o = self._coerce(other)
        except FieldMismatch:
            return False
        if o is None:
            if isinstance(other, FieldElement):
                return other.__eq__(self)
            return NotImplemented
        return self.nums == o.nums and self.den == o.den

    def __hash__(self) -> int:
        if self._hash is None:
            if not any(self.nums[1:]):
                self._hash = hash(Fraction(self.nums[0], self.den))
            else:
                self._hash = hash((self.nums, self.den))
        return self._hash

    def _cmp(self, other) -> int:
        o = self._coerce(other)
        if o is None:
            if isinstance(other, FieldElement):
                return -other._cmp(self)
            raise TypeError(f"cannot compare with {other!r}")
        return (self - o).sign()

    def __lt__(self, other):
        return self._cmp(other) < 0

    def __le__(self, other):
        return self._cmp(other) <= 0

    def __gt__(self, other):
        return self._cmp(other) > 0

    def __ge__(self, other):
        return self._cmp(other) >= 0

    def __abs__(self):
        return -self if self.sign() < 0 else self

    def __bool__(self) -> bool:
        return any(self.nums)

    # -- conversions --------------------------------------------------------
    def is_rational(self) -> bool:
        return not any(self.nums[1:])

    def to_fraction(self) -> Fraction:
        if not self.is_rational():
            raise ValueError(f"{self} is irrational")
        return Fraction(self.nums[0], self.den)

    def coords(self) -> tuple[Fraction, ...]:
        """Rational coordinates on the basis 1, theta, ..., theta^(d-1)."""
        lc = self.field._lc
        return tuple(Fraction(n * lc**i, self.den) for i, n in enumerate(self.nums))

    def __float__(self) -> float:
        return self.field.approx(self.nums, self.den)

    def __repr__(self) -> str:
        return f"FieldElement({self})"

    def __str__(self) -> str:
        cs = self.coords()
        if self.field.degree == 1:
            return str(cs[0])
        terms = []
        for i, c in enumerate(cs):
            if c == 0:
                continue
            mono = "" if i == 0 else ("t" if i == 1 else f"t^{i}")
            if i == 0:
                terms.append(str(c))
            elif c == 1:
                terms.append(mono)
            elif c == -1:
                terms.append("-" + mono)
            else:
                terms.append(f"{c}*{mono}")
        if not terms:
            return "0"
        return " + ".join(terms).replace("+ -", "- ")


QQ = NumberField([-1, 1], (1, 1), check=False)


def make_field(min_poly: Sequence[int], isolating_interval) -> NumberField:
    """Validated constructor; the degree one case is the rational field."""
    return NumberField(min_poly, isolating_interval, check=True)


def _chebyshev_2cos_poly(n: int) -> list[int]:
    """Integer polynomial P with P(2cos(x)) = 2cos(n x), constant term first."""
    prev, cur = [2], [0, 1]
    if n == 0:
        return prev
    for _ in range(n - 1):
        nxt = [0] + cur
        for i, c in enumerate(prev):
            nxt[i] -= c
        prev, cur = cur, nxt
    return cur


@lru_cache(maxsize=None)
def cos_field(n: int) -> tuple[NumberField, FieldElement]:
    """The field ``Q(2cos(pi/n))`` together with its generator ``2cos(pi/n)``."""
    import math

    import sympy

    if n < 1:
        raise ValueError("n must be positive")
    target = 2 * math.cos(math.pi / n)
    x = sympy.Symbol("x")
    poly = _chebyshev_2cos_poly(n)
    poly[0] += 2  # 2cos(n * pi/n) = -2
    P = sympy.Poly(list(reversed(poly)), x, domain="ZZ")
    best = None
    for fac, _ in P.factor_list()[1]:
        for r in sympy.Poly(fac, x).real_roots():
            if abs(float(r) - target) < 1e-9:
                best = fac
    assert best is not None
    coeffs = [int(c) for c in reversed(sympy.Poly(best, x).all_coeffs())]
    if coeffs[-1] < 0:
        coeffs = [-c for c in coeffs]
    if len(coeffs) == 2:
        field = QQ
        return field, field.rational(Fraction(-coeffs[0], coeffs[1]))
    # isolate with a short decimal interval around the float root
    poly_best = sympy.Poly(best, x)
    k = 2
    while True:
        scale = 10**k
        lo = Fraction(math.floor(target * scale), scale)
        hi = Fraction(math.ceil(target * scale) + (target * scale).is_integer(), scale)
        if poly_best.count_roots(sympy.Rational(lo.numerator, lo.denominator),
                                 sympy.Rational(hi.numerator, hi.denominator)) == 1:
            break
        k += 1
    field = NumberField(coeffs, (lo, hi), check=False)
    return field, field.gen()


def algebraic_field(expr) -> tuple[NumberField, FieldElement]:
    """Field generated by a real algebraic sympy expression, with that generator."""
    import math

    import sympy

    x = sympy.Symbol("x")
    mp = sympy.Poly(sympy.minimal_polynomial(expr, x), x)
    coeffs = [int(c) for c in reversed(mp.all_coeffs())]
    if coeffs[-1] < 0:
        coeffs = [-c for c in coeffs]
    if len(coeffs) == 2:
        return QQ, QQ.rational(Fraction(-coeffs[0], coeffs[1]))
    target = float(sympy.N(expr, 30))
    k = 2
    while True:
        scale = 10**k
        lo = Fraction(math.floor(target * scale) - 1, scale)
        hi = Fraction(math.ceil(target * scale) + 1, scale)
        if mp.count_roots(sympy.Rational(lo.numerator, lo.denominator),
                          sympy.Rational(hi.numerator, hi.denominator)) == 1:
            break
        k += 1
    field = NumberField(coeffs, (lo, hi), check=False)
    return field, field.gen()


@lru_cache(maxsize=None)
def tan_field(n: int) -> tuple[NumberField, FieldElement]:
    """The field ``Q(tan(pi/n))`` with generator ``tan(pi/n)``."""
    import sympy

    if n < 3:
        raise ValueError("n must be at least 3")
    return algebraic_field(sympy.tan(sympy.pi / n))


def common_field(*exprs) -> tuple[NumberField, list[FieldElement]]:
    """One field containing every real algebraic sympy expression given, plus their images."""
    import sympy

    exprs = [sympy.nsimplify(e) if not isinstance(e, sympy.Basic) else e for e in exprs]
    irr = [e for e in exprs if not e.is_rational]
    if not irr:
        return QQ, [QQ.rational(Fraction(int(e.p), int(e.q))) for e in exprs]
    x = sympy.Symbol("x")
    if len(irr) == 1:
        prim = irr[0]
    else:
        mp, coeffs = sympy.primitive_element(irr, x)
        prim = sum(c * e for c, e in zip(coeffs, irr))
    F, gen = algebraic_field(prim)
    out = []
    for e in exprs:
        if e.is_rational:
            out.append(F(Fraction(int(e.p), int(e.q))))
            continue
        ant = sympy.to_number_field(e, prim)
        cs = [Fraction(int(c.p), int(c.q)) for c in reversed(ant.coeffs())]
        acc = F(0)
        pw = F(1)
        for c in cs:
            acc = acc + pw * F(c)
            pw = pw * gen
        out.append(acc)
    return F, out


def compare(a: FieldElement, b: FieldElement) -> int:
    """Exact ordering: -1, 0 or 1."""
    if isinstance(a, FieldElement) and isinstance(b, FieldElement) and a.field != b.field \
            and a.field.degree > 1 and b.field.degree > 1:
        raise FieldMismatch(f"{a.field!r} vs {b.field!r}")
    if isinstance(a, FieldElement):
        return a._cmp(b)
    if isinstance(b, FieldElement):
        return -b._cmp(a)
    return (a > b) - (a < b)


def to_fraction(x) -> Fraction:
    if isinstance(x, FieldElement):
        return x.to_fraction()
    return _as_fraction(x)


def is_rational_ratio(a, b) -> Fraction | None:
    """Return ``r`` with ``a = r * b`` when ``a/b`` is rational, else ``None``."""
    if isinstance(b, FieldElement):
        if not b:
            raise ZeroDivisionError("ratio with zero denominator")
    elif b == 0:
        raise ZeroDivisionError("ratio with zero denominator")
    if not isinstance(a, FieldElement) and not isinstance(b, FieldElement):
        return _as_fraction(a) / _as_fraction(b)
    if not isinstance(a, FieldElement):
        a = b.field.element(a)
    if not isinstance(b, FieldElement):
        b = a.field.element(b)
    if a.field.degree == 1 and b.field.degree == 1:
        return a.to_fraction() / b.to_fraction()
    b = a._coerce(b) if a.field.degree > 1 else b
    a = b._coerce(a)
    # proportional coordinate vectors
    r = None
    for x, y in zip(a.nums, b.nums):
        if y == 0:
            if x != 0:
                return None
            continue
        cand = Fraction(x * b.den, y * a.den)
        if r is None:
            r = cand
        elif cand != r:
            return None
    return r


def floor(x) -> int:
    """Exact floor of a field element or rational."""
    if not isinstance(x, FieldElement):
        return _floor_frac(_as_fraction(x))
    if x.is_rational():
        return _floor_frac(x.to_fraction())
    guess = int(float(x) // 1)
    while x < guess:
        guess -= 1
    while x >= guess + 1:
        guess += 1
    return guess


def continued_fraction(x, terms: int) -> list[int]:
    """First ``terms`` partial quotients of ``x > 0``; shorter if ``x`` is rational."""
    out = []
    for _ in range(terms):
        a = floor(x)
        out.append(a)
        rem = x - a
        if (rem.sign() if isinstance(rem, FieldElement) else (rem > 0) - (rem < 0)) == 0:
            break
        x = 1 / rem
    return out


def convergents(x) -> Iterator[tuple[int, int]]:
    """Successive convergents ``(p, q)`` of ``x``, exact, lazily."""
    pm, qm = 0, 1  # p_{-2}, q_{-2}
    p_prev, q_prev = 1, 0  # p_{-1}, q_{-1}
    while True:
        a = floor(x)
        p, q = a * p_prev + pm, a * q_prev + qm
        yield p, q
        pm, qm, p_prev, q_prev = p_prev, q_prev, p, q
        rem = x - a
        if not rem:
            return
        x = 1 / rem


@dataclass(frozen=True)
class ApproxPair:
    p: int
    q: int
    defect: object  # p*w2 - q*w1


def approx_sequence(w1, w2, l, count: int) -> list[ApproxPair]:
    """Pairs ``(p, q)`` with ``q`` strictly increasing and ``|p w2 - q w1| < l``.

    The pairs are the convergents ``p/q`` of ``w1/w2`` that fall inside the
    window.  When ``w1/w2 = u/v`` is rational the sequence is ``(k u, k v)``.
    """
    r = is_rational_ratio(w1, w2)
    if r is not None:
        u, v = r.numerator, r.denominator
        return [ApproxPair(k * u, k * v, w2 * 0) for k in range(1, count + 1)]
    return window_sequence(w1 / w2, 1, -l / w2, l / w2, count, scale=w2)


def window_sequence(alpha, beta, lo, hi, count: int, scale=None, max_scan: int = 10**6) -> list[ApproxPair]:
    """Positive pairs with ``q`` strictly increasing and ``alpha q - beta p`` in ``]lo, hi[``.

    ``alpha/beta`` must be irrational and ``lo < hi``.  If ``0`` lies in the
    window the pairs are the convergents of ``alpha/beta`` inside it;
    otherwise a base pair found by scanning is shifted by those convergents.
    The recorded defect is ``-(alpha q - beta p) * scale`` (with ``scale``
    defaulting to 1), matching ``p w2 - q w1`` when ``alpha = w1/w2``.
    """
    if scale is None:
        scale = 1
    ratio = alpha / beta
    base_p = base_q = 0
    if not (lo < 0 < hi):
        # smallest q >= 1 admitting an integer p >= 0
        for q in range(1, max_scan):
            a = alpha * q
            # alpha q - beta p in ]lo, hi[  <=>  p in ](a - hi)/beta, (a - lo)/beta[
            pl, ph = (a - hi) / beta, (a - lo) / beta
            if beta < 0:
                pl, ph = ph, pl
            p = floor(pl) + 1
            if p < 0:
                p = 0
            if p < ph:
                base_p, base_q = p, q
                break
        else:
            raise RuntimeError("no base pair found in the window")
    out: list[ApproxPair] = []
    last_q = 0
    for cp, cq in convergents(ratio):
        p, q = base_p + cp, base_q + cq
        if p < 1 or q < 1 or q <= last_q:
            continue
        val = alpha * q - beta * p
        if lo < val < hi:
            out.append(ApproxPair(p, q, -val * scale))
            last_q = q
            if len(out) >= count:
                break
    return out
