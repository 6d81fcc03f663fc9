"""Finite blocking: decisions, blocking-set constructors and witness geodesics."""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field as dc_field
from fractions import Fraction
from typing import Callable, Iterable

from . import _geom as g
from .exactnum import (ApproxPair, FieldElement, approx_sequence, floor, is_rational_ratio,
                       window_sequence)
from .flow import (REACHED, CylinderDecomposition, GeodesicPath, TwoCylinderConfig,
                   connecting_geodesics, decompose, find_two_cylinder_config, path_hits,
                   saddle_connections, saddle_directions, trace)
from .surface import (BranchedCovering, IncommensurableInput, NonPositiveParameter, SurfacePoint,
                      SurfacePresentation, l_shaped, normalized_ngon_surface, regular_ngon_surface,
                      synthesize_torus_cover, two_cylinder_surface, verify_covering)

__all__ = [
    "Verdict",
    "BlockingDecision",
    "YesData",
    "NoData",
    "WitnessRecord",
    "BudgetExceeded",
    "CommensurableWidths",
    "HypothesisFailed",
    "DegenerateBlocking",
    "OddN",
    "RationalAlpha",
    "torus_blocking_set",
    "lift_blocking_set",
    "witness_geodesic",
    "witness_pair_general",
    "lemma_pair",
    "decide_fbp",
    "fbp_regular_ngon",
    "fbp_lshaped",
    "ngon_center_blocking",
    "no_self_saddle_check",
    "irrational_billiard_demo",
    "DEFAULT_MAX_N",
]

DEFAULT_MAX_N = 10**4


class BudgetExceeded(RuntimeError):
    pass


class CommensurableWidths(ValueError):
    pass


class HypothesisFailed(ValueError):
    pass


class DegenerateBlocking(RuntimeError):
    pass


class OddN(ValueError):
    """Raised for odd ``n``; ``demo`` holds an unblocked center-to-center trajectory when one was found."""

    def __init__(self, msg, demo=None):
        super().__init__(msg)
        self.demo = demo


class RationalAlpha(ValueError):
    pass


class Verdict(str, enum.Enum):
    YES = "YES"
    NO = "NO"
    UNKNOWN = "UNKNOWN"


# ---------------------------------------------------------------------------
# torus and coverings


def _pos(p):
    return p.position if isinstance(p, SurfacePoint) else p


def _reduce(v, lattice):
    b1, b2 = lattice
    a, b = g.solve_basis(b1, b2, v)
    a, b = a - floor(a), b - floor(b)
    return g.add(g.scale(b1, a), g.scale(b2, b))


def torus_blocking_set(O, A, lattice=((1, 0), (0, 1))) -> list:
    """Half-period translates of the midpoint of ``O`` and ``A``, reduced, without ``O`` and ``A``.

    Points are coordinate pairs in the fundamental parallelogram of ``lattice``.
    """
    O, A = _pos(O), _pos(A)
    if not isinstance(O[0], FieldElement) and not isinstance(A[0], FieldElement):
        O = (Fraction(O[0]), Fraction(O[1]))
        A = (Fraction(A[0]), Fraction(A[1]))
        lattice = tuple((Fraction(v[0]), Fraction(v[1])) for v in lattice)
    b1, b2 = lattice
    half = Fraction(1, 2)
    mid = g.scale(g.add(O, A), half)
    ro, ra = _reduce(O, lattice), _reduce(A, lattice)
    out = []
    for i in (0, 1):
        for j in (0, 1):
            p = _reduce(g.add(mid, g.add(g.scale(b1, half * i), g.scale(b2, half * j))), lattice)
            if g.same_point(p, ro) or g.same_point(p, ra) or p in out:
                continue
            out.append(p)
    return sorted(out, key=lambda p: (float(p[0]), float(p[1])))


def lift_blocking_set(c: BranchedCovering, O: SurfacePoint, A: SurfacePoint,
                      base_blocker: Callable = None) -> list[SurfacePoint]:
    """Full preimage of a blocking set for the images of ``O`` and ``A``."""
    if base_blocker is None:
        base_blocker = torus_blocking_set
    src = c.source
    po, pa = c.image(O), c.image(A)
    base = base_blocker(po.position, pa.position, c.lattice)
    co, ca = src.canonical(O), src.canonical(A)
    out = []
    for x, y in base:
        for q in c.preimages(SurfacePoint(0, x, y)):
            if q != co and q != ca and q not in out:
                out.append(q)
    return out


# ---------------------------------------------------------------------------
# witnesses


@dataclass
class WitnessRecord:
    n: int
    pair: ApproxPair
    lam: object
    slope: object
    path: GeodesicPath
    crossings: tuple  # (crossings of the c1 seam, crossings of the c2 seam)
    start: tuple  # chart coordinates of the endpoints
    end: tuple


def _pairs(make: Callable[[int], list], max_n: int):
    have = 0
    count = 8
    while have < max_n:
        count = min(count, max_n)
        seq = make(count)
        for pr in seq[have:]:
            yield pr
        if len(seq) < count:
            return
        have = len(seq)
        count *= 4


def lemma_pair(cfg: TwoCylinderConfig):
    """Chart coordinates of the designated pair: above and below the middle of the shared interval.

    The vertical offset is 1 when both heights exceed 1; otherwise half the
    smaller height, which amounts to a vertical dilation of the surface.
    """
    F = cfg.surface.field
    one = F(1)
    eps = one if (cfg.h1 > one and cfg.h2 > one) else min(cfg.h1, cfg.h2, key=lambda z: z) / 2
    x0 = cfg.w1 - cfg.l / 2
    return (x0, -eps), (x0, eps)


def _integer(x) -> bool:
    if isinstance(x, FieldElement):
        if not x.is_rational():
            return False
        x = x.to_fraction()
    return Fraction(x).denominator == 1


def _chart_avoid(cfg, avoid):
    out = []
    for pt in avoid:
        c = cfg.chart(pt)
        if c is not None:
            out.append(c)
    return out


def _chart_hit(cfg, P1, P2, H, pts) -> bool:
    (x1, y1), (_, y2) = P1, P2
    dy = y2 - y1
    for xa, ya in pts:
        if not (y1 < ya < y2):
            continue
        x = x1 + (ya - y1) * H / dy
        mod = cfg.w1 if ya <= 0 else cfg.w2
        if _integer((x - xa) / mod):
            return True
    return False


def _count_between(lo, hi, start, step) -> int:
    """Number of integers k with ``lo < start + k step < hi``."""
    a = (lo - start) / step
    b = (hi - start) / step
    first = floor(a) + 1
    last = -floor(-b) - 1
    return max(0, last - first + 1)


def _length_bound(v) -> Fraction:
    return Fraction(math.isqrt(int(float(v[0]) ** 2 + float(v[1]) ** 2) + 1) + 2)


def _witness_search(cfg: TwoCylinderConfig, P1, P2, pairs, lam_of, lam_range, avoid, max_n):
    s = cfg.surface
    F = s.field
    P1 = (F(P1[0]), F(P1[1]))
    P2 = (F(P2[0]), F(P2[1]))
    O = cfg.embedding(*P1)
    A = cfg.embedding(*P2)
    avoid = list(avoid)
    pts = _chart_avoid(cfg, avoid)
    inv = g.matinv(cfg.frame)
    (x1, y1), (x2, y2) = P1, P2
    lo_l, hi_l = lam_range
    for n, pr in enumerate(pairs):
        if n >= max_n:
            break
        p, q = pr.p, pr.q
        H = cfg.w1 * q + cfg.w2 * p + x2 - x1
        lam = lam_of(p, q)
        if not (lo_l < lam < hi_l):
            raise AssertionError(f"parameter {lam} outside its interval")
        if _chart_hit(cfg, P1, P2, H, pts):
            continue
        d = g.matvec(inv, (H, y2 - y1))
        path = trace(s, O, d, _length_bound(d), targets=[A])
        if path.terminal != REACHED or path.holonomy != d:
            continue
        if path_hits(path, avoid, s):
            continue
        # crossings from the traced displacement, split at the interface
        Ht = g.matvec(cfg.frame, path.holonomy)[0]
        H1 = Ht * (-y1) / (y2 - y1)
        xc = x1 + H1
        c1 = _count_between(x1, xc, F(0), cfg.w1)
        # back into the shared interval before entering c2
        xs = xc - cfg.w1 * floor((xc - (cfg.w1 - cfg.l)) / cfg.w1)
        c2 = _count_between(xs, xs + Ht - H1, cfg.w1 - cfg.l, cfg.w2)
        return WitnessRecord(n, pr, lam, (y2 - y1) / H, path, (c1, c2), P1, P2)
    raise BudgetExceeded(f"no witness among the first {max_n} pairs")


def witness_geodesic(cfg: TwoCylinderConfig, O=None, A=None, avoid: Iterable[SurfacePoint] = (),
                     max_n: int = DEFAULT_MAX_N) -> WitnessRecord:
    """First geodesic of the two-cylinder family from ``O`` to ``A`` that misses ``avoid``.

    ``O`` and ``A`` default to :func:`lemma_pair` (chart coordinates).
    Pair ``n`` has slope ``2 eps / (q w1 + p w2)`` and crosses the shared
    interval at ``w1 - l/2 + lam`` with ``lam = (p w2 - q w1) / 2``.
    """
    if is_rational_ratio(cfg.w1, cfg.w2) is not None:
        raise CommensurableWidths("widths are commensurable")
    dO, dA = lemma_pair(cfg)
    O = dO if O is None else O
    A = dA if A is None else A
    w1, w2, l = cfg.w1, cfg.w2, cfg.l
    pairs = _pairs(lambda k: approx_sequence(w1, w2, l, k), max_n)
    rec = _witness_search(cfg, O, A, pairs, lambda p, q: (p * w2 - q * w1) / 2, (-l / 2, l / 2),
                          avoid, max_n)
    return rec


def witness_pair_general(cfg: TwoCylinderConfig, A1, A2, avoid: Iterable[SurfacePoint] = (),
                         max_n: int = DEFAULT_MAX_N) -> WitnessRecord:
    """Witness family between ``A1`` in ``c1`` and ``A2`` in ``c2`` (chart coordinates or surface points).

    Requires ``w1/w2`` irrational and ``(-y1/y2) / (w1/w2)`` irrational.
    """
    if isinstance(A1, SurfacePoint):
        A1 = cfg.chart(A1)
    if isinstance(A2, SurfacePoint):
        A2 = cfg.chart(A2)
    F = cfg.surface.field
    x1, y1 = F(A1[0]), F(A1[1])
    x2, y2 = F(A2[0]), F(A2[1])
    if not (y1 < 0 < y2):
        raise ValueError("A1 must lie in c1 and A2 in c2")
    w1, w2, l = cfg.w1, cfg.w2, cfg.l
    if is_rational_ratio(w1, w2) is not None:
        raise CommensurableWidths("widths are commensurable")
    alpha = w1 / w2
    beta = -y1 / y2
    if is_rational_ratio(beta, alpha) is not None:
        raise HypothesisFailed("beta is commensurable to alpha")
    R = y1 * (x2 - x1) + (y2 - y1) * (w1 - l - x1)
    lo = -(R + l * (y2 - y1)) / (w2 * y2)
    hi = -R / (w2 * y2)
    pairs = _pairs(lambda k: window_sequence(alpha, beta, lo, hi, k, scale=w2), max_n)

    def lam(p, q):
        return -(y2 * w1 * q + y1 * w2 * p + R) / (y2 - y1)

    return _witness_search(cfg, (x1, y1), (x2, y2), pairs, lam, (F(0), l), avoid, max_n)


# ---------------------------------------------------------------------------
# decisions


@dataclass
class YesData:
    covering: BranchedCovering
    report: object

    def blocking_set(self, O: SurfacePoint, A: SurfacePoint) -> list[SurfacePoint]:
        return lift_blocking_set(self.covering, O, A, torus_blocking_set)


@dataclass
class NoData:
    config: TwoCylinderConfig
    O: SurfacePoint
    A: SurfacePoint
    ratio: object

    def witness(self, avoid: Iterable[SurfacePoint] = (), max_n: int = DEFAULT_MAX_N) -> WitnessRecord:
        return witness_geodesic(self.config, avoid=avoid, max_n=max_n)


@dataclass
class BlockingDecision:
    verdict: Verdict
    yes_data: YesData | None = None
    no_data: NoData | None = None
    budget_report: dict = dc_field(default_factory=dict)

    def __str__(self):
        return self.verdict.value


def _no(cfg: TwoCylinderConfig, report=None) -> BlockingDecision:
    P1, P2 = lemma_pair(cfg)
    nd = NoData(cfg, cfg.embedding(*P1), cfg.embedding(*P2), cfg.w2 / cfg.w1)
    return BlockingDecision(Verdict.NO, no_data=nd, budget_report=report or {})


def _yes(cov: BranchedCovering, report=None) -> BlockingDecision | None:
    rep = verify_covering(cov)
    if not rep.ok or len(rep.branch_points) != 1:
        return None
    return BlockingDecision(Verdict.YES, yes_data=YesData(cov, rep), budget_report=report or {})


def _commensurable(dec: CylinderDecomposition) -> bool:
    w0 = dec.cylinders[0].width
    for c in dec.cylinders:
        if is_rational_ratio(c.width, w0) is None or is_rational_ratio(c.height, c.width) is None:
            return False
    return True


def _incommensurable_config(dec):
    for cfg in find_two_cylinder_config(dec):
        if is_rational_ratio(cfg.w1, cfg.w2) is None:
            return cfg
    return None


def decide_fbp(s: SurfacePresentation, saddle_length=6, decomp_length=40, directions=12) -> BlockingDecision:
    """YES, NO or UNKNOWN from the cylinder decompositions along short saddle directions."""
    report = {"saddle_length": saddle_length, "decomp_length": decomp_length, "directions": directions,
              "tried": [], "undecomposed": [], "commensurable": []}
    good = []
    for d in saddle_directions(s, saddle_length)[:directions]:
        report["tried"].append(d)
        dec = decompose(s, d, decomp_length)
        if dec is None:
            report["undecomposed"].append(d)
            continue
        cfg = _incommensurable_config(dec)
        if cfg is not None:
            return _no(cfg, report)
        if _commensurable(dec):
            report["commensurable"].append(d)
            good.append((d, dec))
            if len(good) == 2:
                try:
                    cov = synthesize_torus_cover(s, good[0][0], good[1][0], good[0][1], good[1][1])
                except IncommensurableInput:
                    cov = None
                if cov is not None:
                    res = _yes(cov, report)
                    if res is not None:
                        return res
    return BlockingDecision(Verdict.UNKNOWN, budget_report=report)


def fbp_regular_ngon(n: int) -> BlockingDecision:
    """YES exactly for ``n`` in 3, 4, 6 (torus-cover certificate), NO otherwise (two-cylinder certificate)."""
    if n < 3:
        raise ValueError("n must be at least 3")
    if n in (3, 4, 6):
        s = regular_ngon_surface(n)
        F = s.field
        d1, d2 = (F(1), F(0)), (F(0), F(1))
        dec1, dec2 = decompose(s, d1, 40), decompose(s, d2, 40)
        res = _yes(synthesize_torus_cover(s, d1, d2, dec1, dec2))
        assert res is not None
        return res
    s = normalized_ngon_surface(n)
    return _no(s.marked_config)


def fbp_lshaped(a, b) -> BlockingDecision:
    """YES iff both legs are rational; NO comes with the horizontal (or vertical) configuration."""
    s = l_shaped(a, b)
    F = s.field
    a, b = F(a), F(b)
    ra, rb = is_rational_ratio(a, F(1)), is_rational_ratio(b, F(1))
    horiz, vert = (F(1), F(0)), (F(0), F(1))
    if ra is not None and rb is not None:
        dh, dv = decompose(s, horiz, 40), decompose(s, vert, 40)
        res = _yes(synthesize_torus_cover(s, horiz, vert, dh, dv))
        assert res is not None
        return res
    d = horiz if ra is None else vert
    cfg = _incommensurable_config(decompose(s, d, 40))
    assert cfg is not None
    return _no(cfg)


# ---------------------------------------------------------------------------
# diagnostics


@dataclass
class SelfSaddleReport:
    connections: list  # (start class, end class, holonomy)
    self_connections: list
    singular_classes: list

    @property
    def ok(self) -> bool:
        return not self.self_connections


def no_self_saddle_check(s: SurfacePresentation, max_length) -> SelfSaddleReport:
    """Saddle connections leaving singular vertex classes, and those that return to their start."""
    sing = [i for i in range(len(s.vertex_classes)) if not s.is_removable_class(i)]
    if not sing:
        sing = list(range(len(s.vertex_classes)))
    conns = []
    for c in saddle_connections(s, max_length, classes=sing):
        conns.append((c.start_class, c.end_class, c.holonomy))
    selfc = [c for c in conns if c[0] == c[1]]
    return SelfSaddleReport(conns, selfc, sing)


@dataclass
class CenterBlockingReport:
    points: list
    max_length: object
    paths_checked: int
    unblocked: list

    @property
    def ok(self) -> bool:
        return not self.unblocked


def ngon_center_blocking(n: int, max_length=30, demo_length=12) -> CenterBlockingReport:
    """Edge midpoints and vertices of the regular n-gon table, checked against center-to-center paths."""
    from .billiard import billiard_blocking_report, is_almost_integrable, regular_polygon, zk_unfold

    b = regular_polygon(n)
    F = b.field
    O = (F(0), F(0))
    m = len(b.polygon)
    pts = list(b.polygon) + [g.scale(g.add(b.polygon[i], b.polygon[(i + 1) % m]), F(Fraction(1, 2)))
                             for i in range(m)]
    if n % 2:
        demo = _odd_demo(b, O, pts, demo_length)
        raise OddN(f"n={n} is odd", demo)
    basis = is_almost_integrable(b)
    if basis is not None:
        count, bad = billiard_blocking_report(b, basis, O, O, pts, max_length)
        return CenterBlockingReport(pts, max_length, count, bad)
    s, f = zk_unfold(b)
    blockers = [f.lift_point(k, x) for k in range(len(f.group)) for x in pts]
    start = f.lift_point(0, O)
    count, bad = 0, []
    for k in range(len(f.group)):
        tgt = f.lift_point(k, O)
        paths = connecting_geodesics(s, start, tgt, max_length)
        count += len(paths)
        bad.extend(p for p in paths if not path_hits(p, blockers, s))
    return CenterBlockingReport(pts, max_length, count, bad)


def _odd_demo(b, O, pts, max_length):
    """Center-to-center trajectory leaving at angle ``pi/2n`` from a vertex ray, if it avoids ``pts``."""
    from .billiard import fold_path, zk_unfold

    s, f = zk_unfold(b)
    n = len(b.polygon)
    F = b.field
    v0, v1 = b.polygon[0], b.polygon[1]
    mid = g.scale(g.add(v0, v1), F(Fraction(1, 2)))
    # |mid| = cos(pi/n) = -x-coordinate of vertex (n-1)/2 for odd n
    apothem = -b.polygon[(n - 1) // 2][0]
    d = g.add(v0, g.scale(mid, 1 / apothem))
    start = f.lift_point(0, O)
    targets = [f.lift_point(k, O) for k in range(len(f.group))]
    path = trace(s, start, d, max_length, targets=targets)
    if path.terminal != REACHED:
        return None
    blockers = [f.lift_point(k, x) for k in range(len(f.group)) for x in pts]
    if path_hits(path, blockers, s):
        return None
    return fold_path(f, path)


def irrational_billiard_demo(theta, alpha) -> tuple[SurfacePresentation, BlockingDecision]:
    """Two-cylinder piece of widths 1 and ``alpha`` found in the unfolding of a non-rational table.

    ``theta`` only shapes the rest of the table and does not enter the piece.
    """
    from .exactnum import QQ as _QQ

    F = alpha.field if isinstance(alpha, FieldElement) else _QQ
    a = F(alpha)
    if is_rational_ratio(a, F(1)) is not None:
        raise RationalAlpha("alpha must be irrational")
    if not a > 0:
        raise NonPositiveParameter("alpha must be positive")
    one = F(1)
    l = min(one, a, key=lambda z: z)
    s = two_cylinder_surface(one, one, a, one, l, field=F)
    dec = decompose(s, (one, F(0)), 40)
    cfg = _incommensurable_config(dec)
    assert cfg is not None
    res = _no(cfg, {"theta": theta})
    return s, res
