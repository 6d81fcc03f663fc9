from fractions import Fraction

import pytest

from flatblock.billiard import (
    InvalidReflection,
    IrrationalAngle,
    NotAlmostIntegrable,
    RationalBilliard,
    BilliardTrajectory,
    almost_integrable_blocking,
    billiard_blocking_report,
    blocking_bound,
    equilateral_triangle,
    fold_path,
    half_equilateral_triangle,
    is_almost_integrable,
    lift_path,
    notched_polygon,
    orbit_in_table,
    pi_enclosure,
    regular_polygon,
    right_triangle,
    unit_square,
    zk_unfold,
)
from flatblock import _geom as g
from flatblock.exactnum import QQ
from flatblock.flow import trace


@pytest.mark.parametrize("make, order, stratum", [
    (unit_square, 4, "H(0)"),
    (equilateral_triangle, 6, "H(0)"),
    (half_equilateral_triangle, 12, "H(0)"),
    (lambda: right_triangle(4), 8, "H(0)"),
    (lambda: right_triangle(5), 20, "H(2)"),
    (notched_polygon, 4, "H(2)"),
    (lambda: regular_polygon(5), 10, "H(2,2,2,2,2)"),
])
def test_unfolding_group_and_stratum(make, order, stratum):
    b = make()
    s, fm = zk_unfold(b)
    assert b.group_order == order == len(s.polygons)
    assert str(s.stratum) == stratum
    assert s.area == order * b.area


def test_angle_checks():
    h = Fraction(1, 2)
    with pytest.raises(IrrationalAngle):
        RationalBilliard(QQ, ((0, 0), (1, 0), (1, 1), (0, 1)), (h, h, h, Fraction(1, 3)))
    with pytest.raises(IrrationalAngle):
        # sums correctly but does not match the geometry
        RationalBilliard(QQ, ((0, 0), (2, 0), (2, 1), (0, 1)), (Fraction(1, 3), Fraction(2, 3), h, h))


def test_almost_integrable_lattices():
    L = is_almost_integrable(unit_square())
    assert (L.v1, L.v2) == ((QQ(2), QQ(0)), (QQ(0), QQ(2)))
    b = equilateral_triangle()
    L = is_almost_integrable(b)
    r3 = b.polygon[2][1]
    assert (L.v1, L.v2) == ((3, -r3), (3, r3))
    assert is_almost_integrable(notched_polygon()) is None
    assert is_almost_integrable(right_triangle(5)) is None


def test_pi_enclosure():
    assert pi_enclosure(2) == (Fraction(333, 106), Fraction(355, 113))
    lo, hi = pi_enclosure(10)
    assert lo < Fraction(314159265359, 10**11) and hi > Fraction(314159265358, 10**11)


def test_square_bound_dominates_set_size():
    b = unit_square()
    L = is_almost_integrable(b)
    bound = blocking_bound(b, L)
    assert bound == 96
    r = almost_integrable_blocking(b, L, (Fraction(1, 3), Fraction(1, 5)), (Fraction(2, 3), Fraction(3, 7)))
    assert 0 < len(r.points) <= 16 <= bound


def test_square_blocking_set_blocks():
    b = unit_square()
    L = is_almost_integrable(b)
    O, A = (Fraction(1, 3), Fraction(1, 5)), (Fraction(2, 3), Fraction(3, 7))
    r = almost_integrable_blocking(b, L, O, A)
    total, unblocked = billiard_blocking_report(b, L, O, A, r.points, 20)
    assert total > 1000 and unblocked == []
    # dropping one point leaves some path open
    total2, unblocked2 = billiard_blocking_report(b, L, O, A, r.points[1:], 20)
    assert unblocked2


def test_equilateral_blocking_set_blocks():
    b = equilateral_triangle()
    L = is_almost_integrable(b)
    F = b.field
    O = (F(Fraction(4, 5)), F(Fraction(1, 5)) * b.polygon[2][1])
    A = (F(Fraction(6, 5)), F(Fraction(1, 3)) * b.polygon[2][1])
    r = almost_integrable_blocking(b, L, O, A)
    total, unblocked = billiard_blocking_report(b, L, O, A, r.points, 12)
    assert total > 100 and unblocked == []


def test_not_almost_integrable_raises():
    with pytest.raises(NotAlmostIntegrable):
        almost_integrable_blocking(notched_polygon(), None, (0, 0), (1, 1))


def test_orbit_in_table_square():
    b = unit_square()
    L = is_almost_integrable(b)
    pts = orbit_in_table(b, L, (QQ(Fraction(1, 3)), QQ(Fraction(1, 4))))
    assert pts == [(Fraction(1, 3), Fraction(1, 4))]


def test_fold_and_lift_round_trip():
    b = right_triangle(5)
    s, fm = zk_unfold(b)
    F = s.field
    start = fm.lift_point(0, (F(Fraction(3, 4)), F(Fraction(1, 10))))
    path = trace(s, start, (F(2), F(1) + F.gen()), 6)
    traj = fold_path(fm, path)
    assert isinstance(traj, BilliardTrajectory)
    assert traj.bounces >= 2
    back = lift_path(fm, 0, traj)
    assert back.holonomy == path.holonomy
    # reflection law at every bounce, exactly
    for k, e in enumerate(traj.edges):
        a, p, c = traj.points[k], traj.points[k + 1], traj.points[k + 2]
        side = g.sub(b.polygon[(e + 1) % 3], b.polygon[e])
        assert g.on_segment(p, b.polygon[e], b.polygon[(e + 1) % 3])
        u, w = g.sub(p, a), g.sub(c, p)
        r = g.sub(g.scale(side, 2 * g.dot(u, side) / g.norm2(side)), u)
        assert g.cross(r, w) == 0 and g.dot(r, w) > 0


def test_lift_rejects_bad_reflection():
    b = unit_square()
    s, fm = zk_unfold(b)
    h = Fraction(1, 2)
    bad = BilliardTrajectory([(QQ(h), QQ(h)), (QQ(1), QQ(Fraction(3, 4))), (QQ(h), QQ(h))], [1])
    with pytest.raises(InvalidReflection):
        lift_path(fm, 0, bad)
