from fractions import Fraction

import pytest
import sympy

from flatblock import io
from flatblock.billiard import equilateral_triangle, right_triangle, unit_square
from flatblock.exactnum import QQ, common_field
from flatblock.surface import build, double_cover_fomin, l_shaped, regular_ngon_surface, torus

F2, (R2,) = common_field(sympy.sqrt(2))


@pytest.mark.parametrize("make", [
    torus,
    lambda: l_shaped(1, 2),
    lambda: l_shaped(R2, 1, field=F2),
    lambda: regular_ngon_surface(5),
    lambda: regular_ngon_surface(8),
    lambda: double_cover_fomin()[0],
])
def test_surface_round_trip(make):
    s = make()
    text = io.dump_surface(s)
    t = io.load_surface(text)
    assert io.dump_surface(t) == text
    assert t.stratum == s.stratum and t.area == s.area


def test_labels_survive():
    t = torus()
    s = build(QQ, t.polygons, t.gluings, labels={"O": t.point(0, Fraction(1, 3), Fraction(1, 5))})
    back = io.load_surface(io.dump_surface(s))
    assert back.labels == s.labels


def test_element_format():
    x = 3 + Fraction(1, 2) * R2
    assert io.format_element(x, F2) == "3,1/2"
    assert io.parse_element("3,1/2", F2) == x
    assert io.parse_element("7", F2) == 7
    with pytest.raises(io.ParseError):
        io.parse_element("1,2,3", F2)
    with pytest.raises(io.ParseError):
        io.parse_element("x", F2)


def test_points_round_trip():
    s = regular_ngon_surface(5)
    F = s.field
    pts = [s.point(0, F(Fraction(1, 3)), F.gen() / 4), s.point(1, F(Fraction(2, 5)), F(Fraction(1, 7)))]
    text = io.dump_points(pts, F)
    assert io.load_points(text, F) == pts


def test_certificate_round_trip():
    s = l_shaped(R2, 1, field=F2)
    c = io.Certificate("NO", s, direction=(F2(1), F2(0)), config_index=1,
                       widths=(1 + R2, F2(1)), ratio=1 + R2, budget={"saddle_length": "6"})
    text = io.dump_certificate(c)
    back = io.load_certificate(text)
    assert back == c
    assert io.dump_certificate(back) == text
    y = io.Certificate("YES", torus(), lattice=((QQ(1), QQ(0)), (QQ(0), QQ(1))),
                       shifts=[(QQ(0), QQ(0))], degree=1)
    assert io.load_certificate(io.dump_certificate(y)) == y


def test_path_round_trip():
    r = io.PathRecord(1, 2, 3, (F2(2), 1 + R2),
                      [(0, (F2(0), F2(Fraction(1, 2))), (R2 / 2, F2(1))), (1, (F2(0), F2(0)), (F2(1), R2))])
    text = io.dump_path(r, F2)
    assert io.load_path(text, F2) == r
    assert io.dump_path(io.load_path(text, F2), F2) == text


@pytest.mark.parametrize("make", [unit_square, equilateral_triangle, lambda: right_triangle(5)])
def test_billiard_round_trip(make):
    b = make()
    text = io.dump_billiard(b)
    c = io.load_billiard(text)
    assert c.angles == b.angles and c.polygon == b.polygon
    assert io.dump_billiard(c) == text


@pytest.mark.parametrize("text", [
    "",
    "flatblock-surface 2\nfield QQ\nend\n",
    "flatblock-surface 1\nfield QQ\npolygon 4\nvertex 0 0\nvertex 1 0\n",
    "flatblock-surface 1\nfield QQ\nbogus\nend\n",
    "flatblock-surface 1\nfield 1 0 1 interval 0 1\nend\n",
    # square with one edge left unglued
    "flatblock-surface 1\nfield QQ\npolygon 4\nvertex 0 0\nvertex 1 0\nvertex 1 1\nvertex 0 1\nglue 0 0 0 2\nend\n",
])
def test_malformed_surface(text):
    with pytest.raises(io.ParseError):
        io.load_surface(text)


def test_malformed_certificate_and_points():
    with pytest.raises(io.ParseError):
        io.load_certificate("flatblock-certificate 1\nverdict MAYBE\n")
    with pytest.raises(io.ParseError):
        io.load_points("flatblock-points 1\npoint 0 1\nend\n", QQ)
    with pytest.raises(io.ParseError):
        io.load_points("flatblock-points 1\npoint 0 1 1\n", QQ)
