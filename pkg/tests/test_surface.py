from fractions import Fraction

import pytest
import sympy

from flatblock.exactnum import QQ, common_field, cos_field
from flatblock.flow import decompose
from flatblock.surface import (
    EdgeMismatch,
    IncommensurableInput,
    NonPositiveParameter,
    NotConnected,
    OrientationError,
    SurfacePoint,
    UnsupportedN,
    apply_gl2,
    build,
    cylinder_presentation,
    double_cover_fomin,
    l_shaped,
    normalized_ngon_surface,
    regular_ngon_surface,
    square_tiled,
    synthesize_torus_cover,
    torus,
    two_cylinder_surface,
    verify_covering,
)

# double odd n-gon: H(n-3); single n-gon, n = 0 mod 4: H(n/2 - 2); n = 2 mod 4: H((n-6)/4, (n-6)/4)
STRATA = {3: "H(0)", 4: "H(0)", 5: "H(2)", 6: "H(0)", 7: "H(4)", 8: "H(2)",
          9: "H(6)", 10: "H(1,1)", 11: "H(8)", 12: "H(4)"}


@pytest.mark.parametrize("n", sorted(STRATA))
def test_regular_ngon_strata(n):
    s = regular_ngon_surface(n)
    assert str(s.stratum) == STRATA[n]
    assert len(s.polygons) == (2 if n % 2 else 1)


def test_gauss_bonnet_on_builders():
    F, (r2,) = common_field(sympy.sqrt(2))
    for s in [torus(), l_shaped(1, 1), l_shaped(r2, 1, field=F), double_cover_fomin()[0],
              two_cylinder_surface(1, 2, r2, 2, 1, field=F), regular_ngon_surface(9)]:
        assert sum(k - 1 for k in s.cone_angles) == 2 * s.genus - 2


def test_l_shape_is_genus_two():
    s = l_shaped(1, 1)
    assert str(s.stratum) == "H(2)"
    assert s.area == 3


def test_bad_gluing_rejected():
    sq = [(0, 0), (1, 0), (1, 1), (0, 1)]
    with pytest.raises(EdgeMismatch):
        build(QQ, [sq], {(0, 0): (0, 1), (0, 2): (0, 3)})
    with pytest.raises(EdgeMismatch):
        build(QQ, [sq], {(0, 0): (0, 2)})


def test_clockwise_polygon_rejected():
    sq = [(0, 0), (0, 1), (1, 1), (1, 0)]
    with pytest.raises(OrientationError):
        build(QQ, [sq], {(0, 0): (0, 2), (0, 1): (0, 3)})


def test_disconnected_rejected():
    sq = [(0, 0), (1, 0), (1, 1), (0, 1)]
    gl = {(0, 0): (0, 2), (0, 1): (0, 3), (1, 0): (1, 2), (1, 1): (1, 3)}
    with pytest.raises(NotConnected):
        build(QQ, [sq, sq], gl)


def test_nonpositive_parameters():
    with pytest.raises(NonPositiveParameter):
        l_shaped(0, 1)
    with pytest.raises(NonPositiveParameter):
        two_cylinder_surface(1, 1, 1, 1, 2)


def test_unsupported_normalized_n():
    with pytest.raises(UnsupportedN):
        normalized_ngon_surface(6)


def test_gl2_image_keeps_stratum_and_scales_area():
    s = regular_ngon_surface(5)
    M = ((2, 1), (1, 1))
    t = apply_gl2(M, s)
    assert t.stratum == s.stratum
    assert t.area == s.area
    t2 = apply_gl2(((3, 0), (0, 1)), s)
    assert t2.area == 3 * s.area


def test_edge_points_identified():
    s = torus()
    a = SurfacePoint(0, QQ(0), QQ(Fraction(1, 3)))
    b = SurfacePoint(0, QQ(1), QQ(Fraction(1, 3)))
    assert s.same_point(a, b)
    assert s.canonical(a) == s.canonical(b)
    assert not s.same_point(a, SurfacePoint(0, QQ(Fraction(1, 2)), QQ(Fraction(1, 3))))


def test_fomin_cover_structure():
    s, cov = double_cover_fomin()
    assert str(s.stratum) == "H(1,1,1,1)"
    rep = verify_covering(cov)
    assert rep.ok and rep.degree == 2
    half = Fraction(1, 2)
    assert sorted((p.x.to_fraction(), p.y.to_fraction()) for p in rep.branch_points) == \
        [(0, 0), (0, half), (half, 0), (half, half)]
    generic = SurfacePoint(0, QQ(Fraction(1, 5)), QQ(Fraction(2, 7)))
    assert len(cov.preimages(generic)) == 2
    assert len(cov.preimages(SurfacePoint(0, QQ(0), QQ(0)))) == 1


def test_square_tiled_origami():
    # L-shaped three-square origami
    s = square_tiled([1, 0, 2], [2, 1, 0])
    assert s.area == 3
    assert s.genus == 2


def test_cylinder_presentation_preserves_stratum_and_area():
    s = regular_ngon_surface(7)
    F = s.field
    dec = decompose(s, (F(1), F(0)), 40)
    t = cylinder_presentation(dec)
    assert t.stratum == s.stratum
    assert t.area == s.area
    assert len(t.polygons) == len(dec.cylinders)


@pytest.mark.parametrize("n", [5, 7, 8, 9, 10, 12])
def test_normalized_ngon_ratio(n):
    s = normalized_ngon_surface(n)
    assert s.stratum == regular_ngon_surface(n).stratum
    cfg = s.marked_config
    F, t = cos_field(n)
    assert s.field == F
    # t = 2cos(pi/n), so t^2 - 1 = 1 + 2cos(2pi/n)
    assert cfg.w2 / cfg.w1 == F(t * t - 1)


def test_torus_cover_needs_commensurable_data():
    F, (r2,) = common_field(sympy.sqrt(2))
    s = l_shaped(r2, 1, field=F)
    h, v = (F(1), F(0)), (F(0), F(1))
    with pytest.raises(IncommensurableInput):
        synthesize_torus_cover(s, h, v, decompose(s, h, 40), decompose(s, v, 40))
    s = l_shaped(2, 3)
    h, v = (QQ(1), QQ(0)), (QQ(0), QQ(1))
    cov = synthesize_torus_cover(s, h, v, decompose(s, h, 40), decompose(s, v, 40))
    rep = verify_covering(cov)
    assert rep.ok and len(rep.branch_points) == 1
