import re
from fractions import Fraction

import pytest

from flatblock.blocking import torus_blocking_set
from flatblock.exactnum import QQ
from flatblock.flow import decompose, trace
from flatblock.render import LAYERS, render_svg
from flatblock.surface import l_shaped, regular_ngon_surface, torus


def test_deterministic_output():
    s = regular_ngon_surface(5)
    assert render_svg(s) == render_svg(regular_ngon_surface(5))


def test_torus_blockers_drawn():
    s = torus()
    pts = [s.point(0, x, y) for x, y in torus_blocking_set((0, 0), (Fraction(1, 2), Fraction(1, 2)))]
    svg = render_svg(s, blockers=pts, layers=("blockers",))
    assert len(re.findall(r"<rect ", svg)) == 4


def test_layers_subset_and_paths():
    s = l_shaped(1, 1)
    p = trace(s, s.point(0, Fraction(1, 3), Fraction(1, 7)), (QQ(3), QQ(4)), 5)
    svg = render_svg(s, paths=[p], blockers=[s.point(0, Fraction(1, 2), Fraction(1, 2))], cylinders=decompose(s, (QQ(1), QQ(0)), 20))
    for name in LAYERS:
        assert f'id="{name}"' in svg
    only = render_svg(s, layers=("polygons",))
    assert 'id="paths"' not in only and 'id="polygons"' in only


def test_unknown_layer():
    with pytest.raises(ValueError):
        render_svg(torus(), layers=("polygons", "shading"))
