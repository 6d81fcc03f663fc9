from fractions import Fraction

import pytest
import sympy

from flatblock.blocking import (
    BudgetExceeded,
    HypothesisFailed,
    OddN,
    RationalAlpha,
    Verdict,
    decide_fbp,
    fbp_lshaped,
    fbp_regular_ngon,
    irrational_billiard_demo,
    lemma_pair,
    lift_blocking_set,
    ngon_center_blocking,
    no_self_saddle_check,
    torus_blocking_set,
    witness_geodesic,
    witness_pair_general,
)
from flatblock.exactnum import QQ, common_field
from flatblock.flow import connecting_geodesics, decompose, find_two_cylinder_config, path_hits
from flatblock.surface import (
    double_cover_fomin,
    l_shaped,
    normalized_ngon_surface,
    regular_ngon_surface,
    torus,
    two_cylinder_surface,
)
from flatblock._lattice import coset_hits_open_segment, vectors_in_disk

F2, (R2,) = common_field(sympy.sqrt(2))
Q = Fraction


@pytest.fixture(scope="module")
def cfg():
    s = two_cylinder_surface(1, 2, R2, 2, 1, field=F2)
    dec = decompose(s, (F2(1), F2(0)), 40)
    return [c for c in find_two_cylinder_config(dec) if c.w1 == 1][0]


def _torus_unblocked(O, A, blockers, R):
    """Enumerate every O->A geodesic on the unit torus up to length R."""
    unit = ((1, 0), (0, 1))
    bad = 0
    for X in vectors_in_disk(A, unit, O, R * R):
        if not any(coset_hits_open_segment(b, unit, O, X) for b in blockers):
            bad += 1
    return bad


@pytest.mark.parametrize("O, A, expected", [
    ((0, 0), (Q(1, 2), Q(1, 2)), [(Q(1, 4), Q(1, 4)), (Q(1, 4), Q(3, 4)), (Q(3, 4), Q(1, 4)), (Q(3, 4), Q(3, 4))]),
    ((0, 0), (0, 0), [(0, Q(1, 2)), (Q(1, 2), 0), (Q(1, 2), Q(1, 2))]),
    ((0, 0), (Q(1, 3), 0), [(Q(1, 6), 0), (Q(1, 6), Q(1, 2)), (Q(2, 3), 0), (Q(2, 3), Q(1, 2))]),
])
def test_torus_blocking_examples(O, A, expected):
    pts = torus_blocking_set(O, A)
    assert pts == expected
    assert _torus_unblocked(O, A, pts, 25) == 0


def test_torus_three_points_are_needed_for_O_equal_A():
    O = (Q(1, 5), Q(2, 7))
    pts = torus_blocking_set(O, O)
    assert len(pts) == 3
    for k in range(3):
        assert _torus_unblocked(O, O, pts[:k] + pts[k + 1:], 3) > 0


def test_fomin_lifted_set_blocks():
    s, cov = double_cover_fomin()
    O = s.point(0, Q(1, 7), Q(1, 9))
    x0, y0 = s.polygons[3][0]
    A = s.point(3, x0 + Q(1, 5), y0 + Q(3, 11))
    B = lift_blocking_set(cov, O, A)
    assert 0 < len(B) <= 8
    assert connecting_geodesics(s, O, A, 10, blockers=B) == []
    assert connecting_geodesics(s, O, A, 10, blockers=B[1:])


def test_lemma_pair_unit_offset(cfg):
    (x1, y1), (x2, y2) = lemma_pair(cfg)
    assert x1 == x2 == cfg.w1 - cfg.l / 2
    assert (y1, y2) == (-1, 1)


def test_witness_first_pair(cfg):
    w = witness_geodesic(cfg)
    assert w.n == 0
    assert (w.pair.p, w.pair.q) == (1, 1)
    assert w.slope == 2 / (1 + R2)
    assert w.crossings == (1, 1)


def test_witness_skips_blocked_pair(cfg):
    w0 = witness_geodesic(cfg)
    x0 = cfg.w1 - cfg.l / 2
    crossing = cfg.embedding(x0 + w0.lam, 0)
    assert path_hits(w0.path, [crossing], cfg.surface)
    w1 = witness_geodesic(cfg, avoid=[crossing])
    assert w1.n == 1
    assert (w1.pair.p, w1.pair.q) == (2, 3)
    assert w1.crossings == (3, 2)
    assert not path_hits(w1.path, [crossing], cfg.surface)


def test_witness_budget(cfg):
    w0 = witness_geodesic(cfg)
    crossing = cfg.embedding(cfg.w1 - cfg.l / 2 + w0.lam, 0)
    with pytest.raises(BudgetExceeded):
        witness_geodesic(cfg, avoid=[crossing], max_n=1)


def test_general_pair_specializes_to_lemma(cfg):
    P1, P2 = lemma_pair(cfg)
    a = witness_pair_general(cfg, P1, P2)
    b = witness_geodesic(cfg)
    assert a.n == b.n and (a.pair.p, a.pair.q) == (b.pair.p, b.pair.q)
    assert a.path.holonomy == b.path.holonomy


def test_general_pair_window(cfg):
    w = witness_pair_general(cfg, (F2(Q(3, 4)), F2(Q(-1, 2))), (F2(Q(3, 4)), F2(Q(1, 3))))
    assert 0 < w.lam < cfg.l
    assert (w.pair.p, w.pair.q) == (1, 2)


def test_general_pair_commensurable_gate(cfg):
    x0 = cfg.w1 - cfg.l / 2
    # beta = -y1/y2 equal to alpha = w1/w2
    with pytest.raises(HypothesisFailed):
        witness_pair_general(cfg, (x0, -F2(Q(1, 2)) / R2), (x0, F2(Q(1, 2))))


def test_decide_fbp_examples():
    assert decide_fbp(torus()).verdict == Verdict.YES
    d = decide_fbp(normalized_ngon_surface(5))
    assert d.verdict == Verdict.NO
    assert decide_fbp(l_shaped(1, R2, field=F2)).verdict == Verdict.NO
    assert decide_fbp(double_cover_fomin()[0]).verdict == Verdict.YES


def test_decide_unknown_with_tiny_budget():
    d = decide_fbp(l_shaped(1, R2, field=F2), saddle_length=1, decomp_length=1, directions=1)
    assert d.verdict == Verdict.UNKNOWN
    assert d.budget_report["undecomposed"]


def test_regular_ngon_examples():
    assert fbp_regular_ngon(3).verdict == Verdict.YES
    d5 = fbp_regular_ngon(5)
    assert d5.verdict == Verdict.NO
    phi = d5.no_data.ratio
    assert phi * phi == phi + 1 and phi > 1
    d12 = fbp_regular_ngon(12)
    r = d12.no_data.ratio
    assert (r - 1) * (r - 1) == 3 and r > 1


def test_lshaped_examples():
    assert fbp_lshaped(2, 3).verdict == Verdict.YES
    d = fbp_lshaped(R2, 1)
    assert d.verdict == Verdict.NO
    assert {d.no_data.config.w1, d.no_data.config.w2} == {1 + R2, F2(1)}
    F, (one, phi) = common_field(1, (1 + sympy.sqrt(5)) / 2)
    d = fbp_lshaped(one, phi)
    assert d.verdict == Verdict.NO
    assert d.no_data.config.decomposition.direction.dx == 0


def test_center_blocking_even():
    r = ngon_center_blocking(4, max_length=20)
    assert r.ok and r.paths_checked > 0


def test_center_blocking_odd_demo():
    with pytest.raises(OddN) as exc:
        ngon_center_blocking(5)
    demo = exc.value.demo
    assert demo is not None and demo.bounces >= 1
    assert demo.points[0] == demo.points[-1]


def test_self_saddle_controls():
    s, _ = double_cover_fomin()
    rep = no_self_saddle_check(s, 6)
    assert rep.connections and rep.ok
    assert not no_self_saddle_check(torus(), 3).ok
    rep = no_self_saddle_check(regular_ngon_surface(5), 3)
    assert len(rep.self_connections) == len(rep.connections) > 0


def test_irrational_demo():
    s, d = irrational_billiard_demo(Q(1, 3), R2)
    assert d.verdict == Verdict.NO
    pts = [s.point(0, Q(k, 11), Q(-k, 13)) for k in range(1, 4)]
    assert all(s.locate(p)[0] == "inside" for p in pts)
    w = d.no_data.witness(avoid=pts)
    assert not path_hits(w.path, pts, s)
    with pytest.raises(RationalAlpha):
        irrational_billiard_demo(0, QQ(Q(3, 2)))


def _forced(cfg, k):
    pts, out = [], []
    for _ in range(k):
        w = witness_geodesic(cfg, avoid=pts)
        out.append(w)
        pts.append(cfg.embedding(cfg.w1 - cfg.l / 2 + w.lam, 0))
    return out


@pytest.mark.parametrize("which", ["chart", "pentagon", "heptagon", "octagon", "L(sqrt2,1)"])
def test_crossings_equal_pair_on_every_config(which):
    if which == "chart":
        s = two_cylinder_surface(1, 2, R2, 2, 1, field=F2)
        cfg = [c for c in find_two_cylinder_config(decompose(s, (F2(1), F2(0)), 40)) if c.w1 == 1][0]
    elif which == "L(sqrt2,1)":
        cfg = fbp_lshaped(R2, 1).no_data.config
    else:
        n = {"pentagon": 5, "heptagon": 7, "octagon": 8}[which]
        cfg = decide_fbp(regular_ngon_surface(n)).no_data.config
    ws = _forced(cfg, 5)
    assert [w.n for w in ws] == sorted(set(w.n for w in ws))
    for w in ws:
        assert w.crossings == (w.pair.q, w.pair.p)
    # the designated pair through the general construction counts the same way
    P1, P2 = lemma_pair(cfg)
    g = witness_pair_general(cfg, P1, P2)
    assert g.crossings == (g.pair.q, g.pair.p)
