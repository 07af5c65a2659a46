import itertools

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from sumprodlab import geometry as geo
from sumprodlab import oracles
from sumprodlab.energy import collision_energy
from sumprodlab.families import random_subset
from sumprodlab.sets import FSet, eval_expr


def S(p, *xs):
    return FSet.of(p, xs)


def pairs_of(lines):
    m, b = lines.coeffs()
    return list(zip(m.tolist(), b.tolist()))


def test_grid_lines_product_examples():
    lines = geo.grid_lines_product(S(7, 1, 2), S(7, 1, 2))
    assert len(lines) == 4
    assert geo.image_set(lines, S(7, 1, 2)).tolist() == [2, 3, 4, 5, 6]
    single = geo.grid_lines_product(S(7, 1), S(7, 0))
    assert pairs_of(single) == [(1, 0)]


def test_grid_lines_drop_zero_slopes():
    lines = geo.grid_lines_product(S(7, 0, 1), S(7, 2, 3))
    assert len(lines) == 2 and lines.dropped == 2


def test_grid_lines_sum_example():
    lines = geo.grid_lines_sum(S(7, 1, 2), S(7, 1))
    assert pairs_of(lines) == [(1, 1), (2, 2)]


@settings(max_examples=50, deadline=None)
@given(st.sampled_from([7, 11, 101]), st.data())
def test_image_sets_match_expressions(p, data):
    draw = lambda lo: FSet.of(p, data.draw(st.lists(st.integers(lo, p - 1), min_size=1, max_size=8)))
    a, b, c = draw(0), draw(1), draw(0)
    env = {"A": a, "B": b, "C": c}
    assert geo.image_set(geo.grid_lines_product(b, c), a) == eval_expr("B·A + C", env)
    assert geo.image_set(geo.grid_lines_sum(b, c), a) == eval_expr("B(A+C)", env)


def test_image_set_identity_and_vertical_rejection():
    a = S(11, 2, 3, 9)
    assert geo.image_set(geo.LineSet.from_pairs(11, [(1, 0)]), a) == a
    with pytest.raises(geo.GeometryError):
        geo.image_set(geo.LineSet.from_pairs(11, [(1, 0)], verticals=[3]), a)


def test_pencil_examples():
    parallel = geo.LineSet.from_pairs(101, [(5, b) for b in range(9)])
    assert geo.pencil_stat(parallel) == 9
    b, c = S(101, 1, 2, 3), S(101, 4, 5, 6, 7, 8)
    assert geo.pencil_stat(geo.grid_lines_product(b, c)) == 5
    rng = np.random.default_rng(20)
    lines = geo.LineSet.from_pairs(101, rng.integers(0, 101, size=(20, 2)))
    assert geo.pencil_stat(lines) == oracles.pencil(pairs_of(lines), 101)


@settings(max_examples=40, deadline=None)
@given(st.sampled_from([5, 7, 13]), st.lists(st.tuples(st.integers(0, 12), st.integers(0, 12)),
                                             min_size=1, max_size=14))
def test_pencil_matches_oracle(p, pairs):
    lines = geo.LineSet.from_pairs(p, pairs)
    assert geo.pencil_stat(lines) == oracles.pencil(pairs_of(lines), p)


def test_max_collinear_examples():
    grid = [(x, y, 0) for x in range(3) for y in range(3)]
    assert geo.max_collinear(grid, 5) == 3
    on_line = [(t, 2 * t, 3 * t) for t in range(7)]
    assert geo.max_collinear(on_line, 7) == 7
    assert geo.max_collinear([(0, 0, 0), (1, 2, 3)], 7) == 2


@settings(max_examples=40, deadline=None)
@given(st.sampled_from([3, 5, 7]), st.lists(st.tuples(*[st.integers(0, 6)] * 3), min_size=1, max_size=20))
def test_max_collinear_matches_oracle(p, pts):
    assert geo.max_collinear(pts, p) == oracles.max_collinear(pts, p)


def test_point_plane_examples():
    one = geo.PointSet3.build(5, [(0, 0, 0)])
    z0 = geo.PlaneSet3.build(5, [(0, 0, 1, 0)])
    assert geo.point_plane_incidences(one, z0).count == 1
    r = np.arange(5)
    every = geo.PointSet3.build(5, np.array(list(itertools.product(r, r, r))))
    res = geo.point_plane_incidences(every, geo.PlaneSet3.build(5, [(1, 2, 3, 4)]))
    assert res.count == 25


def test_plane_normalisation_merges_weights():
    pl = geo.PlaneSet3.build(7, [(2, 4, 6, 2), (1, 2, 3, 1)])
    assert len(pl) == 1 and pl.weights.tolist() == [2]
    assert pl.coeffs.tolist() == [[1, 2, 3, 1]]
    with pytest.raises(geo.GeometryError):
        geo.PlaneSet3.build(7, [(0, 0, 0, 1)])


@pytest.mark.parametrize("n", [5, 40, 150])
def test_point_plane_matches_oracle_both_paths(n):
    rng = np.random.default_rng(n)
    p = 11
    pts = rng.integers(0, p, size=(n, 3))
    raw = rng.integers(0, p, size=(n, 4))
    raw[:, 0] = np.where((raw[:, :3] == 0).all(1), 1, raw[:, 0])
    qw, pw = rng.integers(1, 5, size=n), rng.integers(1, 5, size=n)
    q, pl = geo.PointSet3.build(p, pts, qw), geo.PlaneSet3.build(p, raw, pw)
    res = geo.point_plane_incidences(q, pl)
    expect = oracles.point_plane_incidences(q.coords.tolist(), pl.coeffs.tolist(), p,
                                            pl.weights.tolist(), q.weights.tolist())
    assert (res.count, res.weighted) == expect
    assert res.stats.k == oracles.max_collinear(q.coords.tolist(), p)


def test_collision_construction():
    lines = geo.grid_lines_sum(S(13, 1, 2, 5), S(13, 0, 3))
    a = S(13, 1, 4, 7, 9)
    q, pl = geo.collision_points_planes(lines, a)
    assert len(q) == len(pl) == len(lines) * len(a)
    assert geo.point_plane_incidences(q, pl).count == collision_energy(lines, a)
    eq, epl = geo.collision_points_planes(lines, S(13))
    assert len(eq) == len(epl) == 0


def test_collision_k_matches_brute_force():
    for seed in range(5):
        lines = geo.LineSet.from_pairs(11, np.random.default_rng(seed).integers(0, 11, size=(6, 2)))
        a = random_subset(11, 3 + seed % 3, seed)
        q, _ = geo.collision_points_planes(lines, a)
        assert geo.collision_k(lines, a) == oracles.max_collinear(q.coords.tolist(), 11)


def test_collinear_triples_examples():
    assert geo.collinear_triples(S(5, 0, 1, 2)) == 48
    assert geo.collinear_triples(S(5, 3)) == 0
    assert geo.collinear_triples(S(5, 0, 1)) == 0


def test_collinear_triples_grid_examples():
    a = S(11, 1, 4, 5, 9)
    assert geo.collinear_triples_grid(a, a) == geo.collinear_triples(a)
    pts = [(x, y) for x in (0, 1, 2) for y in (0, 1)]
    assert geo.collinear_triples_grid(S(5, 0, 1, 2), S(5, 0, 1)) == oracles.collinear_triples_det(pts, 5)
    assert geo.collinear_triples_grid(S(11, 1, 2, 3, 7), S(11, 5)) == 4 * 3 * 2
    assert geo.collinear_triples_grid(S(11, 5), S(11, 1, 2, 3, 7)) == 4 * 3 * 2


@settings(max_examples=40, deadline=None)
@given(st.sampled_from([5, 7, 11]), st.lists(st.integers(0, 10), min_size=1, max_size=7))
def test_triples_match_determinant_oracle(p, xs):
    a = FSet.of(p, xs)
    pts = [(x, y) for x in a.tolist() for y in a.tolist()]
    assert geo.collinear_triples(a) == oracles.collinear_triples_det(pts, p)


def test_lines_and_directions_examples():
    st_ = geo.line_and_direction_sets(S(7, 0, 1))
    assert (st_.lines, st_.directions) == (6, 4)
    assert set(st_.per_point_pinned.values()) == {3}
    col = geo.line_and_direction_sets(S(7, 0, 1, 2, 3), S(7, 5))
    assert (col.lines, col.directions) == (1, 1)
    with pytest.raises(geo.GeometryError):
        geo.line_and_direction_sets(S(7, 1))


def test_pinned_min_and_second_min():
    stats = geo.LineDirectionStats(3, 2, {(0, 0): 4, (1, 0): 2, (0, 1): 3})
    assert stats.pinned_min == 2 and stats.pinned_second_min == 3


@settings(max_examples=30, deadline=None)
@given(st.sampled_from([5, 7, 11]), st.lists(st.integers(0, 10), min_size=2, max_size=5),
       st.lists(st.integers(0, 10), min_size=1, max_size=5))
def test_lines_and_directions_match_oracle(p, xs, ys):
    a, b = FSet.of(p, xs), FSet.of(p, ys)
    if len(a) * len(b) < 2:
        return
    got = geo.line_and_direction_sets(a, b)
    nl, nd, pinned = oracles.lines_and_directions([(x, y) for x in a.tolist() for y in b.tolist()], p)
    assert (got.lines, got.directions, got.per_point_pinned) == (nl, nd, pinned)


def test_point_line_examples():
    lines = geo.connecting_lines(S(7, 0, 1))
    assert len(lines) == 6 and lines.verticals.size == 2
    assert geo.point_line_incidences(np.empty((0, 2)), lines) == 0
    pts = [(x, y) for x in (0, 1) for y in (0, 1)]
    assert geo.point_line_incidences(pts, lines) == 12


def test_point_line_matches_oracle():
    rng = np.random.default_rng(3)
    for _ in range(10):
        p = 13
        pts = np.unique(rng.integers(0, p, size=(25, 2)), axis=0)
        pairs = rng.integers(0, p, size=(12, 2))
        verts = [1, 5]
        lines = geo.LineSet.from_pairs(p, pairs, verticals=verts)
        expect = oracles.point_line_incidences(pts.tolist(), pairs_of(geo.LineSet.from_pairs(p, pairs)),
                                               verts, p)
        assert geo.point_line_incidences(pts, lines) == expect


def test_cross_ratio_examples():
    cr = geo.cross_ratio_sets(S(7, 0, 1, 2))
    assert cr.R_inf.tolist() == [2, 4, 6]
    two = geo.cross_ratio_sets(S(7, 3, 5))
    assert len(two.R) == 0 and len(two.R_inf) == 0


@settings(max_examples=30, deadline=None)
@given(st.sampled_from([7, 11, 13, 101]), st.lists(st.integers(0, 100), min_size=3, max_size=7))
def test_cross_ratios_match_oracle(p, xs):
    a = FSet.of(p, xs)
    cr = geo.cross_ratio_sets(a)
    r, r_inf = oracles.cross_ratios(a.tolist(), p)
    assert cr.R.tolist() == sorted(r) and cr.R_inf.tolist() == sorted(r_inf)
    for c in a.tolist():
        assert geo.pinned_cross_ratios(a, c).issubset(cr.R)


def test_cross_ratio_degenerate_option():
    cr = geo.cross_ratio_sets(S(7, 0, 1, 2, 4), include_degenerate=True)
    assert cr.has_infinity and 0 in cr.R and 1 in cr.R


def test_distance_sets_examples():
    ds = geo.distance_sets(S(7, 0, 1))
    assert ds.quadratic.tolist() == [0, 1, 2]
    one = geo.distance_sets(S(7, 4))
    assert one.quadratic.tolist() == [0] and one.cubic.tolist() == [0]


def test_bound_expressions():
    assert geo.incidence_bound(16, 9, 2) == 16 * 3 + 32
    assert geo.weighted_incidence_bound(4, 1, 1) == 8 + 4
