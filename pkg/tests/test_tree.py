from __future__ import annotations

import random

import pytest
from hypothesis import given
from hypothesis import strategies as st

from quatgen.base_algebra import RationalFn
from quatgen.kfield import KMatrix, PrecisionPolicy
from quatgen.quaternion import UnitElem
from quatgen.tree import (
    ORIGIN,
    BallTooLarge,
    SingularMatrix,
    TreeVertex,
    act_elem,
    ball,
    ball_dot,
    ball_size,
    check_ball_disjoint,
    displacement,
    distance,
    distance_to_O,
    format_vertex,
    geodesic_of,
    neighbors,
    normalize,
    parent,
    parse_vertex,
    path_from_O,
)

Q = 3
BALL3 = sorted(ball(3, Q))


def bfs_in(vertices, source):
    inside = set(vertices)
    dist = {source: 0}
    frontier = [source]
    while frontier:
        nxt = []
        for x in frontier:
            for y in neighbors(x, Q):
                if y in inside and y not in dist:
                    dist[y] = dist[x] + 1
                    nxt.append(y)
        frontier = nxt
    return dist


def test_ball_sizes():
    assert [len(ball(B, Q)) for B in range(5)] == [1, 5, 17, 53, 161]
    assert [ball_size(B, Q) for B in range(5)] == [1, 5, 17, 53, 161]
    with pytest.raises(BallTooLarge):
        ball(12, Q, cap=1000)


def test_reduced_form_validation():
    with pytest.raises(ValueError):
        TreeVertex(1, ((1, 2),))


@pytest.mark.parametrize("v", BALL3, ids=format_vertex)
def test_vertex_text_round_trip(v):
    assert parse_vertex(format_vertex(v)) == v


def test_neighbors_are_distinct_and_adjacent():
    for v in BALL3:
        nb = neighbors(v, Q)
        assert len(set(nb)) == Q + 1
        assert all(distance(v, w) == 1 for w in nb)
        if v != ORIGIN:
            assert parent(v) in nb
            assert distance_to_O(parent(v)) == distance_to_O(v) - 1


def test_distance_matches_bfs_on_ball3():
    for v in BALL3:
        dist = bfs_in(BALL3, v)
        for w in BALL3:
            assert distance(v, w) == dist[w]


@given(st.sampled_from(BALL3), st.sampled_from(BALL3), st.sampled_from(BALL3))
def test_distance_metric(u, v, w):
    assert distance(u, v) == distance(v, u)
    assert distance(u, w) <= distance(u, v) + distance(v, w)
    assert (distance(u, v) == 0) == (u == v)
    assert distance(ORIGIN, v) == distance_to_O(v)


def test_path_from_O():
    for v in BALL3:
        path = path_from_O(v)
        assert path[0] == ORIGIN and path[-1] == v
        assert len(path) == distance_to_O(v) + 1
        assert all(distance(a, b) == 1 for a, b in zip(path, path[1:]))


def test_normalize_identity_and_vertex_matrices(alg_b):
    ctx = alg_b.ctx
    pi = ctx.elem(RationalFn.pi_power(Q, 1))
    assert normalize(KMatrix.identity(ctx)) == ORIGIN
    for v in BALL3:
        assert normalize(v.matrix(ctx)) == v
        # scalar matrices act trivially
        assert normalize(v.matrix(ctx) * pi) == v
    with pytest.raises(SingularMatrix):
        normalize(KMatrix(ctx.elem(1), ctx.elem(1), ctx.elem(1), ctx.elem(1)))


def test_ball_dot_lists_edges():
    text = ball_dot(ball(1, Q))
    assert text.startswith("graph ball {") and text.count("--") == Q + 1


def _units(gs, rng, n, length=6):
    pool = gs.gens
    for _ in range(n):
        x = gs.gens[0].elem.alg.one()
        for _ in range(rng.randint(1, length)):
            g = rng.choice(pool).elem
            x = x * (g if rng.random() < 0.5 else g.inverse())
        yield x


def test_action_is_a_group_action(alg_b, gs_b):
    rng = random.Random(5)
    units = list(_units(gs_b, rng, 12))
    for x, y in zip(units, units[1:]):
        for v in BALL3[::7]:
            assert act_elem(x * y, v) == act_elem(x, act_elem(y, v))
            assert distance(act_elem(x, v), act_elem(x, ORIGIN)) == distance_to_O(v)


def test_displacement_is_distance_to_image(alg_a, gs_a, gs_b):
    rng = random.Random(6)
    for gs in (gs_a, gs_b):
        for x in _units(gs, rng, 20):
            d = displacement(x)
            assert d == distance_to_O(act_elem(x, ORIGIN))
            assert d % 2 == 0  # the action preserves types
            assert check_ball_disjoint(x, d // 2 - 1) and not check_ball_disjoint(x, d // 2)


def test_geodesic_translation(gs_b):
    rng = random.Random(7)
    for x in _units(gs_b, rng, 15, length=4):
        u = UnitElem.of(x)
        if u.is_elliptic():
            continue
        gd = geodesic_of(u, PrecisionPolicy(16))
        v = gd.vertex(gd.closest_k)
        w = act_elem(x, v)
        assert distance(v, w) == gd.amplitude == abs(gd.ord_alpha - gd.ord_beta)
        assert distance_to_O(v) == gd.dist_to_O
        assert displacement(x) == 2 * gd.dist_to_O + gd.amplitude
        # consecutive axis vertices are adjacent
        assert distance(gd.vertex(gd.closest_k + 1), v) == 1


def test_geodesic_rejects_elliptic(gs_a):
    with pytest.raises(ValueError):
        geodesic_of(gs_a.gens[1])


@pytest.mark.parametrize("case", ["a", "b"])
def test_axis_distance_case_analysis(case, request):
    """Amplitude 2 deg(a); with s = deg b + deg(A)/2 - deg a > 0 the axis is >= s from O."""
    gs = request.getfixturevalue(f"gs_{case}")
    alg = request.getfixturevalue(f"alg_{case}")
    half = alg.a_param.degree // 2
    rng = random.Random(8)
    checked = 0
    for x in _units(gs, rng, 300, length=8):
        u = UnitElem.of(x)
        if u.is_elliptic():
            continue
        gd = geodesic_of(u)
        assert gd.amplitude == 2 * x.a.degree
        s = (x.b.degree or 0) + half - x.a.degree
        if x.b and s > 0:
            assert gd.dist_to_O >= s
            checked += 1
    assert checked > 0
