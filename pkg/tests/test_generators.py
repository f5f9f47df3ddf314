from __future__ import annotations

import itertools
import random

import pytest
from hypothesis import given
from hypothesis import strategies as st

from quatgen.base_algebra import polys_below
from quatgen.generators import (
    GeneratorSet,
    TheoremViolation,
    Word,
    enumerate_small_units,
    evaluate,
    free_reduce,
    random_word,
    reduce_word,
    theorem_bound_check,
    verify_disjointness,
)
from quatgen.quaternion import NonUnit, QuatOrderElem, UnitElem
from quatgen.tree import ORIGIN, act_elem, displacement


def test_case_b_generators(gs_b, qg_b):
    assert len(gs_b.edge_index) == 21 == qg_b.rank
    assert not gs_b.stab_index
    assert gs_b.provenance[0] == "scalar"


def test_case_a_generators(gs_a, alg_a):
    nonscalar = gs_a.nonscalar()
    assert 0 < len(nonscalar) <= 2  # at most g(R) + 2^(#R-1)
    assert all(gs_a.gens[i].is_elliptic() for i in nonscalar)


@pytest.mark.parametrize("case", ["a", "b"])
def test_generators_move_O_at_most_2B(case, request):
    gs = request.getfixturevalue(f"gs_{case}")
    alg = request.getfixturevalue(f"alg_{case}")
    assert all(displacement(g) <= 2 * gs.B for g in gs.gens)
    report = theorem_bound_check(gs, alg)
    assert report.ok and report.max_norm <= alg.theorem_bound()
    assert report.norms[0] == 0  # the scalar


def test_theorem_violation_is_raised(gs_b, alg_b):
    rng = random.Random(0)
    big = evaluate(random_word(gs_b, rng, max_len=30), gs_b, alg_b)
    while big.norm_deg() <= alg_b.theorem_bound():
        big = big * evaluate(random_word(gs_b, rng, max_len=30), gs_b, alg_b)
    fake = GeneratorSet(gs_b.gens + [UnitElem.of(big)], gs_b.provenance + ["edge:fake"], gs_b.B)
    with pytest.raises(TheoremViolation):
        theorem_bound_check(fake, alg_b)


def test_scalar_reduces_to_empty_word(gs_b, qg_b, alg_b):
    w = reduce_word(alg_b.elem(2), gs_b, qg_b)
    assert w == Word((), 2)
    assert w.to_text() == "1 * 2"


@pytest.mark.parametrize("case", ["a", "b"])
def test_each_generator_reduces(case, request):
    gs = request.getfixturevalue(f"gs_{case}")
    qg = request.getfixturevalue(f"qg_{case}")
    alg = request.getfixturevalue(f"alg_{case}")
    for i, g in enumerate(gs.gens):
        w = reduce_word(g, gs, qg)
        assert evaluate(w, gs, alg) == g.elem
        if i in gs.edge_index.values():
            assert w.letters == ((i, 1),) and w.scalar == 1


@pytest.mark.parametrize("case", ["a", "b"])
@given(seed=st.integers(0, 2**32 - 1))
def test_round_trip(case, request, seed):
    gs = request.getfixturevalue(f"gs_{case}")
    qg = request.getfixturevalue(f"qg_{case}")
    alg = request.getfixturevalue(f"alg_{case}")
    x = evaluate(random_word(gs, random.Random(seed)), gs, alg)
    w = reduce_word(x, gs, qg, check=False)
    assert evaluate(w, gs, alg) == x


def test_non_unit_rejected(gs_b, qg_b, alg_b):
    with pytest.raises(NonUnit):
        reduce_word(alg_b.elem(alg_b.a_param), gs_b, qg_b)


def test_free_reduce():
    assert free_reduce([(1, 1), (2, 1), (2, -1), (1, -1), (3, 1)]) == ((3, 1),)
    assert Word(((0, 1), (4, -1)), 1).to_signed() == [1, -5]


def _brute_units(alg, n):
    polys = list(polys_below(alg.q, n + 1))
    out = set()
    for coords in itertools.product(polys, repeat=4):
        x = QuatOrderElem(alg, *coords)
        if x.is_unit():
            out.add(x)
    return out


@pytest.mark.parametrize("case", ["a", "b"])
def test_meet_in_the_middle_matches_brute_force(case, request):
    alg = request.getfixturevalue(f"alg_{case}")
    found = enumerate_small_units(alg, 1)
    assert len(found) == len(set(found))
    assert set(found) == _brute_units(alg, 1)


@pytest.mark.parametrize("case", ["a", "b"])
def test_small_units_reduce(case, request):
    gs = request.getfixturevalue(f"gs_{case}")
    qg = request.getfixturevalue(f"qg_{case}")
    alg = request.getfixturevalue(f"alg_{case}")
    units = enumerate_small_units(alg, 2)
    assert units
    for x in random.Random(3).sample(units, min(300, len(units))):
        reduce_word(x, gs, qg)


def test_disjointness_case_a(alg_a, gs_a, qg_a):
    rep = verify_disjointness(alg_a, gs_a, 300, qg_a.diameter, random.Random(1))
    assert rep.ok and rep.tested == 300
    assert rep.elliptic_tested > 0 and rep.hyperbolic_tested > 0


def test_disjointness_B0_moves_O(alg_a, gs_a):
    rep = verify_disjointness(alg_a, gs_a, 200, 0, random.Random(2))
    assert rep.ok
    # with B = 0 every qualifying element has positive norm, hence moves O
    rng = random.Random(2)
    for _ in range(50):
        x = evaluate(random_word(gs_a, rng), gs_a, alg_a)
        if x.norm_deg() > 0:
            assert act_elem(x, ORIGIN) != ORIGIN


def test_disjointness_case_b(alg_b, gs_b, qg_b):
    for B in (0, qg_b.diameter):
        rep = verify_disjointness(alg_b, gs_b, 100, B, random.Random(B))
        assert rep.ok and rep.hyperbolic_tested == 100 and rep.elliptic_tested == 0
