from __future__ import annotations

import itertools
import random

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from quatgen.generators import enumerate_small_units
from quatgen.linalg import nullspace_mod_p, rref_mod_p
from quatgen.quaternion import formula_vertex_count
from quatgen.quotient import (
    QuotientGraph,
    build_quotient,
    covering_diameter_check,
    cyclic_generator,
    find_unit_mapping,
    ramanujan_diameter_check,
    solution_space,
    stabilizer,
)
from quatgen.tree import ORIGIN, act_elem, ball, neighbors

from conftest import make_algebra


# -- linear algebra over F_p ---------------------------------------------------


@given(st.integers(1, 4), st.integers(1, 5), st.sampled_from([2, 3, 5]), st.data())
def test_nullspace_brute_force(rows, cols, p, data):
    A = np.array(data.draw(st.lists(st.lists(st.integers(0, p - 1), min_size=cols, max_size=cols),
                                    min_size=rows, max_size=rows)))
    basis = nullspace_mod_p(A, p)
    kernel = {x for x in itertools.product(range(p), repeat=cols)
              if not (A @ np.array(x) % p).any()}
    span = {tuple(int(c) for c in sum((k * b for k, b in zip(ks, basis)), np.zeros(cols, int)) % p)
            for ks in itertools.product(range(p), repeat=len(basis))}
    assert span == kernel
    assert len(basis) == cols - len(rref_mod_p(A, p)[1])


# -- equivalence search ---------------------------------------------------------


def test_scalars_fix_O(alg_a, alg_b):
    for alg in (alg_a, alg_b):
        sols = find_unit_mapping(alg, ORIGIN, ORIGIN, all_solutions=True)
        consts = {u.elem.a.lc for u in sols if u.elem.is_scalar()}
        assert consts == set(range(1, alg.q))


def test_stabilizer_of_O_case_a(alg_a):
    stab = stabilizer(alg_a, ORIGIN)
    assert stab[0].elem == alg_a.one()
    assert len(stab) == alg_a.q + 1
    assert all(u.is_elliptic() for u in stab)
    assert any(not u.elem.is_scalar() for u in stab)


def _class_of(x, stab):
    for i, u in enumerate(stab):
        y = x * u.elem.inverse()
        if y.is_scalar():
            return i
    return None


def test_stabilizer_is_a_group(alg_a, qg_a):
    for v in list(qg_a.reps) + neighbors(ORIGIN, 3)[:2]:
        stab = stabilizer(alg_a, v)
        for x, y in itertools.product(stab, repeat=2):
            assert _class_of(x.elem * y.elem, stab) is not None
            assert _class_of(x.elem.inverse(), stab) is not None
        gen = cyclic_generator(stab)
        assert gen is not None and gen[1] == len(stab)


def test_free_case_trivial_stabilizers(alg_b):
    for v in ball(3, 3):
        assert len(stabilizer(alg_b, v)) == 1


def test_distinct_orbits_have_no_mapping(alg_b, qg_b):
    for v, w in itertools.combinations(qg_b.reps, 2):
        assert find_unit_mapping(alg_b, v, w) is None
        assert find_unit_mapping(alg_b, v, w, all_solutions=True) == []


def test_parity_obstruction(alg_b):
    assert solution_space(alg_b, ORIGIN, neighbors(ORIGIN, 3)[0]) == []


@pytest.mark.parametrize("case", ["a", "b"])
def test_search_finds_images_of_small_units(case, request):
    """Every vertex pair (w, u.w) produced by an enumerated unit is detected."""
    alg = request.getfixturevalue(f"alg_{case}")
    units = enumerate_small_units(alg, 2)
    rng = random.Random(11)
    sources = sorted(ball(1, 3))
    for x in rng.sample(units, min(60, len(units))):
        w = rng.choice(sources)
        v = act_elem(x, w)
        found = find_unit_mapping(alg, w, v)
        assert found is not None and act_elem(found, w) == v


# -- the builder ------------------------------------------------------------------


def test_case_a_counts(qg_a):
    assert qg_a.V == 2 and qg_a.E == 1
    assert qg_a.stabilizer_orders() == [4, 4]
    assert qg_a.diameter <= 7
    qg_a.verify()


def test_case_b_counts(qg_b):
    assert (qg_b.V, qg_b.E, qg_b.rank) == (20, 40, 21)
    assert qg_b.degree_sequence() == [4] * 20
    assert qg_b.diameter <= 13
    qg_b.verify()


def test_lift_is_a_subtree(qg_b):
    assert qg_b.reps[0] == ORIGIN
    for e in qg_b.edges:
        if e.is_tree:
            assert qg_b.reps[e.dst] in neighbors(qg_b.reps[e.src], 3)


@pytest.mark.parametrize("seed", [1, 2, 3])
def test_tie_breaking_invariance(alg_b, qg_b, seed):
    other = build_quotient(alg_b, rng=random.Random(seed))
    other.verify()
    assert (other.V, other.E, other.diameter) == (qg_b.V, qg_b.E, qg_b.diameter)
    assert sorted(other.degree_sequence()) == sorted(qg_b.degree_sequence())
    assert sorted(other.stabilizer_orders()) == sorted(qg_b.stabilizer_orders())


def test_tie_breaking_invariance_torsion(alg_a, qg_a):
    other = build_quotient(alg_a, rng=random.Random(4))
    assert sorted(other.stabilizer_orders()) == sorted(qg_a.stabilizer_orders())
    assert other.V == qg_a.V and other.E == qg_a.E


@pytest.mark.parametrize("q,R", [
    (3, "T,T+2"), (5, "T,T+1"), (7, "T,T+1"),
    (3, "T+1,T^2+1"), (3, "T,T^3+2*T+1"), (5, "T,T^2+2"),
])
def test_vertex_count_formula(q, R):
    alg = make_algebra(R, q)
    qg = build_quotient(alg)
    qg.verify()
    assert qg.V == formula_vertex_count(alg)
    assert qg.diameter <= alg.diameter_bound()
    has_torsion = any(n > 1 for n in qg.stabilizer_orders())
    assert has_torsion == bool(alg.odd)
    if not alg.odd:
        assert 2 * qg.E == (q + 1) * qg.V


def test_json_round_trip(qg_a, qg_b):
    for qg in (qg_a, qg_b):
        again = QuotientGraph.from_json(qg.to_json())
        again.verify()
        assert again.stats() == qg.stats()
        assert again.to_json() == qg.to_json()


def test_dot_export(qg_b):
    dot = qg_b.to_dot()
    assert dot.count("[label=") == qg_b.V + qg_b.E
    assert dot.count("style=dashed") == qg_b.rank


def test_corrupted_witness_is_detected(qg_b):
    data = qg_b.to_dict()
    e = next(e for e in data["edges"] if not e["tree"])
    e["endpoint"] = data["reps"][0]
    with pytest.raises(AssertionError):
        QuotientGraph.from_dict(data).verify()


@pytest.mark.parametrize("V,m,D,expected", [(20, 4, 3, True), (1, 3, 0, True), (2, 4, 5, False)])
def test_ramanujan_diameter_check(V, m, D, expected):
    assert ramanujan_diameter_check(V, m, D) is expected


def test_covering_diameter_check():
    assert covering_diameter_check(20, 3, 4)
    assert covering_diameter_check(1, 3, 9) and not covering_diameter_check(1, 3, 10)
