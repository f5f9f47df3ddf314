"""Generating sets read off the quotient graph, and word reduction.

Generators are one primitive scalar, a generator of each nontrivial
vertex stabilizer (cyclic modulo scalars) and the witness of every edge
orbit outside the lifted spanning tree.
"""

from __future__ import annotations

import json
import random
from dataclasses import dataclass, field

from .base_algebra import FqConfig, Poly, polys_below
from .quaternion import SCHEMA_VERSION, AlgebraData, NonUnit, QuatOrderElem, UnitElem, as_elem
from .quotient import QuotientGraph
from .tree import ORIGIN, act_elem, displacement, path_from_O


class TheoremViolation(AssertionError):
    """A generator lies outside the degree bound."""


class DisjointnessViolation(AssertionError):
    def __init__(self, gamma: QuatOrderElem, B: int, moved: int) -> None:
        super().__init__(f"{gamma.to_text()} overlaps T_{B}: d(O, gamma O) = {moved}")
        self.gamma = gamma
        self.counterexample = {"gamma": gamma.to_list(), "B": B, "displacement": moved}


@dataclass
class GeneratorSet:
    gens: list[UnitElem]
    provenance: list[str]
    B: int
    stab_index: dict[int, int] = field(default_factory=dict)
    edge_index: dict[int, int] = field(default_factory=dict)

    def __len__(self) -> int:
        return len(self.gens)

    def nonscalar(self) -> list[int]:
        return [i for i, p in enumerate(self.provenance) if p != "scalar"]

    def edge_generators(self) -> list[int]:
        return sorted(self.edge_index.values())

    def norms(self) -> list[int]:
        return [g.elem.norm_deg() for g in self.gens]

    def to_dict(self) -> dict:
        return {
            "schema_version": SCHEMA_VERSION,
            "B": self.B,
            "generators": [
                {"index": i, "provenance": p, "quadruple": g.elem.to_list(),
                 "norm": g.elem.norm_deg(), "displacement": displacement(g)}
                for i, (g, p) in enumerate(zip(self.gens, self.provenance))
            ],
        }


@dataclass(frozen=True)
class Word:
    """letters[0]^e0 * letters[1]^e1 * ... * scalar."""

    letters: tuple[tuple[int, int], ...]
    scalar: int

    def __len__(self) -> int:
        return len(self.letters)

    def to_signed(self) -> list[int]:
        """Signed 1-based indices: +i for g_(i-1), -i for its inverse."""
        return [(i + 1) * e for i, e in self.letters]

    def to_text(self) -> str:
        body = " ".join(f"g{i}" if e > 0 else f"g{i}^-1" for i, e in self.letters) or "1"
        return f"{body} * {self.scalar}"


def free_reduce(letters) -> tuple[tuple[int, int], ...]:
    out: list[tuple[int, int]] = []
    for i, e in letters:
        if out and out[-1][0] == i and out[-1][1] == -e:
            out.pop()
        else:
            out.append((i, e))
    return tuple(out)


def evaluate(word: Word, gs: GeneratorSet, alg: AlgebraData) -> QuatOrderElem:
    inverses: dict[int, QuatOrderElem] = {}
    x = alg.one()
    for i, e in word.letters:
        g = gs.gens[i].elem
        if e < 0:
            if i not in inverses:
                inverses[i] = g.inverse()
            g = inverses[i]
        x = x * g
    return x * word.scalar


def generating_set(qg: QuotientGraph) -> GeneratorSet:
    alg = qg.alg
    zeta = FqConfig(alg.q).primitive_root()
    gens = [UnitElem.of(alg.elem(zeta))]
    prov = ["scalar"]
    stab_index: dict[int, int] = {}
    edge_index: dict[int, int] = {}
    for r, sg in enumerate(qg.stab_gens):
        if sg is not None:
            stab_index[r] = len(gens)
            gens.append(sg[0])
            prov.append(f"stabilizer:{r}")
    for i, e in enumerate(qg.edges):
        if not e.is_tree:
            edge_index[i] = len(gens)
            gens.append(e.witness.gamma)
            prov.append(f"edge:{i}")
    B = qg.diameter
    for g, p in zip(gens, prov):
        if displacement(g) > 2 * B:
            raise AssertionError(f"generator {p} moves O by more than 2B = {2 * B}")
    return GeneratorSet(gens, prov, B, stab_index, edge_index)


@dataclass(frozen=True)
class BoundReport:
    bound: int
    max_norm: int
    norms: tuple[int, ...]
    diameter: int
    diameter_bound: int

    @property
    def ok(self) -> bool:
        return self.max_norm <= self.bound and self.diameter <= self.diameter_bound


def theorem_bound_check(gs: GeneratorSet, alg: AlgebraData) -> BoundReport:
    norms = tuple(gs.norms())
    report = BoundReport(alg.theorem_bound(), max(norms), norms, gs.B, alg.diameter_bound())
    if report.max_norm > report.bound:
        worst = gs.gens[norms.index(report.max_norm)].elem
        raise TheoremViolation(f"generator {worst.to_text()} has norm {report.max_norm} "
                               f"> {report.bound}")
    if report.diameter > report.diameter_bound:
        raise TheoremViolation(f"quotient diameter {gs.B} exceeds {report.diameter_bound}")
    return report


# -- word reduction ------------------------------------------------------


def _stab_letters(gs: GeneratorSet, r: int, power: int) -> list[tuple[int, int]]:
    return [(gs.stab_index[r], 1)] * power if power else []


def reduce_word(gamma, gs: GeneratorSet, qg: QuotientGraph, check: bool = True) -> Word:
    """Write gamma as a word in gs by descending onto the lift of the quotient."""
    g = as_elem(gamma)
    if not g.is_unit():
        raise NonUnit(f"{g.to_text()} is not a unit")
    alg = qg.alg
    letters: list[tuple[int, int]] = []
    v = act_elem(g, ORIGIN)
    while v not in qg.rep_index:
        path = path_from_O(v)
        i = next(j for j, x in enumerate(path) if x not in qg.rep_index)
        before = len(path) - i
        p, p_next = qg.rep_index[path[i - 1]], path[i]
        info = qg.table[(p, p_next)]
        h_letters = _stab_letters(gs, p, info.power)
        edge = qg.edges[info.edge]
        if not edge.is_tree:
            h_letters.append((gs.edge_index[info.edge], info.sign))
        h = qg.transport(p, info)
        g = h.inverse() * g
        letters.extend(h_letters)
        v = act_elem(g, ORIGIN)
        after = _distance_to_lift(v, qg)
        if after >= before:
            raise AssertionError(f"descent stalled: distance {before} -> {after}")
    if v != ORIGIN:
        raise AssertionError(f"gamma O reduced to the representative {v}, not O")
    # g now fixes O, so g = sigma_O^e * c
    sg = qg.stab_gens[0]
    if sg is None:
        if not g.is_scalar():
            raise AssertionError("residual element fixing O is not a scalar")
        scalar = g.a.lc
    else:
        sigma_inv = sg[0].elem.inverse()
        y = g
        for e in range(sg[1]):
            if y.is_scalar():
                letters.extend(_stab_letters(gs, 0, e))
                scalar = y.a.lc
                break
            y = y * sigma_inv
        else:
            raise AssertionError("residual element is not in the stabilizer of O")
    word = Word(free_reduce(letters), scalar)
    if check and evaluate(word, gs, alg) != as_elem(gamma):
        raise AssertionError("reduced word does not evaluate to gamma")
    return word


def _distance_to_lift(v, qg: QuotientGraph) -> int:
    path = path_from_O(v)
    for j, x in enumerate(path):
        if x not in qg.rep_index:
            return len(path) - j
    return 0


# -- sampling ------------------------------------------------------------


def random_word(gs: GeneratorSet, rng: random.Random, max_len: int = 30) -> Word:
    pool = gs.nonscalar()
    n = rng.randint(1, max_len)
    letters = tuple((rng.choice(pool), rng.choice((1, -1))) for _ in range(n))
    return Word(letters, rng.randrange(1, gs.gens[0].elem.alg.q))


def enumerate_small_units(alg: AlgebraData, max_norm: int) -> list[QuatOrderElem]:
    """Every unit with all coordinates of degree <= max_norm.

    Meet in the middle on the norm equation
    a^2 - A b^2 - kappa = B c^2 - A B d^2, tabulating the right side.
    """
    q, A, B = alg.q, alg.a_param, alg.b_param
    polys = list(polys_below(q, max_norm + 1))
    table: dict[Poly, list[tuple[Poly, Poly]]] = {}
    AB = A * B
    sq = {p: p * p for p in polys}
    for c in polys:
        for d in polys:
            table.setdefault(B * sq[c] - AB * sq[d], []).append((c, d))
    out = []
    for a in polys:
        for b in polys:
            lhs = sq[a] - A * sq[b]
            for kappa in range(1, q):
                for c, d in table.get(lhs - kappa, ()):
                    out.append(QuatOrderElem(alg, a, b, c, d))
    return out


@dataclass
class DisjointnessReport:
    B: int
    drawn: int = 0
    hyperbolic_tested: int = 0
    elliptic_tested: int = 0
    violations: list[dict] = field(default_factory=list)
    max_norm_overlapping: int = 0
    min_norm_disjoint: int | None = None

    @property
    def tested(self) -> int:
        return self.hyperbolic_tested + self.elliptic_tested

    @property
    def ok(self) -> bool:
        return not self.violations

    def to_dict(self) -> dict:
        return {
            "B": self.B, "drawn": self.drawn, "hyperbolic_tested": self.hyperbolic_tested,
            "elliptic_tested": self.elliptic_tested, "violations": self.violations,
            "max_norm_overlapping": self.max_norm_overlapping,
            "min_norm_disjoint": self.min_norm_disjoint,
        }


def verify_disjointness(alg: AlgebraData, gs: GeneratorSet, samples: int, B: int,
                        rng: random.Random, max_len: int = 30,
                        raise_on_violation: bool = False) -> DisjointnessReport:
    """Test the disjointness criterion on ``samples`` qualifying random units.

    Hyperbolic units are random words; elliptic ones are random conjugates
    of stabilizer generators (drawn for every other sample when available).
    A unit qualifies when its norm exceeds 2B (hyperbolic) or B (elliptic).
    """
    report = DisjointnessReport(B)
    torsion = [gs.gens[i].elem for i in gs.stab_index.values()]
    max_draws = 50 * samples + 100
    while report.tested < samples and report.drawn < max_draws:
        report.drawn += 1
        w = evaluate(random_word(gs, rng, max_len), gs, alg)
        if torsion and report.drawn % 2 == 0:
            w = w * rng.choice(torsion) * w.inverse()
        nd = w.norm_deg()
        moved = displacement(w)
        if moved <= 2 * B:
            report.max_norm_overlapping = max(report.max_norm_overlapping, nd)
        elif report.min_norm_disjoint is None or nd < report.min_norm_disjoint:
            report.min_norm_disjoint = nd
        elliptic = w.a.is_const()
        if elliptic and nd > B:
            report.elliptic_tested += 1
        elif not elliptic and nd > 2 * B:
            report.hyperbolic_tested += 1
        else:
            continue
        if moved <= 2 * B:
            err = DisjointnessViolation(w, B, moved)
            if raise_on_violation:
                raise err
            report.violations.append(err.counterexample)
    return report


def generators_json(gs: GeneratorSet) -> str:
    return json.dumps(gs.to_dict(), indent=1, sort_keys=True) + "\n"
