"""Gamma-equivalence of tree vertices and the finite quotient graph Gamma \\ T.

The equivalence test is exact.  gamma = a + b i + c j + d ij maps v to w
iff pi^-t M_w^-1 embed(gamma) M_v lies in GL_2(O) with t = (k_v - k_w)/2,
and membership in M_2(O) is F_q-linear in the coefficients of a, b, c, d.
The determinant condition then holds automatically: the scaled matrix
has determinant nr(gamma), an integral constant, and a nonzero element
of a division algebra with constant norm is a unit.
"""

from __future__ import annotations

import itertools
import json
import random
from collections import deque
from dataclasses import dataclass, field

import networkx as nx
import numpy as np

from .base_algebra import INF, Poly, RationalFn
from .kfield import KMatrix, quad_ord, quad_to_series_abs
from .linalg import nullspace_mod_p
from .quaternion import SCHEMA_VERSION, AlgebraData, QuatOrderElem, UnitElem, embed
from .tree import (
    ORIGIN,
    TreeVertex,
    act_elem,
    distance_to_O,
    format_vertex,
    neighbors,
    parse_vertex,
    u_to_rational,
)

SEARCH_CAP_EXP = 12


class SolutionSpaceTooLarge(RuntimeError):
    def __init__(self, dim: int, q: int) -> None:
        super().__init__(f"solution space of dimension {dim} exceeds q^{SEARCH_CAP_EXP} (q={q})")
        self.dim = dim


class QuotientError(AssertionError):
    """An internal invariant of the quotient construction failed."""


@dataclass(frozen=True)
class EquivWitness:
    gamma: UnitElem
    source: TreeVertex
    target: TreeVertex

    def verify(self) -> bool:
        return act_elem(self.gamma, self.source) == self.target


# -- the linear system ---------------------------------------------------


def _vertex_inverse_matrix(v: TreeVertex, ctx) -> KMatrix:
    q = ctx.q
    inv_pik = RationalFn.pi_power(q, -v.k)
    return KMatrix(ctx.elem(inv_pik), ctx.elem(-(inv_pik * u_to_rational(v.u, q))),
                   ctx.elem(0), ctx.elem(1))


def _min_ord_vertex(v: TreeVertex) -> int:
    return int(min(v.k, v.u_ord, 0))


def _min_ord_vertex_inverse(v: TreeVertex) -> int:
    return int(min(-v.k, -v.k + v.u_ord, 0))


def search_degree(v: TreeVertex, w: TreeVertex) -> int:
    """Degree bound N for the coordinates of any gamma with gamma v = w.

    The larger of d(O,v) + d(O,w) + 1 and the bound read off from the
    entries of M_w (integral matrix) M_v^-1.
    """
    t = (v.k - w.k) // 2
    mu = t + _min_ord_vertex(w) + _min_ord_vertex_inverse(v)
    return max(distance_to_O(v) + distance_to_O(w) + 1, -mu, 0)


def _slot_basis(alg: AlgebraData) -> list[QuatOrderElem]:
    return [alg.elem(1), alg.elem(0, 1), alg.elem(0, 0, 1), alg.elem(0, 0, 0, 1)]


def solution_space(alg: AlgebraData, v: TreeVertex, w: TreeVertex) -> list[QuatOrderElem]:
    """F_q-basis of {gamma in the order : gamma v = w} union {0}."""
    if (v.k - w.k) % 2:
        return []
    q = alg.q
    ctx = alg.ctx
    t = (v.k - w.k) // 2
    N = search_degree(v, w)
    Mv = v.matrix(ctx)
    Mw_inv = _vertex_inverse_matrix(w, ctx) * ctx.elem(RationalFn.pi_power(q, -t))
    mults = [(Mw_inv * embed(s) * Mv).entries for s in _slot_basis(alg)]
    ncols = 4 * (N + 1)
    blocks = []
    e = np.arange(N + 1)
    for i in range(4):
        col = [m[i] for m in mults]
        ords = [quad_ord(x) for x in col]
        finite = [o for o in ords if o != INF]
        if not finite:
            continue
        lo = int(min(finite)) - N
        if lo > -1:
            continue
        E = np.arange(lo, 0)
        idx = E[:, None] + e[None, :] - lo
        block = np.zeros((len(E), ncols), dtype=np.int64)
        for s, (x, o) in enumerate(zip(col, ords)):
            if o == INF or o > N - 1:
                continue
            coeffs = np.array(quad_to_series_abs(x, N).coefficients(lo, N), dtype=np.int64)
            block[:, s * (N + 1):(s + 1) * (N + 1)] = coeffs[idx]
        blocks.append(block)
    A = np.vstack(blocks) if blocks else np.zeros((0, ncols), dtype=np.int64)
    basis = nullspace_mod_p(A, q, ncols)
    out = []
    for x in basis:
        polys = [Poly(q, [int(c) for c in x[s * (N + 1):(s + 1) * (N + 1)]]) for s in range(4)]
        out.append(QuatOrderElem(alg, *polys))
    return out


def _combos(basis: list[QuatOrderElem], q: int):
    for coeffs in itertools.product(range(q), repeat=len(basis)):
        if not any(coeffs):
            continue
        x = None
        for c, b in zip(coeffs, basis):
            if c:
                term = b * c
                x = term if x is None else x + term
        yield x


def _elem_key(x: QuatOrderElem) -> tuple:
    return (x.norm_deg(),) + tuple(p.sort_key() for p in x.coords)


def find_unit_mapping(alg: AlgebraData, v: TreeVertex, w: TreeVertex,
                      all_solutions: bool = False):
    """A unit gamma with gamma v = w (None if none), or every such unit.

    The returned single witness is the least solution in (norm, coordinate)
    order, so it does not depend on the basis found by elimination.
    """
    basis = solution_space(alg, v, w)
    if not basis:
        return [] if all_solutions else None
    if len(basis) > SEARCH_CAP_EXP:
        raise SolutionSpaceTooLarge(len(basis), alg.q)
    sols = []
    for x in _combos(basis, alg.q):
        u = UnitElem.of(x)  # raises if a solution is not a unit
        sols.append(u)
    sols.sort(key=lambda u: _elem_key(u.elem))
    for u in sols[:1] if not all_solutions else sols:
        if act_elem(u, v) != w:
            raise QuotientError(f"search returned a non-solution {u.elem!r}")
    return sols if all_solutions else sols[0]


def _is_monic_rep(x: QuatOrderElem) -> bool:
    for p in x.coords:
        if p:
            return p.lc == 1
    return False


def stabilizer(alg: AlgebraData, v: TreeVertex) -> list[UnitElem]:
    """Stab(v) modulo F_q^x: one representative per class, identity first."""
    sols = find_unit_mapping(alg, v, v, all_solutions=True)
    reps = [u for u in sols if _is_monic_rep(u.elem)]
    reps.sort(key=lambda u: (not u.elem.is_scalar(), _elem_key(u.elem)))
    for u in reps:
        if not u.is_elliptic():
            raise QuotientError(f"non-elliptic element {u.elem!r} fixes {v}")
    return reps


def order_mod_scalars(x: QuatOrderElem, bound: int) -> int:
    y = x
    for n in range(1, bound + 1):
        if y.is_scalar():
            return n
        y = y * x
    raise QuotientError("stabilizer element of unexpected order")


def cyclic_generator(stab: list[UnitElem]) -> tuple[UnitElem, int] | None:
    """A generator of the cyclic group Stab/F_q^x and its order."""
    n = len(stab)
    if n == 1:
        return None
    for u in stab:
        if order_mod_scalars(u.elem, n) == n:
            return u, n
    raise QuotientError("stabilizer modulo scalars is not cyclic")


# -- the quotient graph --------------------------------------------------


@dataclass(frozen=True)
class QuotientEdge:
    """An orbit of edges: src -- endpoint, where endpoint = gamma . reps[dst].

    Tree edges of the lift have gamma = 1 and endpoint = reps[dst].
    """

    src: int
    dst: int
    witness: EquivWitness
    is_tree: bool


@dataclass(frozen=True)
class NeighborInfo:
    """How a neighbour n of reps[r] outside the lift is reached.

    n = sigma_r^power * h * reps[target] with h = 1 for a tree edge and
    h = edges[edge].witness^sign otherwise.
    """

    power: int
    edge: int
    sign: int
    target: int


@dataclass
class QuotientGraph:
    alg: AlgebraData
    reps: list[TreeVertex]
    edges: list[QuotientEdge]
    stabilizers: list[list[UnitElem]]
    table: dict[tuple[int, TreeVertex], NeighborInfo]
    levels: list[int]
    diameter: int = 0
    rep_index: dict[TreeVertex, int] = field(default_factory=dict)

    def __post_init__(self) -> None:
        self.rep_index = {v: i for i, v in enumerate(self.reps)}
        self.stab_gens = [cyclic_generator(s) for s in self.stabilizers]

    @property
    def V(self) -> int:
        return len(self.reps)

    @property
    def E(self) -> int:
        return len(self.edges)

    @property
    def rank(self) -> int:
        return self.E - self.V + 1

    def degree_sequence(self) -> list[int]:
        deg = [0] * self.V
        for e in self.edges:
            deg[e.src] += 1
            deg[e.dst] += 1
        return deg

    def stabilizer_orders(self) -> list[int]:
        return [len(s) for s in self.stabilizers]

    def graph(self) -> nx.MultiGraph:
        G = nx.MultiGraph()
        G.add_nodes_from(range(self.V))
        for i, e in enumerate(self.edges):
            G.add_edge(e.src, e.dst, key=i)
        return G

    def stats(self) -> dict:
        return {
            "V": self.V,
            "E": self.E,
            "rank": self.rank,
            "diameter": self.diameter,
            "degrees": self.degree_sequence(),
            "stabilizer_orders": self.stabilizer_orders(),
        }

    # -- verification ----------------------------------------------------
    def verify(self) -> None:
        """Re-check witnesses, stabilizers, the lift and the counts."""
        q = self.alg.q
        if self.reps[0] != ORIGIN:
            raise QuotientError("the lift must contain O as its first vertex")
        incoming = [0] * self.V
        for e in self.edges:
            if e.is_tree:
                incoming[e.dst] += 1
                if (self.reps[e.dst] not in neighbors(self.reps[e.src], q)
                        or self.levels[e.dst] != self.levels[e.src] + 1):
                    raise QuotientError(f"tree edge {e.src} -- {e.dst} is not a lift edge")
        if incoming != [0] + [1] * (self.V - 1):
            raise QuotientError("lift is not a tree rooted at O")
        for e in self.edges:
            if not e.witness.verify():
                raise QuotientError(f"witness of edge {e} fails")
            if e.witness.source != self.reps[e.dst]:
                raise QuotientError("witness source is not the target representative")
            if e.witness.target not in neighbors(self.reps[e.src], q):
                raise QuotientError("edge endpoint is not adjacent to its source")
        for v, stab in zip(self.reps, self.stabilizers):
            for u in stab:
                if act_elem(u, v) != v:
                    raise QuotientError(f"{u.elem!r} does not fix {v}")
        for (r, n), info in self.table.items():
            h = self.transport(r, info)
            if act_elem(h, self.reps[info.target]) != n:
                raise QuotientError(f"neighbour table entry for {n} is wrong")
        if sum(self.degree_sequence()) != 2 * self.E:
            raise QuotientError("degree sum does not match the edge count")
        if self.V > 1 and not nx.is_connected(self.graph()):
            raise QuotientError("quotient graph is disconnected")
        if self.diameter != compute_diameter(self):
            raise QuotientError("stored diameter is wrong")

    def transport(self, r: int, info: NeighborInfo) -> QuatOrderElem:
        """The element h with h . reps[info.target] = n for a table entry at r."""
        h = self.alg.one()
        if info.power:
            h = self.stab_gens[r][0].elem ** info.power
        e = self.edges[info.edge]
        if not e.is_tree:
            g = e.witness.gamma.elem
            h = h * (g if info.sign > 0 else g.inverse())
        return h

    # -- serialization ---------------------------------------------------
    def to_dict(self) -> dict:
        return {
            "schema_version": SCHEMA_VERSION,
            "algebra": self.alg.to_dict(),
            "stats": self.stats(),
            "reps": [format_vertex(v) for v in self.reps],
            "levels": self.levels,
            "edges": [
                {"src": e.src, "dst": e.dst, "tree": e.is_tree,
                 "endpoint": format_vertex(e.witness.target),
                 "witness": e.witness.gamma.elem.to_list()}
                for e in self.edges
            ],
            "stabilizers": [[u.elem.to_list() for u in s] for s in self.stabilizers],
            "neighbor_table": [
                [r, format_vertex(n), info.power, info.edge, info.sign, info.target]
                for (r, n), info in sorted(self.table.items())
            ],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=1, sort_keys=True) + "\n"

    @classmethod
    def from_dict(cls, data: dict) -> QuotientGraph:
        if data.get("schema_version") != SCHEMA_VERSION:
            raise ValueError(f"unsupported schema version {data.get('schema_version')}")
        alg = AlgebraData.from_dict(data["algebra"])
        reps = [parse_vertex(s) for s in data["reps"]]

        def unit(items) -> UnitElem:
            return UnitElem.of(QuatOrderElem.from_list(alg, items))

        edges = [QuotientEdge(e["src"], e["dst"],
                              EquivWitness(unit(e["witness"]), reps[e["dst"]],
                                           parse_vertex(e["endpoint"])), e["tree"])
                 for e in data["edges"]]
        stabs = [[unit(x) for x in s] for s in data["stabilizers"]]
        table = {(r, parse_vertex(n)): NeighborInfo(p, ed, sg, tg)
                 for r, n, p, ed, sg, tg in data["neighbor_table"]}
        qg = cls(alg, reps, edges, stabs, table, list(data["levels"]))
        qg.diameter = data["stats"]["diameter"]
        return qg

    @classmethod
    def from_json(cls, text: str) -> QuotientGraph:
        return cls.from_dict(json.loads(text))

    def to_dot(self) -> str:
        lines = ["graph quotient {"]
        for i, v in enumerate(self.reps):
            lines.append(f'  r{i} [label="{format_vertex(v)}"];')
        for e in self.edges:
            style = "" if e.is_tree else ", style=dashed"
            lines.append(f'  r{e.src} -- r{e.dst} [label="{e.witness.gamma.elem.to_text()}"{style}];')
        lines.append("}")
        return "\n".join(lines) + "\n"


def compute_diameter(qg: QuotientGraph) -> int:
    if qg.V == 1:
        return 0
    return nx.diameter(nx.Graph(qg.graph()))


def radius_cap(alg: AlgebraData) -> int:
    return 2 * alg.diameter_bound() + 2


def build_quotient(alg: AlgebraData, rng: random.Random | None = None) -> QuotientGraph:
    """Breadth-first orbit exploration from O.

    ``rng`` shuffles the neighbour order, which changes the representatives
    chosen but not the isomorphism type of the result.
    """
    q = alg.q
    cap = radius_cap(alg)
    reps = [ORIGIN]
    levels = [0]
    rep_index = {ORIGIN: 0}
    stabs: list[list[UnitElem]] = []
    gens: list[tuple[UnitElem, int] | None] = []
    edges: list[QuotientEdge] = []
    # canonical[r][m] = (edge, sign, target): edge endpoints chosen at r
    canonical: list[dict[TreeVertex, tuple[int, int, int]]] = [{}]
    table: dict[tuple[int, TreeVertex], NeighborInfo] = {}
    one = UnitElem.of(alg.one())
    processed: set[int] = set()

    def orbit_lookup(r: int, n: TreeVertex) -> NeighborInfo | None:
        """Find m in canonical[r] with n = sigma_r^e m."""
        if n in canonical[r]:
            ed, sg, tg = canonical[r][n]
            return NeighborInfo(0, ed, sg, tg)
        if gens[r] is None:
            return None
        sigma, order = gens[r]
        inv = sigma.elem.inverse()
        m, x = n, None
        for e in range(1, order):
            x = inv if x is None else x * inv
            m = act_elem(x, n)
            if m in canonical[r]:
                ed, sg, tg = canonical[r][m]
                return NeighborInfo(e, ed, sg, tg)
        return None

    queue = deque([0])
    while queue:
        r = queue.popleft()
        stab = stabilizer(alg, reps[r])
        stabs.append(stab)
        gens.append(cyclic_generator(stab))
        nbrs = neighbors(reps[r], q)
        if rng is not None:
            rng.shuffle(nbrs)
        for n in nbrs:
            if n in rep_index:
                if n not in canonical[r]:
                    raise QuotientError(f"lift neighbour {n} of {reps[r]} is not a tree edge")
                continue
            info = orbit_lookup(r, n)
            if info is not None:
                table[(r, n)] = info
                continue
            match = None
            for r2, v2 in enumerate(reps):
                if (v2.k - n.k) % 2:
                    continue
                h = find_unit_mapping(alg, v2, n)
                if h is not None:
                    match = (r2, h)
                    break
            if match is None:
                idx = len(reps)
                if levels[r] + 1 > cap:
                    raise QuotientError(f"orbit representative beyond radius cap {cap}")
                reps.append(n)
                levels.append(levels[r] + 1)
                rep_index[n] = idx
                canonical.append({})
                queue.append(idx)
                ed = len(edges)
                edges.append(QuotientEdge(r, idx, EquivWitness(one, n, n), True))
                canonical[r][n] = (ed, +1, idx)
                canonical[idx][reps[r]] = (ed, -1, r)
                continue
            r2, h = match
            ed = len(edges)
            edges.append(QuotientEdge(r, r2, EquivWitness(h, reps[r2], n), False))
            canonical[r][n] = (ed, +1, r2)
            table[(r, n)] = NeighborInfo(0, ed, +1, r2)
            rev = act_elem(h.elem.inverse(), reps[r])
            if rev in rep_index:
                raise QuotientError("reverse of a non-tree edge lies in the lift")
            if r2 == r:
                # an edge orbit meeting its own reverse: Gamma would invert an edge
                raise QuotientError(f"Gamma acts with inversion on the edge {reps[r]} -- {n}")
            if r2 != r and r2 in processed:
                raise QuotientError("edge orbit missed while processing an earlier vertex")
            canonical[r2][rev] = (ed, -1, r)
            table[(r2, rev)] = NeighborInfo(0, ed, -1, r)
        processed.add(r)

    qg = QuotientGraph(alg, reps, edges, stabs, table, levels)
    oriented = sum(len(c) for c in canonical)
    if oriented != 2 * len(edges):
        raise QuotientError("oriented edge count is not twice the edge count")
    qg.diameter = compute_diameter(qg)
    return qg


# -- diameter inequalities -----------------------------------------------


def ramanujan_diameter_check(V: int, m: int, D: int) -> bool:
    """D <= 2 log_{m-1} V + log_{m-1} 4, compared as (m-1)^D <= 4 V^2."""
    if V < 1 or m < 3:
        raise ValueError("need V >= 1 and m >= 3")
    return (m - 1) ** D <= 4 * V * V


def covering_diameter_check(V: int, q: int, D: int) -> bool:
    """D <= 2 log_q(q^4 V) + 1, compared as q^(D-1) <= q^8 V^2."""
    if D <= 1:
        return True
    return q ** (D - 1) <= q ** 8 * V * V
