"""The Bruhat-Tits tree of PGL_2(K), K = F_q((1/T)).

Vertices are stored in reduced form (pi^k, u; 0, 1) with u a finite
pi-expansion taken modulo pi^k O.  Equality of vertices is equality of
these normal forms.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Iterable

from .base_algebra import INF, Poly, RationalFn
from .kfield import (
    InsufficientPrecision,
    KMatrix,
    PrecisionPolicy,
    QuadContext,
    Series,
    quad_ord,
    quad_to_series,
    series_sqrt,
)
from .quaternion import UnitElem, as_elem, embed

U = tuple[tuple[int, int], ...]  # ((exponent, coeff), ...) ascending, coeffs nonzero


class SingularMatrix(ArithmeticError):
    pass


class BallTooLarge(ValueError):
    pass


@dataclass(frozen=True, order=True)
class TreeVertex:
    k: int
    u: U = ()

    def __post_init__(self) -> None:
        if self.u and self.u[-1][0] >= self.k:
            raise ValueError(f"u must be reduced modulo pi^{self.k}")

    @property
    def u_ord(self) -> int | float:
        return self.u[0][0] if self.u else INF

    def parity(self) -> int:
        return self.k % 2

    def matrix(self, ctx: QuadContext) -> KMatrix:
        q = ctx.q
        return KMatrix(ctx.elem(RationalFn.pi_power(q, self.k)), ctx.elem(u_to_rational(self.u, q)),
                       ctx.elem(0), ctx.elem(1))

    def __str__(self) -> str:
        return format_vertex(self)


ORIGIN = TreeVertex(0, ())


def format_vertex(v: TreeVertex) -> str:
    return f"k={v.k};u=[" + ",".join(f"{e}:{c}" for e, c in v.u) + "]"


_VERTEX = re.compile(r"^k=(-?\d+);u=\[(.*)\]$")


def parse_vertex(text: str) -> TreeVertex:
    m = _VERTEX.match("".join(text.split()))
    if not m:
        raise ValueError(f"bad vertex text {text!r}")
    items = []
    if m.group(2):
        for part in m.group(2).split(","):
            e, c = part.split(":")
            items.append((int(e), int(c)))
    return TreeVertex(int(m.group(1)), tuple(sorted(items)))


def u_to_rational(u: U, q: int) -> RationalFn:
    """sum c pi^e as a rational function in T."""
    if not u:
        return RationalFn.from_int(q, 0)
    top = max(e for e, _ in u)
    shift = max(top, 0)
    # multiply through by T^shift = pi^-shift: terms c T^(shift - e)
    coeffs = [0] * (shift - u[0][0] + 1)
    for e, c in u:
        coeffs[shift - e] = c
    num = Poly(q, coeffs)
    return RationalFn(num, Poly.monomial(q, shift))


def _u_reduce(pairs: Iterable[tuple[int, int]], k: int, q: int) -> U:
    acc: dict[int, int] = {}
    for e, c in pairs:
        if e < k:
            acc[e] = (acc.get(e, 0) + c) % q
    return tuple(sorted((e, c) for e, c in acc.items() if c))


def _u_from_series(s: Series, k: int) -> U:
    if s.absprec < k:
        raise InsufficientPrecision("u not known modulo pi^k")
    if s.is_zero:
        return ()
    return tuple((s.valuation + i, c) for i, c in enumerate(s.coeffs)
                 if c and s.valuation + i < k)


# -- normal forms -------------------------------------------------------


def normalize(M: KMatrix) -> TreeVertex:
    """Reduced form of the vertex M.O for exact M (Iwasawa reduction)."""
    det_ord = quad_ord(M.det())
    if det_ord == INF:
        raise SingularMatrix("singular matrix has no vertex")
    o21, o22 = quad_ord(M.m21), quad_ord(M.m22)
    if o22 <= o21:
        P, Q, oq = M.m12, M.m22, o22
    else:
        P, Q, oq = M.m11, M.m21, o21
    k = int(det_ord - 2 * oq)
    op = quad_ord(P)
    if op == INF or op - oq >= k:
        return TreeVertex(k, ())
    ou = int(op - oq)
    rel = k - ou
    u = quad_to_series(P, rel) * quad_to_series(Q, rel).invert()
    return TreeVertex(k, _u_from_series(u, k))


def normalize_series(m11: Series, m12: Series, m21: Series, m22: Series) -> TreeVertex:
    """Reduced form for a matrix with truncated-series entries."""
    det = m11 * m22 - m12 * m21
    det_ord = det.ord()
    if m21.is_zero and m22.is_zero:
        raise InsufficientPrecision("second row is zero to precision")
    if m21.is_zero:
        if m22.valuation > m21.absprec:
            raise InsufficientPrecision("cannot order the second row")
        pivot_second = True
    elif m22.is_zero:
        if m21.valuation > m22.absprec:
            raise InsufficientPrecision("cannot order the second row")
        pivot_second = False
    else:
        pivot_second = m22.valuation <= m21.valuation
    P, Q = (m12, m22) if pivot_second else (m11, m21)
    oq = Q.ord()
    k = det_ord - 2 * oq
    u = P * Q.invert()
    return TreeVertex(k, _u_from_series(u, k))


def act(M: KMatrix, v: TreeVertex) -> TreeVertex:
    return normalize(M * v.matrix(M.ctx))


def act_elem(x, v: TreeVertex) -> TreeVertex:
    x = as_elem(x)
    M = embed(x)
    if v == ORIGIN:
        return normalize(M)
    return act(M, v)


# -- distances ------------------------------------------------------------


def distance_to_O(v: TreeVertex) -> int:
    if not v.u or v.u_ord >= 0:
        return abs(v.k)
    return v.k - 2 * v.u[0][0]


def distance(v: TreeVertex, w: TreeVertex) -> int:
    """Elementary-divisor distance.

    M_v^-1 M_w = (pi^(kw-kv), pi^-kv (uw - uv); 0, 1); scaling it to a primitive
    integral matrix leaves a determinant of valuation d(v, w).
    """
    m = min(w.k - v.k, 0)
    du = dict(v.u)
    dw = dict(w.u)
    diff = [e for e in sorted(du.keys() | dw.keys()) if du.get(e, 0) != dw.get(e, 0)]
    if diff:
        m = min(m, diff[0] - v.k)
    return (w.k - v.k) - 2 * m


def neighbors(v: TreeVertex, q: int) -> list[TreeVertex]:
    """The q+1 neighbours: (k+1, u + c pi^k) for c in F_q and (k-1, u mod pi^(k-1))."""
    out = [TreeVertex(v.k + 1, _u_reduce(list(v.u) + [(v.k, c)], v.k + 1, q)) for c in range(q)]
    out.append(TreeVertex(v.k - 1, _u_reduce(v.u, v.k - 1, q)))
    return out


def parent(v: TreeVertex) -> TreeVertex:
    """The neighbour of v one step closer to O (v != O)."""
    if v == ORIGIN:
        raise ValueError("O has no parent")
    if not v.u and v.k < 0:
        return TreeVertex(v.k + 1, ())
    return TreeVertex(v.k - 1, tuple(p for p in v.u if p[0] < v.k - 1))


def path_from_O(v: TreeVertex) -> list[TreeVertex]:
    path = [v]
    while path[-1] != ORIGIN:
        path.append(parent(path[-1]))
    return path[::-1]


def ball_size(B: int, q: int) -> int:
    return 1 + sum((q + 1) * q ** (n - 1) for n in range(1, B + 1))


def ball(B: int, q: int, cap: int = 200_000) -> set[TreeVertex]:
    if B < 0:
        raise ValueError("radius must be nonnegative")
    size = ball_size(B, q)
    if size > cap:
        raise BallTooLarge(f"ball of radius {B} has {size} vertices (cap {cap})")
    seen = {ORIGIN}
    frontier = [ORIGIN]
    for _ in range(B):
        nxt = []
        for v in frontier:
            for w in neighbors(v, q):
                if w not in seen:
                    seen.add(w)
                    nxt.append(w)
        frontier = nxt
    return seen


def ball_dot(vertices: Iterable[TreeVertex]) -> str:
    vs = sorted(vertices, key=lambda v: (distance_to_O(v), v))
    index = {v: i for i, v in enumerate(vs)}
    lines = ["graph ball {"]
    for v, i in index.items():
        lines.append(f'  n{i} [label="{format_vertex(v)}"];')
    for v, i in index.items():
        if v != ORIGIN and parent(v) in index:
            lines.append(f"  n{index[parent(v)]} -- n{i};")
    lines.append("}")
    return "\n".join(lines) + "\n"


def displacement(x) -> int:
    """d(O, xO) for a unit x: -2 * min ord of the entries of its matrix."""
    M = embed(as_elem(x))
    return int(-2 * min(quad_ord(e) for e in M.entries))


def check_ball_disjoint(gamma, B: int) -> bool:
    """True iff gamma T_B and T_B are disjoint, i.e. d(O, gamma O) > 2B."""
    return displacement(gamma) > 2 * B


# -- geodesics of hyperbolic elements --------------------------------------


@dataclass(frozen=True)
class GeodesicData:
    gamma: UnitElem
    end_x: Series | None  # None marks the boundary point infinity
    end_y: Series | None
    ord_alpha: int
    ord_beta: int
    amplitude: int
    dist_to_O: int
    closest_k: int

    def vertex(self, k: int) -> TreeVertex:
        """The k-th vertex of the axis, in the indexing used for dist_to_O."""
        return _axis_vertex(self.end_x, self.end_y, k, self.gamma.elem.alg.q)


def _axis_vertex(x: Series | None, y: Series | None, k: int, q: int) -> TreeVertex:
    if x is None and y is not None and y.is_zero:
        return TreeVertex(k, ())
    if y is None and x is not None and x.is_zero:
        return TreeVertex(-k, ())
    prec = max(x.precision if x else 0, y.precision if y else 0)
    pik = Series(q, k, [1] + [0] * (prec - 1))
    one = Series.one(q, prec)
    return normalize_series(x * pik, y, pik, one)


def geodesic_of(gamma, policy: PrecisionPolicy | None = None) -> GeodesicData:
    """Axis, eigenvalue valuations and distance to O of a hyperbolic unit."""
    x = as_elem(gamma)
    unit = gamma if isinstance(gamma, UnitElem) else UnitElem.of(x)
    if unit.is_elliptic():
        raise ValueError("geodesic_of needs a hyperbolic element")
    alg = x.alg
    q = alg.q
    kappa = unit.kappa
    deg_a = x.a.degree
    nd = x.norm_deg()
    if policy is None:
        policy = PrecisionPolicy.for_degree(alg.a_param.degree + alg.b_param.degree)
    policy = PrecisionPolicy(max(policy.initial, 8 * nd + 16), policy.max_doublings)
    window = 2 * (nd + alg.b_param.degree + 2)
    M = embed(x)

    def attempt(L: int) -> GeodesicData:
        a_ser = Series.from_poly(x.a, L - deg_a)
        disc = Series.from_poly(x.a * x.a - kappa, L - 2 * deg_a)
        r = series_sqrt(disc)
        beta = a_ser + r if r.lead == a_ser.lead else a_ser - r
        alpha = beta.invert().scale(kappa)
        ord_alpha, ord_beta = alpha.ord(), beta.ord()
        amplitude = abs(ord_alpha - ord_beta)
        X11 = quad_to_series(M.m11, L)
        if M.m12.is_zero():
            # diagonal: eigenvectors e1 (eigenvalue X11) and e2
            x11_is_alpha = X11.valuation == ord_alpha
            zero = Series.zero(q, L)
            ex, ey = (None, zero) if x11_is_alpha else (zero, None)
            return GeodesicData(unit, ex, ey, ord_alpha, ord_beta, amplitude, 0, 0)
        X12 = quad_to_series(M.m12, L)
        end_x = X12 * (alpha - X11).invert()
        end_y = X12 * (beta - X11).invert()
        cache: dict[int, int] = {}

        def f(k: int) -> int:
            if abs(k) > window:
                raise AssertionError(f"axis search left the window |k| <= {window}")
            if k not in cache:
                cache[k] = distance_to_O(_axis_vertex(end_x, end_y, k, q))
            return cache[k]

        k = 0
        step = 1 if f(1) < f(0) else (-1 if f(-1) < f(0) else 0)
        while step and f(k + step) < f(k):
            k += step
        return GeodesicData(unit, end_x, end_y, ord_alpha, ord_beta, amplitude, f(k), k)

    return policy.run(attempt)
