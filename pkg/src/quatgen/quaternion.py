"""Quaternion algebras H(a, b) over F_q(T), their standard orders and units."""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from typing import Iterable, Union

from .base_algebra import (
    AlgebraError,
    FqConfig,
    Poly,
    crt,
    factor_trial,
    format_poly,
    fq_nonsquare,
    is_irreducible,
    legendre,
    monic_polys,
    ord_at,
    parse_poly,
    poly_gcd,
    polys_below,
)
from .kfield import KMatrix, QuadContext

INFINITY = "infinity"  # the place at infinity, ord = -deg
Place = Union[Poly, str]

SCHEMA_VERSION = 1


class NonUnit(AlgebraError):
    pass


@dataclass(frozen=True)
class RamSet:
    places: tuple[Poly, ...]
    odd_flag: int
    r_poly: Poly

    @classmethod
    def from_places(cls, places: Iterable[Poly]) -> RamSet:
        places = tuple(sorted(places))
        if not places:
            raise AlgebraError("R must be nonempty (D is a division algebra)")
        if len(set(places)) != len(places):
            raise AlgebraError("ramified places must be pairwise distinct")
        for f in places:
            if f.is_zero() or not f.is_monic() or not is_irreducible(f):
                raise AlgebraError(f"{f} is not a monic irreducible polynomial")
        if len(places) % 2:
            raise AlgebraError(
                f"#R = {len(places)} is odd; the algebra would ramify at infinity")
        odd = int(all(f.degree % 2 for f in places))
        r = Poly.const(places[0].q, 1)
        for f in places:
            r = r * f
        return cls(places, odd, r)


def _nonsquare_residues(f: Poly) -> list[Poly]:
    return [r for r in polys_below(f.q, f.degree) if r and legendre(r, f, check=False) == -1]


def _candidates_of_degree(ram: RamSet, d: int) -> list[Poly]:
    """Monic degree-d polys that are nonsquares modulo every f_x, via CRT classes."""
    q, r = ram.r_poly.q, ram.r_poly
    residue_lists = [_nonsquare_residues(f) for f in ram.places]
    n_classes = 1
    for lst in residue_lists:
        n_classes *= len(lst)
    if n_classes > q ** d:
        # cheaper to scan the degree-d monic polynomials directly
        return [a for a in monic_polys(q, d)
                if all(legendre(a, f, check=False) == -1 for f in ram.places)]
    out = []
    for combo in itertools.product(*residue_lists):
        a0 = crt(list(combo), list(ram.places))
        if d < r.degree:
            if a0.degree == d and a0.is_monic():
                out.append(a0)
        else:
            for b in monic_polys(q, d - r.degree):
                out.append(a0 + r * b)
    return sorted(out)


@dataclass(frozen=True, eq=False)
class AlgebraData:
    """Working presentation H(a_param, b_param) with its standard order."""

    cfg: FqConfig
    ram: RamSet
    a_param: Poly
    b_param: Poly
    level: Poly
    xi: int | None = None

    @property
    def q(self) -> int:
        return self.cfg.q

    @property
    def odd(self) -> int:
        return self.ram.odd_flag

    @cached_property
    def ctx(self) -> QuadContext:
        return QuadContext(self.a_param)

    @property
    def deg_level_r(self) -> int:
        """deg(level * r); level is a constant when Odd(R) = 1."""
        return self.level.degree + self.ram.r_poly.degree

    def theorem_bound(self) -> int:
        return 4 * self.deg_level_r + 6

    def diameter_bound(self) -> int:
        return 2 * self.deg_level_r + 3

    def elem(self, a=0, b=0, c=0, d=0) -> QuatOrderElem:
        q = self.q
        conv = [x if isinstance(x, Poly) else Poly.const(q, x) for x in (a, b, c, d)]
        return QuatOrderElem(self, *conv)

    def one(self) -> QuatOrderElem:
        return self.elem(1)

    def to_dict(self) -> dict:
        return {
            "schema_version": SCHEMA_VERSION,
            "q": self.q,
            "R": [format_poly(f) for f in self.ram.places],
            "odd": self.odd,
            "presentation": {"a": format_poly(self.a_param), "b": format_poly(self.b_param)},
            "level": format_poly(self.level),
            "xi": self.xi,
        }

    @classmethod
    def from_dict(cls, data: dict) -> AlgebraData:
        q = data["q"]
        cfg = FqConfig(q)
        ram = RamSet.from_places(parse_poly(s, q) for s in data["R"])
        alg = cls(cfg, ram,
                  parse_poly(data["presentation"]["a"], q),
                  parse_poly(data["presentation"]["b"], q),
                  parse_poly(data["level"], q), data.get("xi"))
        if alg.odd != data.get("odd", alg.odd):
            raise AlgebraError("Odd(R) flag does not match R")
        return alg

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, AlgebraData):
            return NotImplemented
        return (self.q, self.a_param, self.b_param) == (other.q, other.a_param, other.b_param)

    def __hash__(self) -> int:
        return hash((self.q, self.a_param, self.b_param))


def build_algebra(cfg: FqConfig, R: Iterable[Poly]) -> AlgebraData:
    """Presentation of the quaternion algebra ramified exactly at R.

    Odd(R) = 1 gives H(r, xi) with xi the least nonsquare.  Otherwise the
    radicand is the first monic irreducible even-degree candidate, in
    (degree, lexicographic) order, that is a nonsquare modulo every f_x.
    """
    ram = RamSet.from_places(R)
    q = cfg.q
    if any(f.q != q for f in ram.places):
        raise AlgebraError("places defined over a different field")
    if ram.odd_flag:
        xi = fq_nonsquare(cfg)
        return AlgebraData(cfg, ram, ram.r_poly, Poly.const(q, xi), Poly.const(q, xi), xi)
    d = 2
    while True:
        for a in _candidates_of_degree(ram, d):
            if (poly_gcd(a, ram.r_poly).is_const() and is_irreducible(a)
                    and all(legendre(a, f, check=False) == -1 for f in ram.places)):
                return AlgebraData(cfg, ram, a, ram.r_poly, a, None)
        d += 2


# -- Hilbert symbols ----------------------------------------------------


def _chi(c: int, q: int) -> int:
    c %= q
    if c == 0:
        raise AlgebraError("character of zero")
    return 1 if pow(c, (q - 1) // 2, q) == 1 else -1


def hilbert_symbol(a: Poly, b: Poly, place: Place) -> int:
    """Tame-symbol evaluation of (a, b)_x for odd residue characteristic."""
    if a.is_zero() or b.is_zero():
        raise AlgebraError("Hilbert symbol of zero")
    q = a.q
    if isinstance(place, str):
        if place != INFINITY:
            raise AlgebraError(f"unknown place {place!r}")
        al, be = -a.degree, -b.degree
        val = _chi(-1, q) ** ((al * be) % 2)
        val *= _chi(a.lc, q) ** (be % 2) * _chi(b.lc, q) ** (al % 2)
        return val
    al, be = ord_at(a, place), ord_at(b, place)
    ua, ub = a // place ** al, b // place ** be
    minus_one = Poly.const(q, -1)
    val = legendre(minus_one, place, check=False) ** ((al * be) % 2)
    val *= legendre(ua, place, check=False) ** (be % 2)
    val *= legendre(ub, place, check=False) ** (al % 2)
    return val


def ramified_places(a: Poly, b: Poly) -> set[Place]:
    places: set[Place] = set(factor_trial(a)) | set(factor_trial(b))
    places.add(INFINITY)
    return {x for x in places if hilbert_symbol(a, b, x) == -1}


# -- elements of the standard order -------------------------------------


@dataclass(frozen=True, eq=False)
class QuatOrderElem:
    """a + b i + c j + d ij in the standard order A + Ai + Aj + Aij."""

    alg: AlgebraData
    a: Poly
    b: Poly
    c: Poly
    d: Poly

    @property
    def coords(self) -> tuple[Poly, Poly, Poly, Poly]:
        return (self.a, self.b, self.c, self.d)

    def _check(self, other: QuatOrderElem) -> None:
        if other.alg is not self.alg and other.alg != self.alg:
            raise AlgebraError("elements of different algebras")

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, QuatOrderElem):
            return NotImplemented
        return self.alg == other.alg and self.coords == other.coords

    def __hash__(self) -> int:
        return hash(self.coords)

    def __add__(self, other: QuatOrderElem) -> QuatOrderElem:
        self._check(other)
        return QuatOrderElem(self.alg, *(x + y for x, y in zip(self.coords, other.coords)))

    def __sub__(self, other: QuatOrderElem) -> QuatOrderElem:
        self._check(other)
        return QuatOrderElem(self.alg, *(x - y for x, y in zip(self.coords, other.coords)))

    def __neg__(self) -> QuatOrderElem:
        return QuatOrderElem(self.alg, *(-x for x in self.coords))

    def __mul__(self, other) -> QuatOrderElem:
        if isinstance(other, (int, Poly)):
            return QuatOrderElem(self.alg, *(x * other for x in self.coords))
        self._check(other)
        A, B = self.alg.a_param, self.alg.b_param
        a1, b1, c1, d1 = self.coords
        a2, b2, c2, d2 = other.coords
        AB = A * B
        return QuatOrderElem(
            self.alg,
            a1 * a2 + A * (b1 * b2) + B * (c1 * c2) - AB * (d1 * d2),
            a1 * b2 + b1 * a2 + B * (d1 * c2 - c1 * d2),
            a1 * c2 + c1 * a2 + A * (b1 * d2 - d1 * b2),
            a1 * d2 + d1 * a2 + b1 * c2 - c1 * b2,
        )

    __rmul__ = __mul__

    def conj(self) -> QuatOrderElem:
        return QuatOrderElem(self.alg, self.a, -self.b, -self.c, -self.d)

    def nr(self) -> Poly:
        A, B = self.alg.a_param, self.alg.b_param
        return (self.a * self.a - A * (self.b * self.b) - B * (self.c * self.c)
                + A * B * (self.d * self.d))

    def tr(self) -> Poly:
        return self.a * 2

    def is_unit(self) -> bool:
        n = self.nr()
        return n.degree == 0

    def norm_deg(self) -> int:
        """max degree of the four coordinates, with deg(0) = 0."""
        return max(x.degree or 0 for x in self.coords)

    def is_scalar(self) -> bool:
        return self.a.is_const() and not (self.b or self.c or self.d)

    def is_elliptic(self) -> bool:
        if not self.is_unit():
            raise NonUnit("ellipticity is defined for units only")
        return self.a.is_const()

    def inverse(self) -> QuatOrderElem:
        n = self.nr()
        if n.degree != 0:
            raise NonUnit(f"{self} is not a unit")
        return self.conj() * pow(n.lc, self.alg.q - 2, self.alg.q)

    def __pow__(self, n: int) -> QuatOrderElem:
        base = self if n >= 0 else self.inverse()
        result = self.alg.one()
        n = abs(n)
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    def to_list(self) -> list[str]:
        return [format_poly(x) for x in self.coords]

    def to_text(self) -> str:
        return ";".join(self.to_list())

    @classmethod
    def from_list(cls, alg: AlgebraData, items) -> QuatOrderElem:
        if len(items) != 4:
            raise AlgebraError("a quaternion needs four coordinates")
        return cls(alg, *(parse_poly(s, alg.q) for s in items))

    @classmethod
    def from_text(cls, alg: AlgebraData, text: str) -> QuatOrderElem:
        return cls.from_list(alg, text.split(";"))

    def __repr__(self) -> str:
        return f"Quat({self.to_text()})"


@dataclass(frozen=True)
class UnitElem:
    elem: QuatOrderElem
    kappa: int

    @classmethod
    def of(cls, x: QuatOrderElem) -> UnitElem:
        n = x.nr()
        if n.degree != 0:
            raise NonUnit(f"{x} has non-constant norm {format_poly(n)}")
        return cls(x, n.lc)

    def is_elliptic(self) -> bool:
        return self.elem.a.is_const()


def as_elem(x) -> QuatOrderElem:
    return x.elem if isinstance(x, UnitElem) else x


def embed(x: QuatOrderElem) -> KMatrix:
    """i -> diag(s, -s), j -> [[0, 1], [b, 0]] with s = sqrt(a_param)."""
    ctx = x.alg.ctx
    a, b, c, d = x.coords
    B = x.alg.b_param
    return KMatrix(ctx.elem(a, b), ctx.elem(c, d), ctx.elem(B * c, -(B * d)), ctx.elem(a, -b))


# -- counting formulas ---------------------------------------------------


def g_of_R(ram: RamSet, q: int) -> Fraction:
    prod = 1
    for f in ram.places:
        prod *= q ** f.degree - 1
    n = len(ram.places)
    return 1 + Fraction(prod, q * q - 1) - Fraction(q, q + 1) * 2 ** (n - 1) * ram.odd_flag


def formula_vertex_count(alg: AlgebraData) -> Fraction:
    q = alg.q
    prod = 1
    for f in alg.ram.places:
        prod *= q ** f.degree - 1
    n = len(alg.ram.places)
    if alg.odd:
        v = Fraction(2 * prod, (q - 1) * (q * q - 1)) + Fraction(q, q + 1) * 2 ** (n - 1)
    else:
        v = Fraction(2 * (q ** alg.level.degree + 1) * prod, (q - 1) * (q * q - 1))
    if v.denominator != 1 or v <= 0:
        raise AssertionError(f"vertex-count formula gave non-integral {v}")
    return v


def formula_free_rank(alg: AlgebraData) -> int:
    if alg.odd:
        raise AlgebraError("the unit group mod scalars is free only when Odd(R) = 0")
    r = 1 + (alg.q ** alg.level.degree + 1) * (g_of_R(alg.ram, alg.q) - 1)
    if r.denominator != 1:
        raise AssertionError(f"free-rank formula gave non-integral {r}")
    return int(r)


def formula_gen_bound(alg: AlgebraData) -> Fraction:
    """Number of generators g(R) + 2^(#R-1) (Odd(R) = 1 case)."""
    if not alg.odd:
        raise AlgebraError("the generator-count formula applies when Odd(R) = 1")
    return g_of_R(alg.ram, alg.q) + 2 ** (len(alg.ram.places) - 1)
