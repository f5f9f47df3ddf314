"""Elements of K = F_q((pi)), pi = 1/T.

Two representations live here:

* ``QuadElem`` -- exact ``u + v*sqrt(a)`` with u, v in F_q(T) and a fixed
  radicand ``a`` (monic, even degree, not a square in F).
* ``Series`` -- a truncated Laurent series in pi carrying the exponent up to
  which it is known.  Every operation propagates precision conservatively and
  raises ``InsufficientPrecision`` instead of inventing digits.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, TypeVar

import numpy as np

from .base_algebra import INF, AlgebraError, FqConfig, Poly, RationalFn, format_poly

T_ = TypeVar("T_")


class InsufficientPrecision(ArithmeticError):
    """A result would need more pi-adic digits than the operands carry."""


class OddValuation(AlgebraError):
    pass


class NonSquareLeadingCoeff(AlgebraError):
    pass


_NUMPY_CUTOFF = 24


def _mul_trunc(a: list[int], b: list[int], n: int, q: int) -> list[int]:
    """First n coefficients of a*b mod q."""
    a, b = a[:n], b[:n]
    if not a or not b:
        return [0] * n
    if min(len(a), len(b)) > _NUMPY_CUTOFF:
        out = np.convolve(np.asarray(a, dtype=np.int64), np.asarray(b, dtype=np.int64))[:n] % q
        res = out.tolist()
    else:
        res = [0] * min(n, len(a) + len(b) - 1)
        for i, x in enumerate(a):
            if x:
                for j in range(min(len(b), n - i)):
                    res[i + j] += x * b[j]
        res = [c % q for c in res]
    res.extend([0] * (n - len(res)))
    return res


def _inv_unit(a: list[int], n: int, q: int) -> list[int]:
    """Inverse of a unit power series (a[0] != 0) to n coefficients, by Newton."""
    x = [pow(a[0], q - 2, q)]
    m = 1
    while m < n:
        m = min(2 * m, n)
        ax = _mul_trunc(a, x, m, q)
        two_minus = [(-c) % q for c in ax]
        two_minus[0] = (two_minus[0] + 2) % q
        x = _mul_trunc(x, two_minus, m, q)
    return x[:n]


@dataclass(frozen=True)
class PrecisionPolicy:
    initial: int = 64
    max_doublings: int = 4

    def __post_init__(self) -> None:
        if self.initial < 8:
            raise ValueError("initial precision must be at least 8")

    @classmethod
    def for_degree(cls, deg_ab: int) -> PrecisionPolicy:
        return cls(initial=4 * deg_ab + 64)

    def run(self, fn: Callable[[int], T_]) -> T_:
        """Call ``fn(L)`` with L = initial, doubling on InsufficientPrecision."""
        prec = self.initial
        for attempt in range(self.max_doublings + 1):
            try:
                return fn(prec)
            except InsufficientPrecision:
                if attempt == self.max_doublings:
                    raise
                prec *= 2
        raise AssertionError("unreachable")


class Series:
    """Truncated Laurent series sum c_i pi^(valuation+i), known mod pi^absprec.

    The leading stored coefficient is nonzero unless the series is zero to
    its precision, in which case it is stored as a single 0 at
    ``absprec - 1``.
    """

    __slots__ = ("q", "valuation", "coeffs")

    def __init__(self, q: int, valuation: int, coeffs) -> None:
        c = [x % q for x in coeffs]
        if not c:
            raise ValueError("a series needs at least one known coefficient")
        i = 0
        while i < len(c) and c[i] == 0:
            i += 1
        if i == len(c):
            valuation, c = valuation + len(c) - 1, [0]
        else:
            valuation, c = valuation + i, c[i:]
        self.q = q
        self.valuation = valuation
        self.coeffs = tuple(c)

    @classmethod
    def zero(cls, q: int, absprec: int) -> Series:
        return cls(q, absprec - 1, [0])

    @classmethod
    def one(cls, q: int, precision: int) -> Series:
        return cls(q, 0, [1] + [0] * (precision - 1))

    @classmethod
    def from_poly(cls, f: Poly, absprec: int) -> Series:
        """Expansion of a polynomial in T (exact) known up to pi^absprec."""
        if f.is_zero():
            return cls.zero(f.q, absprec)
        n = f.degree
        length = absprec + n
        if length <= 0:
            raise InsufficientPrecision("requested precision below the valuation")
        rev = list(reversed(f.coeffs))[:length]
        return cls(f.q, -n, rev + [0] * (length - len(rev)))

    @classmethod
    def from_rational(cls, r: RationalFn, absprec: int) -> Series:
        if r.is_zero():
            return cls.zero(r.q, absprec)
        val = r.ord()
        rel = absprec - val
        if rel <= 0:
            raise InsufficientPrecision("requested precision below the valuation")
        n_rev = list(reversed(r.num.coeffs))[:rel]
        d_rev = list(reversed(r.den.coeffs))[:rel]
        n_rev += [0] * (rel - len(n_rev))
        d_rev += [0] * (rel - len(d_rev))
        coeffs = _mul_trunc(n_rev, _inv_unit(d_rev, rel, r.q), rel, r.q)
        return cls(r.q, int(val), coeffs)

    # -- queries ---------------------------------------------------------
    @property
    def precision(self) -> int:
        return len(self.coeffs)

    @property
    def absprec(self) -> int:
        return self.valuation + len(self.coeffs)

    @property
    def is_zero(self) -> bool:
        return self.coeffs[0] == 0

    def ord(self) -> int:
        if self.is_zero:
            raise InsufficientPrecision("valuation of a series that is zero to precision")
        return self.valuation

    @property
    def lead(self) -> int:
        return self.coeffs[0]

    def coefficient(self, e: int) -> int:
        if e >= self.absprec:
            raise InsufficientPrecision(f"coefficient of pi^{e} not known (absprec {self.absprec})")
        i = e - self.valuation
        return self.coeffs[i] if i >= 0 else 0

    def coefficients(self, lo: int, hi: int) -> list[int]:
        """Coefficients of pi^lo .. pi^(hi-1)."""
        if hi > self.absprec:
            raise InsufficientPrecision(f"need pi^{hi - 1}, known below pi^{self.absprec}")
        return [self.coefficient(e) for e in range(lo, hi)]

    def truncate(self, absprec: int) -> Series:
        if absprec >= self.absprec:
            return self
        if absprec <= self.valuation:
            return Series.zero(self.q, absprec)
        return Series(self.q, self.valuation, self.coeffs[: absprec - self.valuation])

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Series):
            return NotImplemented
        return (self.q, self.valuation, self.coeffs) == (other.q, other.valuation, other.coeffs)

    def __hash__(self) -> int:
        return hash((self.q, self.valuation, self.coeffs))

    # -- arithmetic ------------------------------------------------------
    def __add__(self, other: Series) -> Series:
        q = self.q
        prec = min(self.absprec, other.absprec)
        lo = min(self.valuation, other.valuation)
        if lo >= prec:
            return Series.zero(q, prec)
        out = [0] * (prec - lo)
        for s in (self, other):
            for i, c in enumerate(s.coeffs):
                e = s.valuation + i
                if e >= prec:
                    break
                out[e - lo] += c
        return Series(q, lo, out)

    def __neg__(self) -> Series:
        return Series(self.q, self.valuation, [-c for c in self.coeffs])

    def __sub__(self, other: Series) -> Series:
        return self + (-other)

    def __mul__(self, other) -> Series:
        if isinstance(other, int):
            return self.scale(other)
        q = self.q
        if self.is_zero and other.is_zero:
            return Series.zero(q, self.absprec + other.absprec)
        if self.is_zero:
            return Series.zero(q, self.absprec + other.valuation)
        if other.is_zero:
            return Series.zero(q, other.absprec + self.valuation)
        n = min(self.precision, other.precision)
        return Series(q, self.valuation + other.valuation,
                      _mul_trunc(list(self.coeffs), list(other.coeffs), n, q))

    __rmul__ = __mul__

    def scale(self, c: int) -> Series:
        c %= self.q
        if c == 0:
            return Series.zero(self.q, self.absprec)
        return Series(self.q, self.valuation, [c * x for x in self.coeffs])

    def shift(self, n: int) -> Series:
        """Multiply by pi^n."""
        return Series(self.q, self.valuation + n, self.coeffs) if not self.is_zero \
            else Series.zero(self.q, self.absprec + n)

    def invert(self) -> Series:
        if self.is_zero:
            raise InsufficientPrecision("cannot invert a series that is zero to precision")
        return Series(self.q, -self.valuation, _inv_unit(list(self.coeffs), self.precision, self.q))

    def __truediv__(self, other: Series) -> Series:
        return self * other.invert()

    def __repr__(self) -> str:
        return f"Series({format_series(self)})"


def format_series(s: Series) -> str:
    """Debug form ``c*pi^v + ... + O(pi^N)``."""
    terms = [f"{c}*pi^{s.valuation + i}" for i, c in enumerate(s.coeffs) if c]
    terms.append(f"O(pi^{s.absprec})")
    return " + ".join(terms)


def series_sqrt(a: Series) -> Series:
    """Square root by Newton iteration x <- (x + a/x)/2.

    The root whose leading coefficient is the least square root in [0, q) is
    returned, so the branch is deterministic.
    """
    q = a.q
    if a.is_zero:
        raise InsufficientPrecision("square root of a series that is zero to precision")
    if a.valuation % 2:
        raise OddValuation(f"valuation {a.valuation} is odd")
    cfg = FqConfig(q)
    if not cfg.is_square(a.lead):
        raise NonSquareLeadingCoeff(f"leading coefficient {a.lead} is not a square mod {q}")
    half_val = a.valuation // 2
    n = a.precision
    unit = list(a.coeffs)
    x = [cfg.sqrt(a.lead)]
    inv2 = pow(2, q - 2, q)
    known = 1
    while known < n:
        m = min(2 * known, n)
        xx = x + [0] * (m - len(x))
        quot = _mul_trunc(unit, _inv_unit(xx, m, q), m, q)
        x = [(xi + qi) * inv2 % q for xi, qi in zip(xx, quot)]
        # residual x^2 - a must vanish on the m certified digits
        sq = _mul_trunc(x, x, m, q)
        if any((s - u) % q for s, u in zip(sq, unit[:m])):
            raise AssertionError("Newton step failed to double the certified digits")
        known = m
    return Series(q, half_val, x)


class QuadContext:
    """Shared radicand ``a`` with its cached pi-adic square root."""

    def __init__(self, radicand: Poly) -> None:
        if radicand.is_zero() or not radicand.is_monic() or radicand.degree % 2:
            raise AlgebraError("radicand must be monic of even degree")
        self.q = radicand.q
        self.radicand = radicand
        self.half_deg = radicand.degree // 2
        self._sqrt: Series | None = None

    def sqrt_series(self, absprec: int) -> Series:
        """sqrt(a) known modulo pi^absprec."""
        if self._sqrt is None or self._sqrt.absprec < absprec:
            rel = max(absprec + self.half_deg, 8)
            if self._sqrt is not None:
                rel = max(rel, 2 * self._sqrt.precision)
            self._sqrt = series_sqrt(Series.from_poly(self.radicand, rel - 2 * self.half_deg))
        return self._sqrt.truncate(absprec)

    def elem(self, u, v=0) -> QuadElem:
        return QuadElem(self, _as_rational(u, self.q), _as_rational(v, self.q))

    def __repr__(self) -> str:
        return f"QuadContext(sqrt({format_poly(self.radicand)}))"


def _as_rational(x, q: int) -> RationalFn:
    if isinstance(x, RationalFn):
        return x
    if isinstance(x, Poly):
        return RationalFn(x, reduce=False)
    if isinstance(x, int):
        return RationalFn.from_int(q, x)
    raise TypeError(f"cannot coerce {type(x).__name__} into F_q(T)")


class QuadElem:
    """Exact element u + v*sqrt(a) of F(sqrt(a)) inside K."""

    __slots__ = ("ctx", "u", "v")

    def __init__(self, ctx: QuadContext, u: RationalFn, v: RationalFn) -> None:
        self.ctx = ctx
        self.u = u
        self.v = v

    def is_zero(self) -> bool:
        return self.u.is_zero() and self.v.is_zero()

    def _coerce(self, other) -> QuadElem:
        if isinstance(other, QuadElem):
            if other.ctx is not self.ctx and other.ctx.radicand != self.ctx.radicand:
                raise AlgebraError("mixing different quadratic contexts")
            return other
        return QuadElem(self.ctx, _as_rational(other, self.ctx.q), RationalFn.from_int(self.ctx.q, 0))

    def __add__(self, other) -> QuadElem:
        o = self._coerce(other)
        return QuadElem(self.ctx, self.u + o.u, self.v + o.v)

    __radd__ = __add__

    def __neg__(self) -> QuadElem:
        return QuadElem(self.ctx, -self.u, -self.v)

    def __sub__(self, other) -> QuadElem:
        return self + (-self._coerce(other))

    def __rsub__(self, other) -> QuadElem:
        return self._coerce(other) - self

    def __mul__(self, other) -> QuadElem:
        if isinstance(other, (int, Poly, RationalFn)):
            r = _as_rational(other, self.ctx.q)
            return QuadElem(self.ctx, self.u * r, self.v * r)
        o = self._coerce(other)
        a = self.ctx.radicand
        u = self.u * o.u + self.v * o.v * a
        v = self.u * o.v + self.v * o.u
        return QuadElem(self.ctx, u, v)

    __rmul__ = __mul__

    def conj(self) -> QuadElem:
        return QuadElem(self.ctx, self.u, -self.v)

    def norm(self) -> RationalFn:
        return self.u * self.u - self.v * self.v * self.ctx.radicand

    def inverse(self) -> QuadElem:
        n = self.norm()
        if n.is_zero():
            raise ZeroDivisionError("inverse of zero")
        ninv = n.inverse()
        return QuadElem(self.ctx, self.u * ninv, -self.v * ninv)

    def __truediv__(self, other) -> QuadElem:
        return self * self._coerce(other).inverse()

    def __eq__(self, other: object) -> bool:
        if isinstance(other, (int, Poly, RationalFn)):
            other = self._coerce(other)
        if not isinstance(other, QuadElem):
            return NotImplemented
        return self.u == other.u and self.v == other.v

    def __hash__(self) -> int:
        return hash((self.u, self.v))

    def ord(self) -> int | float:
        return quad_ord(self)

    def __repr__(self) -> str:
        return f"QuadElem({self.u!r} + {self.v!r}*sqrt({format_poly(self.ctx.radicand)}))"


def quad_ord(x: QuadElem) -> int | float:
    """Exact valuation at infinity of u + v*sqrt(a).

    When the leading terms of u and v*sqrt(a) cancel, the conjugate
    u - v*sqrt(a) has valuation exactly m and the norm identity
    ord(x) + ord(conj x) = ord(u^2 - a v^2) gives the answer.
    """
    ou, ov = x.u.ord(), x.v.ord()
    if ov == INF:
        return ou
    ovs = ov - x.ctx.half_deg
    if ou == INF:
        return ovs
    if ou != ovs:
        return min(ou, ovs)
    # sqrt(a) has leading coefficient 1 on the chosen branch
    if (x.u.lead() + x.v.lead()) % x.ctx.q:
        return ou
    return x.norm().ord() - ou


def quad_to_series(x: QuadElem, precision: int) -> Series:
    """Expansion of x correct modulo pi^(ord(x) + precision)."""
    q = x.ctx.q
    o = quad_ord(x)
    if o == INF:
        return Series.zero(q, precision)
    return quad_to_series_abs(x, int(o) + precision)


def quad_to_series_abs(x: QuadElem, absprec: int) -> Series:
    """Expansion of x known modulo pi^absprec (any cancellation is exact)."""
    q = x.ctx.q
    parts = []
    if not x.u.is_zero():
        if x.u.ord() < absprec:
            parts.append(Series.from_rational(x.u, absprec))
    if not x.v.is_zero():
        ov = int(x.v.ord())
        h = x.ctx.half_deg
        if ov - h < absprec:
            vs = Series.from_rational(x.v, absprec + h)
            parts.append(vs * x.ctx.sqrt_series(absprec - ov))
    if not parts:
        return Series.zero(q, absprec)
    out = parts[0]
    for p in parts[1:]:
        out = out + p
    return out.truncate(absprec)


class KMatrix:
    """2x2 matrix over F(sqrt(a)) acting on K^2."""

    __slots__ = ("m11", "m12", "m21", "m22")

    def __init__(self, m11: QuadElem, m12: QuadElem, m21: QuadElem, m22: QuadElem) -> None:
        self.m11, self.m12, self.m21, self.m22 = m11, m12, m21, m22

    @classmethod
    def identity(cls, ctx: QuadContext) -> KMatrix:
        return cls(ctx.elem(1), ctx.elem(0), ctx.elem(0), ctx.elem(1))

    @property
    def ctx(self) -> QuadContext:
        return self.m11.ctx

    @property
    def entries(self) -> tuple[QuadElem, QuadElem, QuadElem, QuadElem]:
        return (self.m11, self.m12, self.m21, self.m22)

    def __mul__(self, other) -> KMatrix:
        if not isinstance(other, KMatrix):
            return KMatrix(*(e * other for e in self.entries))
        return KMatrix(
            self.m11 * other.m11 + self.m12 * other.m21,
            self.m11 * other.m12 + self.m12 * other.m22,
            self.m21 * other.m11 + self.m22 * other.m21,
            self.m21 * other.m12 + self.m22 * other.m22,
        )

    __rmul__ = __mul__

    def det(self) -> QuadElem:
        return self.m11 * self.m22 - self.m12 * self.m21

    def trace(self) -> QuadElem:
        return self.m11 + self.m22

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, KMatrix):
            return NotImplemented
        return self.entries == other.entries

    def __hash__(self) -> int:
        return hash(self.entries)

    def __repr__(self) -> str:
        return f"KMatrix({self.m11!r}, {self.m12!r}; {self.m21!r}, {self.m22!r})"
