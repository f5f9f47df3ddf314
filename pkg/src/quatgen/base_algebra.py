"""Exact arithmetic in F_q, A = F_q[T] and F = F_q(T) for odd primes q.

Field elements are plain ints in ``range(q)``.  Polynomials are immutable
coefficient tuples, lowest degree first, with no trailing zeros; the zero
polynomial is the empty tuple and has degree ``None``.
"""

from __future__ import annotations

import itertools
import math
import re
from dataclasses import dataclass
from functools import lru_cache
from typing import Iterable, Iterator, Sequence

INF = math.inf  # valuation of zero


class AlgebraError(ValueError):
    """Invalid input to a number-theoretic primitive."""


def _is_prime(n: int) -> bool:
    if n < 2:
        return False
    return all(n % d for d in range(2, math.isqrt(n) + 1))


@dataclass(frozen=True)
class FqConfig:
    q: int

    def __post_init__(self) -> None:
        if self.q < 3 or not _is_prime(self.q):
            raise AlgebraError(f"q must be an odd prime, got {self.q}")

    def inv(self, x: int) -> int:
        x %= self.q
        if x == 0:
            raise ZeroDivisionError("inverse of 0 in F_q")
        return pow(x, self.q - 2, self.q)

    def is_square(self, x: int) -> bool:
        x %= self.q
        return x == 0 or pow(x, (self.q - 1) // 2, self.q) == 1

    def sqrt(self, x: int) -> int:
        """Least square root of ``x`` in ``range(q)``."""
        x %= self.q
        for r in range(self.q):
            if r * r % self.q == x:
                return r
        raise AlgebraError(f"{x} is not a square mod {self.q}")

    def primitive_root(self) -> int:
        q = self.q
        for g in range(2, q):
            if all(pow(g, (q - 1) // p, q) != 1 for p in _prime_factors(q - 1)):
                return g
        return 1  # q == 2 is excluded, q == 3 handled by loop


def _prime_factors(n: int) -> list[int]:
    out, d = [], 2
    while d * d <= n:
        if n % d == 0:
            out.append(d)
            while n % d == 0:
                n //= d
        d += 1
    if n > 1:
        out.append(n)
    return out


def fq_nonsquare(cfg: FqConfig) -> int:
    """Least xi in F_q with xi^((q-1)/2) = -1."""
    q = cfg.q
    for x in range(2, q):
        if pow(x, (q - 1) // 2, q) == q - 1:
            return x
    raise AlgebraError("no nonsquare found")  # unreachable for odd q


class Poly:
    """Dense polynomial over F_q."""

    __slots__ = ("q", "coeffs")

    def __init__(self, q: int, coeffs: Iterable[int] = ()) -> None:
        c = [x % q for x in coeffs]
        while c and c[-1] == 0:
            c.pop()
        self.q = q
        self.coeffs = tuple(c)

    @classmethod
    def _raw(cls, q: int, coeffs: tuple[int, ...]) -> Poly:
        p = object.__new__(cls)
        p.q = q
        p.coeffs = coeffs
        return p

    @classmethod
    def const(cls, q: int, c: int) -> Poly:
        return cls(q, (c,))

    @classmethod
    def monomial(cls, q: int, n: int, c: int = 1) -> Poly:
        return cls(q, (0,) * n + (c,))

    @classmethod
    def T(cls, q: int) -> Poly:
        return cls._raw(q, (0, 1))

    # -- basic queries -------------------------------------------------
    @property
    def degree(self) -> int | None:
        return len(self.coeffs) - 1 if self.coeffs else None

    @property
    def lc(self) -> int:
        return self.coeffs[-1] if self.coeffs else 0

    def is_zero(self) -> bool:
        return not self.coeffs

    def is_const(self) -> bool:
        return len(self.coeffs) <= 1

    def is_monic(self) -> bool:
        return self.lc == 1

    def __bool__(self) -> bool:
        return bool(self.coeffs)

    def __getitem__(self, n: int) -> int:
        return self.coeffs[n] if 0 <= n < len(self.coeffs) else 0

    def __eq__(self, other: object) -> bool:
        if isinstance(other, int):
            return self.coeffs == Poly(self.q, (other,)).coeffs
        if not isinstance(other, Poly):
            return NotImplemented
        return self.q == other.q and self.coeffs == other.coeffs

    def __hash__(self) -> int:
        return hash((self.q, self.coeffs))

    def sort_key(self) -> tuple:
        """Degree first, then coefficients from the top down."""
        return (len(self.coeffs), self.coeffs[::-1])

    def __lt__(self, other: Poly) -> bool:
        return self.sort_key() < other.sort_key()

    # -- ring operations -----------------------------------------------
    def _coerce(self, other) -> Poly:
        if isinstance(other, Poly):
            if other.q != self.q:
                raise AlgebraError("mixing polynomials over different fields")
            return other
        if isinstance(other, int):
            return Poly(self.q, (other,))
        return NotImplemented

    def __add__(self, other) -> Poly:
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        a, b = self.coeffs, other.coeffs
        if len(a) < len(b):
            a, b = b, a
        q = self.q
        return Poly(q, [x + y for x, y in zip(a, b)] + list(a[len(b):]))

    __radd__ = __add__

    def __neg__(self) -> Poly:
        q = self.q
        return Poly._raw(q, tuple((-x) % q for x in self.coeffs))

    def __sub__(self, other) -> Poly:
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other) -> Poly:
        return (-self) + other

    def __mul__(self, other) -> Poly:
        if isinstance(other, int):
            other %= self.q
            if other == 0:
                return Poly._raw(self.q, ())
            return Poly._raw(self.q, tuple(x * other % self.q for x in self.coeffs))
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        a, b = self.coeffs, other.coeffs
        if not a or not b:
            return Poly._raw(self.q, ())
        out = [0] * (len(a) + len(b) - 1)
        for i, x in enumerate(a):
            if x:
                for j, y in enumerate(b):
                    out[i + j] += x * y
        return Poly(self.q, out)

    __rmul__ = __mul__

    def shift(self, n: int) -> Poly:
        """Multiply by T^n (n >= 0)."""
        if not self.coeffs:
            return self
        return Poly._raw(self.q, (0,) * n + self.coeffs)

    def __divmod__(self, other) -> tuple[Poly, Poly]:
        other = self._coerce(other)
        if not other.coeffs:
            raise ZeroDivisionError("division by the zero polynomial")
        q = self.q
        r = list(self.coeffs)
        b = other.coeffs
        db = len(b) - 1
        inv = pow(b[-1], q - 2, q)
        if len(r) <= db:
            return Poly._raw(q, ()), self
        quot = [0] * (len(r) - db)
        for i in range(len(r) - 1, db - 1, -1):
            c = r[i] * inv % q
            if c:
                quot[i - db] = c
                for j in range(db + 1):
                    r[i - db + j] = (r[i - db + j] - c * b[j]) % q
        return Poly(q, quot), Poly(q, r[:db])

    def __floordiv__(self, other) -> Poly:
        return divmod(self, other)[0]

    def __mod__(self, other) -> Poly:
        return divmod(self, other)[1]

    def __pow__(self, n: int) -> Poly:
        result = Poly.const(self.q, 1)
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    def monic(self) -> Poly:
        if not self.coeffs:
            return self
        return self * pow(self.lc, self.q - 2, self.q)

    def __call__(self, x: int) -> int:
        y = 0
        for c in reversed(self.coeffs):
            y = (y * x + c) % self.q
        return y

    def derivative(self) -> Poly:
        return Poly(self.q, [i * c for i, c in enumerate(self.coeffs)][1:])

    def __repr__(self) -> str:
        return f"Poly({format_poly(self)!r}, q={self.q})"

    def __str__(self) -> str:
        return format_poly(self)


# -- suite of polynomial operations -------------------------------------


def poly_gcd(a: Poly, b: Poly) -> Poly:
    """Monic gcd (zero if both are zero)."""
    while b:
        a, b = b, a % b
    return a.monic()


def poly_xgcd(a: Poly, b: Poly) -> tuple[Poly, Poly, Poly]:
    """Return (g, s, t) with g = s*a + t*b and g monic."""
    q = a.q
    r0, r1 = a, b
    s0, s1 = Poly.const(q, 1), Poly(q)
    t0, t1 = Poly(q), Poly.const(q, 1)
    while r1:
        quo, rem = divmod(r0, r1)
        r0, r1 = r1, rem
        s0, s1 = s1, s0 - quo * s1
        t0, t1 = t1, t0 - quo * t1
    if not r0:
        return r0, s0, t0
    inv = pow(r0.lc, q - 2, q)
    return r0 * inv, s0 * inv, t0 * inv


def poly_invmod(a: Poly, m: Poly) -> Poly:
    g, s, _ = poly_xgcd(a % m, m)
    if g != Poly.const(a.q, 1):
        raise AlgebraError(f"{a} is not invertible modulo {m}")
    return s % m


def poly_powmod(a: Poly, e: int, m: Poly) -> Poly:
    result = Poly.const(a.q, 1) % m
    base = a % m
    while e:
        if e & 1:
            result = result * base % m
        base = base * base % m
        e >>= 1
    return result


def is_irreducible(f: Poly) -> bool:
    """Rabin-style test: gcd(T^(q^i) - T, f) = 1 for all i <= deg(f)/2."""
    if f.is_zero():
        raise AlgebraError("irreducibility of the zero polynomial is undefined")
    d = f.degree
    if d == 0:
        return False
    if d == 1:
        return True
    q = f.q
    t = Poly.T(q)
    h = t % f
    for _ in range(d // 2):
        h = poly_powmod(h, q, f)
        if not poly_gcd(h - t, f).is_const():
            return False
    return True


def _require_monic_irreducible(f: Poly) -> None:
    if f.is_zero() or not f.is_monic() or not is_irreducible(f):
        raise AlgebraError(f"{f} is not monic irreducible")


def legendre(a: Poly, f: Poly, check: bool = True) -> int:
    """Legendre symbol (a/f) in {-1, 0, 1} for monic irreducible f."""
    if check:
        _require_monic_irreducible(f)
    r = a % f
    if not r:
        return 0
    e = (f.q ** f.degree - 1) // 2
    v = poly_powmod(r, e, f)
    if v == Poly.const(f.q, 1):
        return 1
    if v == Poly.const(f.q, -1):
        return -1
    raise AlgebraError(f"{f} is not irreducible")  # Euler criterion failed


def reciprocity_check(a: Poly, f: Poly) -> bool:
    """Check (f/a) = (-1)^((q-1)/2 deg a deg f) (a/f) for a coprime pair."""
    _require_monic_irreducible(a)
    _require_monic_irreducible(f)
    if a == f:
        raise AlgebraError("reciprocity needs coprime inputs")
    sign = -1 if ((a.q - 1) // 2 * a.degree * f.degree) % 2 else 1
    return legendre(f, a, check=False) == sign * legendre(a, f, check=False)


def crt(residues: Sequence[Poly], moduli: Sequence[Poly]) -> Poly:
    """Solve x = r_i mod m_i for pairwise coprime m_i; deg(x) < deg(prod m_i)."""
    if len(residues) != len(moduli) or not moduli:
        raise AlgebraError("crt needs matching nonempty residue/moduli lists")
    q = moduli[0].q
    x, m = Poly(q), Poly.const(q, 1)
    for r, mi in zip(residues, moduli):
        if mi.is_zero():
            raise AlgebraError("zero modulus")
        if not poly_gcd(m, mi).is_const():
            raise AlgebraError("moduli are not pairwise coprime")
        # x + m*t = r mod mi
        t = (r - x) * poly_invmod(m, mi) % mi
        x = x + m * t
        m = m * mi
    return x % m


def monic_polys(q: int, d: int) -> Iterator[Poly]:
    """All monic polynomials of degree d, in lexicographic order (top down)."""
    for tail in itertools.product(range(q), repeat=d):
        yield Poly._raw(q, tuple(reversed(tail)) + (1,))


def polys_below(q: int, d: int) -> Iterator[Poly]:
    """All polynomials of degree < d (including 0)."""
    for c in itertools.product(range(q), repeat=d):
        yield Poly(q, c)


@lru_cache(maxsize=None)
def monic_irreducibles(q: int, d: int) -> tuple[Poly, ...]:
    return tuple(f for f in monic_polys(q, d) if is_irreducible(f))


def factor_trial(f: Poly) -> dict[Poly, int]:
    """Monic irreducible factorization by trial division (small degrees only)."""
    if f.is_zero():
        raise AlgebraError("cannot factor zero")
    out: dict[Poly, int] = {}
    rest = f.monic()
    d = 1
    while rest.degree and 2 * d <= rest.degree:
        for p in monic_irreducibles(f.q, d):
            while True:
                quo, rem = divmod(rest, p)
                if rem:
                    break
                out[p] = out.get(p, 0) + 1
                rest = quo
        d += 1
    if rest.degree:
        out[rest] = out.get(rest, 0) + 1
    return out


def ord_at(f: Poly, p: Poly) -> int | float:
    """Valuation of f at the finite place p (monic irreducible)."""
    if f.is_zero():
        return INF
    n = 0
    while True:
        quo, rem = divmod(f, p)
        if rem:
            return n
        f = quo
        n += 1


# -- rational functions -------------------------------------------------


class RationalFn:
    """Element num/den of F_q(T) in lowest terms with den monic."""

    __slots__ = ("num", "den")

    def __init__(self, num: Poly, den: Poly | None = None, reduce: bool = True) -> None:
        if den is None:
            den = Poly.const(num.q, 1)
        if den.is_zero():
            raise ZeroDivisionError("zero denominator")
        if reduce:
            if num.is_zero():
                den = Poly.const(num.q, 1)
            elif not den.is_const():
                g = poly_gcd(num, den)
                if not g.is_const():
                    num, den = num // g, den // g
            if den.lc != 1:
                inv = pow(den.lc, num.q - 2, num.q)
                num, den = num * inv, den * inv
        self.num = num
        self.den = den

    @classmethod
    def from_int(cls, q: int, c: int) -> RationalFn:
        return cls(Poly.const(q, c))

    @classmethod
    def pi_power(cls, q: int, k: int) -> RationalFn:
        """pi^k = T^(-k)."""
        one = Poly.const(q, 1)
        if k >= 0:
            return cls(one, Poly.monomial(q, k), reduce=False)
        return cls(Poly.monomial(q, -k), one, reduce=False)

    @property
    def q(self) -> int:
        return self.num.q

    def is_zero(self) -> bool:
        return self.num.is_zero()

    def __bool__(self) -> bool:
        return bool(self.num)

    def deg(self) -> int | None:
        if self.num.is_zero():
            return None
        return self.num.degree - self.den.degree

    def ord(self) -> int | float:
        """Valuation at infinity: -deg, +inf for zero."""
        if self.num.is_zero():
            return INF
        return self.den.degree - self.num.degree

    def lead(self) -> int:
        """Leading coefficient of the expansion in pi = 1/T."""
        return self.num.lc  # den is monic

    def is_poly(self) -> bool:
        return self.den.degree == 0

    def __eq__(self, other: object) -> bool:
        if isinstance(other, int):
            other = RationalFn.from_int(self.q, other)
        elif isinstance(other, Poly):
            other = RationalFn(other)
        if not isinstance(other, RationalFn):
            return NotImplemented
        return self.num == other.num and self.den == other.den

    def __hash__(self) -> int:
        return hash((self.num, self.den))

    def _coerce(self, other) -> RationalFn:
        if isinstance(other, RationalFn):
            return other
        if isinstance(other, Poly):
            return RationalFn(other)
        if isinstance(other, int):
            return RationalFn.from_int(self.q, other)
        return NotImplemented

    def __add__(self, other) -> RationalFn:
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        if self.den == other.den:
            return RationalFn(self.num + other.num, self.den)
        return RationalFn(self.num * other.den + other.num * self.den, self.den * other.den)

    __radd__ = __add__

    def __neg__(self) -> RationalFn:
        return RationalFn(-self.num, self.den, reduce=False)

    def __sub__(self, other) -> RationalFn:
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other) -> RationalFn:
        return (-self) + other

    def __mul__(self, other) -> RationalFn:
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        if self.den.is_const() and other.den.is_const():
            return RationalFn(self.num * other.num, self.den, reduce=False)
        return RationalFn(self.num * other.num, self.den * other.den)

    __rmul__ = __mul__

    def inverse(self) -> RationalFn:
        if self.num.is_zero():
            raise ZeroDivisionError("inverse of zero rational function")
        return RationalFn(self.den, self.num)

    def __truediv__(self, other) -> RationalFn:
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self * other.inverse()

    def __repr__(self) -> str:
        if self.den.degree == 0:
            return f"RationalFn({format_poly(self.num)})"
        return f"RationalFn(({format_poly(self.num)})/({format_poly(self.den)}))"


# -- text syntax --------------------------------------------------------

_TERM = re.compile(r"^(?:(\d+)(?:\*(T)(?:\^(\d+))?)?|(T)(?:\^(\d+))?)$")


def parse_poly(text: str, q: int) -> Poly:
    """Parse ``"c_n*T^n + ... + c_0"``; whitespace is ignored."""
    s = "".join(text.split())
    if not s:
        raise AlgebraError("empty polynomial")
    if s[0] not in "+-":
        s = "+" + s
    parts = re.findall(r"[+-][^+-]*", s)
    if "".join(parts) != s:
        raise AlgebraError(f"cannot parse polynomial {text!r}")
    coeffs: dict[int, int] = {}
    for part in parts:
        sign, body = (-1 if part[0] == "-" else 1), part[1:]
        m = _TERM.match(body)
        if not m:
            raise AlgebraError(f"bad polynomial term {body!r} in {text!r}")
        if m.group(1) is not None:
            c = int(m.group(1))
            n = 0 if m.group(2) is None else int(m.group(3) or 1)
        else:
            c, n = 1, int(m.group(5) or 1)
        coeffs[n] = coeffs.get(n, 0) + sign * c
    top = max(coeffs)
    return Poly(q, [coeffs.get(i, 0) for i in range(top + 1)])


def format_poly(f: Poly) -> str:
    if not f.coeffs:
        return "0"
    terms = []
    for n in range(len(f.coeffs) - 1, -1, -1):
        c = f.coeffs[n]
        if not c:
            continue
        if n == 0:
            terms.append(str(c))
            continue
        mono = "T" if n == 1 else f"T^{n}"
        terms.append(mono if c == 1 else f"{c}*{mono}")
    return " + ".join(terms)


def parse_poly_list(text: str, q: int) -> list[Poly]:
    return [parse_poly(p, q) for p in text.split(",") if p.strip()]
