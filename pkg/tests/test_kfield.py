from __future__ import annotations

import pytest
from hypothesis import assume, given
from hypothesis import strategies as st

from quatgen.base_algebra import Poly, RationalFn, parse_poly
from quatgen.kfield import (
    InsufficientPrecision,
    KMatrix,
    NonSquareLeadingCoeff,
    OddValuation,
    PrecisionPolicy,
    QuadContext,
    Series,
    format_series,
    quad_ord,
    quad_to_series_abs,
    series_sqrt,
)

from strategies import polys

Q = 3


def series(q=Q, max_len=40):
    return st.tuples(st.integers(-6, 6), st.integers(1, q - 1),
                     st.lists(st.integers(0, q - 1), min_size=0, max_size=max_len)).map(
        lambda t: Series(q, t[0], [t[1]] + t[2]))


def expansion_ord(x, absprec=60):
    """Valuation read off a long expansion, without the cancellation shortcut."""
    s = quad_to_series_abs(x, absprec)
    return None if s.is_zero else s.valuation


@given(series())
def test_invert(s):
    one = s * s.invert()
    assert one.valuation == 0
    assert one.coeffs == (1,) + (0,) * (one.precision - 1)


@given(series(), st.sampled_from([1, 2]))
def test_sqrt_squares_back(s, lead):
    v = 2 * (s.valuation // 2)
    a = Series(Q, v, [lead * lead % Q] + list(s.coeffs[1:]))
    r = series_sqrt(a)
    assert r * r == a
    assert r.precision == a.precision
    assert r.lead == 1  # the least square root of 1 mod 3


def test_sqrt_errors():
    with pytest.raises(OddValuation):
        series_sqrt(Series(Q, 1, [1, 0, 1]))
    with pytest.raises(NonSquareLeadingCoeff):
        series_sqrt(Series(Q, 0, [2, 1]))


def test_sqrt_of_radicand():
    ctx = QuadContext(parse_poly("T^2 + T + 2", Q))
    s = ctx.sqrt_series(12)
    assert s.valuation == -1 and s.lead == 1
    sq = s * s
    assert sq.truncate(10) == Series.from_poly(ctx.radicand, 10)


def test_from_rational_matches_poly():
    f = parse_poly("2*T^3 + T + 1", Q)
    assert Series.from_rational(RationalFn(f), 15) == Series.from_poly(f, 15)
    x = Series.from_rational(RationalFn(Poly.const(Q, 1), parse_poly("T + 1", Q)), 10)
    # 1/(T+1) = pi - pi^2 + pi^3 - ...
    assert x.coefficients(1, 6) == [1, 2, 1, 2, 1]
    assert "O(pi^10)" in format_series(x)


def test_coefficient_beyond_precision():
    s = Series(Q, 0, [1, 2])
    with pytest.raises(InsufficientPrecision):
        s.coefficient(5)


@given(polys(max_deg=5), polys(max_deg=5), polys(max_deg=2, nonzero=True),
       st.sampled_from(["T^2 + T + 2", "T^2 + T", "T^4 + T + 2"]))
def test_quad_ord_matches_expansion(u, v, den, rad):
    ctx = QuadContext(parse_poly(rad, Q))
    x = ctx.elem(RationalFn(u, den), RationalFn(v, den))
    assume(not x.is_zero())
    assert quad_ord(x) == expansion_ord(x)


def test_quad_ord_cancellation():
    ctx = QuadContext(parse_poly("T^2 + T + 2", Q))
    # T - sqrt(a): leading terms cancel, norm = -(T + 2)
    x = ctx.elem(Poly(Q, [0, 1]), -1)
    assert quad_ord(x) == 0 == expansion_ord(x)


@given(polys(max_deg=3), polys(max_deg=3), polys(max_deg=3), polys(max_deg=3))
def test_quad_norm_and_inverse(a, b, c, d):
    ctx = QuadContext(parse_poly("T^2 + T + 2", Q))
    x, y = ctx.elem(a, b), ctx.elem(c, d)
    assert (x * y).norm() == x.norm() * y.norm()
    if not x.is_zero():
        assert x * x.inverse() == ctx.elem(1)


@given(polys(max_deg=2), polys(max_deg=2), polys(max_deg=2), polys(max_deg=2))
def test_kmatrix_det_multiplicative(a, b, c, d):
    ctx = QuadContext(parse_poly("T^2 + T + 2", Q))
    M = KMatrix(ctx.elem(a, b), ctx.elem(c), ctx.elem(d), ctx.elem(1, a))
    N = KMatrix(ctx.elem(b), ctx.elem(a, d), ctx.elem(c, 1), ctx.elem(d))
    assert (M * N).det() == M.det() * N.det()
    assert (KMatrix.identity(ctx) * M) == M


def test_precision_policy_doubles():
    seen = []

    def fn(L):
        seen.append(L)
        if L < 200:
            raise InsufficientPrecision("more")
        return L

    assert PrecisionPolicy(64).run(fn) == 256
    assert seen == [64, 128, 256]
    with pytest.raises(InsufficientPrecision):
        PrecisionPolicy(8, max_doublings=1).run(fn)
    with pytest.raises(ValueError):
        PrecisionPolicy(4)
