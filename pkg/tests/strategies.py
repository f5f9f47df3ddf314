from __future__ import annotations

from hypothesis import strategies as st

from quatgen.base_algebra import Poly


def polys(q: int = 3, max_deg: int = 6, nonzero: bool = False):
    coeffs = st.lists(st.integers(0, q - 1), min_size=1, max_size=max_deg + 1)
    out = coeffs.map(lambda c: Poly(q, c))
    return out.filter(bool) if nonzero else out


def quat_elems(alg, max_deg: int = 3):
    return st.tuples(*(polys(alg.q, max_deg) for _ in range(4))).map(lambda t: alg.elem(*t))
