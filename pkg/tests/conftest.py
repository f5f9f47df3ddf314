from __future__ import annotations

import hypothesis
import pytest

from quatgen.base_algebra import FqConfig, parse_poly_list
from quatgen.generators import generating_set
from quatgen.quaternion import build_algebra
from quatgen.quotient import build_quotient

hypothesis.settings.register_profile("default", max_examples=60, deadline=None)
hypothesis.settings.register_profile("fast", max_examples=10, deadline=None)
hypothesis.settings.load_profile("default")

CASE_A = "T,T+1"
CASE_B = "T,T^2+1"


def make_algebra(R: str, q: int = 3):
    return build_algebra(FqConfig(q), parse_poly_list(R, q))


@pytest.fixture(scope="session")
def alg_a():
    return make_algebra(CASE_A)


@pytest.fixture(scope="session")
def alg_b():
    return make_algebra(CASE_B)


@pytest.fixture(scope="session")
def qg_a(alg_a):
    return build_quotient(alg_a)


@pytest.fixture(scope="session")
def qg_b(alg_b):
    return build_quotient(alg_b)


@pytest.fixture(scope="session")
def gs_a(qg_a):
    return generating_set(qg_a)


@pytest.fixture(scope="session")
def gs_b(qg_b):
    return generating_set(qg_b)
