import sys
from fractions import Fraction

import pytest
from hypothesis import HealthCheck, settings
from hypothesis import strategies as st

from azpair.polynomial import PolyQ

settings.register_profile(
    "default",
    deadline=None,
    max_examples=60,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("default")


def rationals(max_num=50, max_den=20, nonzero=False):
    num = st.integers(-max_num, max_num)
    if nonzero:
        num = num.filter(lambda n: n != 0)
    return st.builds(Fraction, num, st.integers(1, max_den))


@st.composite
def polys(draw, max_degree=4, min_degree=0, coeff=None):
    coeff = coeff if coeff is not None else rationals()
    d = draw(st.integers(min_degree, max_degree))
    cs = draw(st.lists(coeff, min_size=d + 1, max_size=d + 1))
    if d >= 1 and cs[-1] == 0:
        cs[-1] = Fraction(1)
    return PolyQ(cs)


@st.composite
def monic_int_polys(draw, degrees=(2, 3), bound=9):
    d = draw(st.sampled_from(degrees))
    cs = draw(st.lists(st.integers(-bound, bound), min_size=d, max_size=d))
    return PolyQ(cs + [1])


@pytest.fixture
def P():
    from azpair.polynomial import parse_poly

    return parse_poly


def pytest_terminal_summary(terminalreporter):
    acceptance = sys.modules.get("test_acceptance")
    lines = getattr(acceptance, "RESULTS", None)
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in lines:
            terminalreporter.write_line(line)
