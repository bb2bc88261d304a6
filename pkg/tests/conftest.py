import sys
from fractions import Fraction

from hypothesis import HealthCheck, settings
from hypothesis import strategies as st

from crgap.algebra import GaussScalar, Poly, VarTable

settings.register_profile("default", max_examples=60, deadline=None, suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")

small_q = st.fractions(min_value=-5, max_value=5, max_denominator=6)
scalars = st.builds(GaussScalar, small_q, small_q)

VT = VarTable.build(["z0", "z1"], ["C"])


@st.composite
def polys(draw, vt=VT, max_terms=4, max_exp=2):
    terms = {}
    for _ in range(draw(st.integers(0, max_terms))):
        mono = tuple(draw(st.integers(0, max_exp)) for _ in vt.names)
        terms[mono] = draw(scalars)
    return Poly(vt, terms)


def q(x) -> Fraction:
    return Fraction(x)


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance")
    if mod is None or not mod.RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for num in sorted(mod.RESULTS):
        terminalreporter.write_line(mod.line(num))
