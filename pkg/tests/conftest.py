import numpy as np
import pytest
from hypothesis import HealthCheck, settings
from hypothesis import strategies as st

from symlab.core import Dyadic

settings.register_profile("default", max_examples=60, deadline=None,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")


def dyadics(max_mantissa: int = 64, min_exp: int = -4, max_exp: int = 2):
    return st.builds(Dyadic, st.integers(-max_mantissa, max_mantissa), st.integers(min_exp, max_exp))


def interval_unions(max_parts: int = 4):
    """Lists of (a, b) dyadic pairs with a <= b."""
    def pair(m):
        a, b = sorted(m)
        return (Dyadic(a, -2), Dyadic(b, -2))
    return st.lists(st.tuples(st.integers(-16, 16), st.integers(-16, 16)).map(pair),
                    min_size=1, max_size=max_parts)


def masks(shape_max: int = 6, ndim: int = 2):
    return st.tuples(*[st.integers(1, shape_max)] * ndim).flatmap(
        lambda shp: st.lists(st.booleans(), min_size=int(np.prod(shp)), max_size=int(np.prod(shp)))
        .map(lambda bits: np.array(bits, dtype=bool).reshape(shp))
        .filter(lambda m: m.any()))


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


ACCEPTANCE: list[str] = []


@pytest.fixture
def criterion():
    """Record and print one PASS/FAIL line per acceptance criterion."""
    def record(number: int, passed: bool, detail: str = ""):
        line = f"criterion {number:2d}: {'PASS' if passed else 'FAIL'}  {detail}"
        ACCEPTANCE.append(line)
        print(line)
        return passed
    return record


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE):
            terminalreporter.write_line(line)
