import math

import pytest

from latticeprod.cumulant import bernoulli, profile
from latticeprod.scheme import build_scheme

# (label, passed, detail) collected by the acceptance suite
ACCEPTANCE_LINES = []


@pytest.fixture(scope="session")
def fair():
    return bernoulli(0.5)


@pytest.fixture(scope="session")
def fair_profile(fair):
    return profile(fair)


@pytest.fixture(scope="session")
def scheme_02(fair_profile):
    return build_scheme(fair_profile, 0.2, 2000)


@pytest.fixture(scope="session")
def scheme_008(fair_profile):
    return build_scheme(fair_profile, 0.08, 2000)


@pytest.fixture(scope="session")
def scheme_crit(fair_profile):
    return build_scheme(fair_profile, fair_profile.lambda1, 2000)


@pytest.fixture(scope="session")
def sqrt_e():
    return math.sqrt(math.e)


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_LINES:
        return
    terminalreporter.section("acceptance criteria")
    for label, ok, detail in ACCEPTANCE_LINES:
        terminalreporter.write_line(f"{'PASS' if ok else 'FAIL'}  {label}: {detail}")
