import math
from fractions import Fraction

import pytest
from hypothesis import HealthCheck, settings

settings.register_profile("default", deadline=None, max_examples=40,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")

SQRT_HALF = 1 / math.sqrt(2)


@pytest.fixture
def symmetric_coin():
    """u0 = 1/sqrt2, d0 = i/sqrt2."""
    return SQRT_HALF, 1j * SQRT_HALF


@pytest.fixture
def phase150():
    return Fraction(1, 150)


# ---------------------------------------------------------------- acceptance report

def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(number, title): acceptance criterion")
    config._criteria = {}


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    marker = item.get_closest_marker("criterion")
    if marker is None or (rep.when != "call" and not rep.failed):
        return
    number, title = marker.args
    previous = item.config._criteria.get(number, (title, "PASS"))[1]
    status = "FAIL" if rep.failed or previous == "FAIL" else "PASS"
    item.config._criteria[number] = (title, status)


def pytest_terminal_summary(terminalreporter, config):
    results = config._criteria
    if not results:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(results):
        title, status = results[number]
        terminalreporter.write_line(f"criterion {number:2d} {status}  {title}")
