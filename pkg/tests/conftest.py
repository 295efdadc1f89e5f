import pytest
from hypothesis import HealthCheck, settings

from tournament_powers.construct import paley, random_tournament, transitive_tournament

settings.register_profile(
    "default", deadline=None, max_examples=60, suppress_health_check=[HealthCheck.too_slow]
)
settings.load_profile("default")

ACCEPTANCE_LINES: list[str] = []


@pytest.fixture
def c3():
    return paley(3)


@pytest.fixture
def tt():
    return transitive_tournament


@pytest.fixture
def rnd():
    return random_tournament


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
