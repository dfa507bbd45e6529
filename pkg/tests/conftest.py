import pytest
from hypothesis import HealthCheck, settings

from drinfeld_nh.field import field

settings.register_profile(
    "default", deadline=None, max_examples=40,
    suppress_health_check=[HealthCheck.too_slow, HealthCheck.data_too_large],
)
settings.load_profile("default")

QS = (2, 3, 4, 5)


@pytest.fixture(params=QS, ids=lambda q: f"q{q}")
def F(request):
    return field(request.param)


ACCEPTANCE = pytest.StashKey[dict]()


def pytest_configure(config):
    config.stash[ACCEPTANCE] = {}


@pytest.fixture(scope="session")
def acceptance_log(request):
    """Map criterion number → one-line PASS/FAIL verdict, printed in the terminal summary."""
    return request.config.stash[ACCEPTANCE]


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    lines = config.stash.get(ACCEPTANCE, {})
    if not lines:
        return
    terminalreporter.write_sep("=", "acceptance criteria")
    for key in sorted(lines):
        terminalreporter.write_line(lines[key])
