import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from rugosity.profile import PeriodicProfile, cos_bump, flat

settings.register_profile(
    "default", max_examples=60, deadline=None,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("default")


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


@pytest.fixture
def bump():
    return cos_bump(0.5)


@pytest.fixture
def zero():
    return flat()


@pytest.fixture
def skew():
    """A non-even profile with a few modes, nonnegative."""
    return PeriodicProfile(1.0, (0.3, 0.1), (0.2, -0.15))


def pytest_terminal_summary(terminalreporter):
    import sys

    module = sys.modules.get("test_acceptance")
    lines = getattr(module, "RESULT_LINES", None)
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in lines:
            terminalreporter.write_line(line)
