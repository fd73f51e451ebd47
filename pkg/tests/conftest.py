import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from fuzzywave import build_problem, builtin_g0, simulate

settings.register_profile("repo", deadline=None, max_examples=40, suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("repo")


@pytest.fixture(scope="session")
def cos20():
    """n=20 cos benchmark at the default (largest supported) resolution."""
    return build_problem(simulate(20, 0.1, 1), builtin_g0("cos"))


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def pytest_terminal_summary(terminalreporter):
    import sys

    mod = sys.modules.get("test_acceptance")
    lines = getattr(mod, "REPORT", None)
    if not lines:
        return
    terminalreporter.section("acceptance criteria")
    for key in sorted(lines):
        terminalreporter.write_line(lines[key])
