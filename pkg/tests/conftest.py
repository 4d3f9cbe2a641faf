import numpy as np
import pytest

from sl2prism.core_model import HPoint, HyperboloidParam, from_hyperboloid_params

ACCEPTANCE_LINES: list[str] = []


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


def random_point(rng, r_max=2.0, phi_max=1.4) -> HPoint:
    return from_hyperboloid_params(
        HyperboloidParam(rng.uniform(0, r_max), rng.uniform(-np.pi, np.pi), rng.uniform(-phi_max, phi_max))
    )


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
