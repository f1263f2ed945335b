import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

from metric_cops.constructions import attach_hat, counterexample_one, expand_subspace, \
    required_height, subdivide  # noqa: E402
from metric_cops.generators import from_spec  # noqa: E402
from metric_cops.metric import MetricGraph  # noqa: E402


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture(scope="session")
def c4():
    return from_spec("cycle:4")


@pytest.fixture(scope="session")
def path12():
    """u - v - w with lengths 1 and 2."""
    return MetricGraph(["u", "v", "w"], [("u", "v", 1.0), ("v", "w", 2.0)])


@pytest.fixture(scope="session")
def petersen():
    return from_spec("petersen")


@pytest.fixture(scope="session")
def wedge():
    """Truncated wedge of path:5, cycle:8 and the Petersen graph."""
    return counterexample_one([from_spec("path:5"), from_spec("cycle:8"), from_spec("petersen")], 3)


@pytest.fixture(scope="session")
def petersen_hat():
    """Petersen 1-complex (split 10x) with a hat over its outer 5-cycle,
    h = required height for tau_max = 1, 100 levels."""
    X, sk = subdivide(from_spec("petersen"), 10)
    S = expand_subspace(sk, [0, 1, 2, 3, 4])
    H = attach_hat(X, S, required_height(X, 1.0), 100, tau_max=1.0)
    H.skeleton = sk
    return H


def pytest_terminal_summary(terminalreporter):
    from acceptance_log import LINES
    if LINES:
        terminalreporter.section("acceptance criteria")
        for line in LINES:
            terminalreporter.write_line(line)
