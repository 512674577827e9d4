import numpy as np
import pytest

from onehot_nb.models import NBParams
from onehot_nb.simplex import ProbVector


def random_params(rng, n_classes, n_values, alpha=1.0):
    """NBParams with Dirichlet(alpha) prior and rows; ``n_values`` is an int or one int per feature."""
    ks = [n_values] if np.isscalar(n_values) else list(n_values)
    prior = rng.dirichlet(np.full(n_classes, alpha))
    tables = tuple(rng.dirichlet(np.full(k, alpha), size=n_classes) for k in ks)
    return NBParams(ProbVector(prior), tables)


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


ACCEPTANCE_LINES: dict[int, str] = {}


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for n in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(ACCEPTANCE_LINES[n])
