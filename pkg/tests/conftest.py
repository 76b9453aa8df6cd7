import numpy as np
import pytest

from ebmono import MixtureOfUniforms

_ACCEPTANCE = []


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


@pytest.fixture
def record():
    """Record one acceptance line: record(criterion, passed, detail)."""

    def _record(criterion, passed, detail=""):
        status = "PASS" if passed else "FAIL"
        line = f"[{status}] {criterion}: {detail}"
        _ACCEPTANCE.append(line)
        print(line)
        return passed

    return _record


def pytest_terminal_summary(terminalreporter):
    if _ACCEPTANCE:
        terminalreporter.section("acceptance criteria")
        for line in _ACCEPTANCE:
            terminalreporter.write_line(line)


def random_mixture(rng, max_components=8, scale=5.0):
    S = int(rng.integers(1, max_components + 1))
    w = rng.dirichlet(np.ones(S))
    mu = rng.uniform(0.05, scale, size=S)
    return MixtureOfUniforms(w, mu)
