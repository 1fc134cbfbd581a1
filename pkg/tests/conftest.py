import numpy as np
import pytest
from hypothesis import settings

from wvkit.hilbert import State, normalize, pauli
from wvkit.weakvalue import PpsEnsemble

settings.register_profile("default", max_examples=60, deadline=None)
settings.load_profile("default")

S2 = 1 / np.sqrt(2)


@pytest.fixture
def sx():
    return pauli("x")


@pytest.fixture
def sy():
    return pauli("y")


@pytest.fixture
def sz():
    return pauli("z")


@pytest.fixture
def plus():
    return State([S2, S2])


@pytest.fixture
def worked(plus):
    """psi = |+>, phi = (2, -1)/sqrt(5): sigma_z weak value 3."""
    return PpsEnsemble(plus, normalize([2, -1]))


# one PASS/FAIL line per acceptance criterion in the terminal summary
_CRITERIA = pytest.StashKey[dict]()


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(number, title): acceptance criterion")
    config.stash[_CRITERIA] = {}


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    marker = item.get_closest_marker("criterion")
    if marker is None or report.when != "call":
        return
    number, title = marker.args
    results = item.config.stash[_CRITERIA].setdefault((number, title), [])
    results.append((item.name, report.passed))


def pytest_terminal_summary(terminalreporter, config):
    results = config.stash[_CRITERIA]
    if not results:
        return
    terminalreporter.section("acceptance criteria")
    for (number, title), runs in sorted(results.items()):
        status = "PASS" if all(ok for _, ok in runs) else "FAIL"
        failed = [name for name, ok in runs if not ok]
        suffix = f"  (failed: {', '.join(failed)})" if failed else ""
        terminalreporter.write_line(f"criterion {number}: {status}  {title}{suffix}")
