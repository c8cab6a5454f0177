import json
from pathlib import Path

import pytest

from extremal_weight import build_weight, derive_params
from extremal_weight.norms.hilbest import hilbest_report
from extremal_weight.norms.quadrature import hilbert_l2sigma
from extremal_weight.norms.testing import testing_constant

FIXTURES = Path(__file__).parent / "fixtures"


def load_fixture(name: str) -> dict:
    return json.loads((FIXTURES / name).read_text())


@pytest.fixture(scope="session")
def k2_fix():
    return load_fixture("k2.json")


@pytest.fixture(scope="session")
def numeric_fix():
    return load_fixture("numeric.json")


@pytest.fixture(scope="session")
def cw2():
    return build_weight(derive_params(2))


@pytest.fixture(scope="session")
def cw3():
    return build_weight(derive_params(3))


@pytest.fixture(scope="session")
def testing2(cw2):
    return testing_constant(cw2)


@pytest.fixture(scope="session")
def testing3(cw3):
    return testing_constant(cw3)


@pytest.fixture(scope="session")
def hilbest2(cw2):
    return hilbest_report(cw2)


@pytest.fixture(scope="session")
def hilbest3(cw3):
    return hilbest_report(cw3)


@pytest.fixture(scope="session")
def quad2(cw2):
    return hilbert_l2sigma(cw2)


@pytest.fixture(scope="session")
def quad3(cw3):
    return hilbert_l2sigma(cw3)


ACCEPTANCE_KEY = pytest.StashKey[dict]()


def pytest_configure(config):
    config.stash[ACCEPTANCE_KEY] = {}


@pytest.hookimpl(wrapper=True)
def pytest_runtest_makereport(item, call):
    rep = yield
    mark = item.get_closest_marker("acceptance")
    if mark is not None and (rep.when == "call" or rep.outcome != "passed"):
        number, title = mark.args
        results = item.config.stash[ACCEPTANCE_KEY]
        prev = results.get(number, (title, True))[1]
        results[number] = (title, prev and rep.outcome == "passed")
    return rep


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    results = config.stash.get(ACCEPTANCE_KEY, {})
    if not results:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(results):
        title, ok = results[number]
        terminalreporter.write_line(f"criterion {number:2d}: {'PASS' if ok else 'FAIL'}  {title}")
