import numpy as np
import pytest

from ncmorita.algebra import StarAlgebra, matrix_unit
from ncmorita.action import AlgebraAction
from ncmorita.groups import cyclic_group, klein_four, symmetric_group, trivial_group
from ncmorita.hilbert import CoveringCandidate
from ncmorita.models import SetAction, covering_from_set_action, inner_matrix_model

E11, E12, E21, E22 = (matrix_unit(2, i, j) for i, j in ((0, 0), (0, 1), (1, 0), (1, 1)))
I2 = np.eye(2)

_CRITERIA: dict[int, dict] = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(n, text): acceptance criterion number")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    mark = item.get_closest_marker("criterion")
    if mark is None or rep.when != "call":
        return
    n, text = mark.args
    detail = "; ".join(f"{k}={v}" for k, v in item.user_properties)
    _CRITERIA[n] = {"text": text, "passed": rep.passed, "detail": detail}


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(_CRITERIA):
        c = _CRITERIA[n]
        status = "PASS" if c["passed"] else "FAIL"
        terminalreporter.write_line(f"criterion {n}: {status}  {c['text']}  [{c['detail']}]")


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


@pytest.fixture(scope="session")
def swap():
    return covering_from_set_action(SetAction.of([[0, 1], [1, 0]]), cyclic_group(2))


@pytest.fixture(scope="session")
def branched():
    return covering_from_set_action(SetAction.of([[0, 1, 2], [1, 0, 2]]), cyclic_group(2))


@pytest.fixture(scope="session")
def trivial():
    grp = trivial_group()
    alg = StarAlgebra.diagonal(2)
    act = AlgebraAction(grp, alg, np.eye(2)[None])
    return CoveringCandidate(act, alg, {"kind": "trivial", "free": True})


@pytest.fixture(scope="session")
def inner_c2():
    return inner_matrix_model(2, cyclic_group(2), [I2, np.diag([1.0, -1.0])])


@pytest.fixture(scope="session")
def regular_s3():
    g = symmetric_group(3)
    return covering_from_set_action(SetAction.of(g.coset_action({0})), g)


@pytest.fixture(scope="session")
def pauli_v4():
    x = np.array([[0.0, 1.0], [1.0, 0.0]])
    z = np.diag([1.0, -1.0])
    return inner_matrix_model(2, klein_four(), [I2, x, z, x @ z])
