import functools

import numpy as np
import pytest

from eigenorient.orient import givens_rotation

_ACCEPTANCE = []


def pytest_configure(config):
    config.addinivalue_line("markers", "acceptance(id, text): exit criterion of the package")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    mark = item.get_closest_marker("acceptance")
    if mark is None or rep.when != "call":
        return
    detail = dict(item.user_properties).get("detail", "")
    _ACCEPTANCE.append((mark.args[0], mark.args[1], rep.passed, detail))


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for cid, text, passed, detail in sorted(_ACCEPTANCE, key=lambda r: int(r[0])):
        status = "PASS" if passed else "FAIL"
        terminalreporter.write_line(f"[{status}] criterion {cid}: {text}" + (f" | {detail}" if detail else ""))


def dense_generator(theta, upto=None):
    """Rotation from angles via explicit dense Givens products (test oracle)."""
    theta = np.asarray(theta)
    n = theta.shape[0]
    rows = range(n) if upto is None else [upto - 1]
    mats = [givens_rotation(n, i, j, theta[i, j]) for i in rows for j in range(i + 1, n)]
    return functools.reduce(np.matmul, mats, np.eye(n))


def haar(n, rng):
    Q, R = np.linalg.qr(rng.standard_normal((n, n)))
    return Q * np.where(np.diag(R) < 0, -1.0, 1.0)


@pytest.fixture
def rng():
    return np.random.default_rng(20240601)
