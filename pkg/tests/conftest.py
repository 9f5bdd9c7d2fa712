import numpy as np
import pytest

from matchhelper.instances import example1


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


@pytest.fixture(params=[0.1, 0.25, 0.3, 0.45])
def ex1(request):
    return example1(request.param)


def random_joint(rng, n, m=None, positive=True):
    m = n if m is None else m
    a = rng.random((n, m)) + (0.01 if positive else 0.0)
    return a / a.sum()


def h2(d):
    return 0.0 if d in (0.0, 1.0) else -(d * np.log2(d) + (1 - d) * np.log2(1 - d))


def pytest_terminal_summary(terminalreporter):
    import sys

    mod = sys.modules.get("tests.test_acceptance")
    if mod is None or not mod.RESULTS:
        return
    test_acceptance = mod
    terminalreporter.section("acceptance criteria")
    for key in sorted(test_acceptance.RESULTS):
        ok, detail = test_acceptance.RESULTS[key]
        terminalreporter.write_line(f"criterion {key}: {'PASS' if ok else 'FAIL'}  {detail}")
