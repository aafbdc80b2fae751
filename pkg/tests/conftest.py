import time

import pytest

import epp
from epp import _backend


@pytest.fixture(params=_backend.available())
def backend(request):
    """Run the test once per available kernel backend."""
    previous = _backend.current()
    _backend.set_backend(request.param)
    yield request.param
    _backend.set_backend(previous)


TABLE4_CSV = (
    "tournament,algorithm,hyperparam_set,split,score\n"
    "table4,AutoML_1,default,0,0.8\n"
    "table4,AutoML_1,default,1,0.8\n"
    "table4,AutoML_1,default,2,0.8\n"
    "table4,AutoML_1,default,3,0.8\n"
    "table4,AutoML_2,default,0,0.9\n"
    "table4,AutoML_2,default,1,0.78\n"
    "table4,AutoML_2,default,2,0.78\n"
    "table4,AutoML_2,default,3,0.78\n"
)


@pytest.fixture
def table4_csv():
    return TABLE4_CSV


@pytest.fixture
def two_players():
    return epp.PlayerId("AutoML_1", "default"), epp.PlayerId("AutoML_2", "default")


_ACCEPTANCE_KEY = pytest.StashKey[list]()


def pytest_configure(config):
    config.stash[_ACCEPTANCE_KEY] = []


def pytest_terminal_summary(terminalreporter, config):
    lines = config.stash.get(_ACCEPTANCE_KEY, [])
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in sorted(lines, key=lambda s: int(s.split("[")[1].split("]")[0])):
            terminalreporter.write_line(line)


class _Criterion:
    def __init__(self, config, number, title, max_seconds):
        self.lines = config.stash[_ACCEPTANCE_KEY]
        self.number, self.title, self.max_seconds = number, title, max_seconds

    def __enter__(self):
        self.start = time.perf_counter()
        return self

    def __exit__(self, exc_type, exc, tb):
        elapsed = time.perf_counter() - self.start
        label = f"[{self.number}] {self.title} ({elapsed:.2f}s)"
        if exc_type is None and self.max_seconds is not None and elapsed >= self.max_seconds:
            self.lines.append(f"FAIL {label}: runtime limit {self.max_seconds}s exceeded")
            raise AssertionError(f"criterion {self.number} took {elapsed:.2f}s >= {self.max_seconds}s")
        if exc_type is None:
            self.lines.append(f"PASS {label}")
        else:
            self.lines.append(f"FAIL {label}: {exc_type.__name__}: {exc}".splitlines()[0])
        return False


@pytest.fixture
def criterion(request):
    """``with criterion(n, title, max_seconds=None):`` records one pass/fail line."""

    def make(number, title, max_seconds=None):
        return _Criterion(request.config, number, title, max_seconds)

    return make
