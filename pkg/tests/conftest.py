import time

import pytest

_LINES: list[str] = []


@pytest.fixture
def criterion(request):
    """Time a criterion body and record a one-line verdict for the terminal summary."""

    class _Clock:
        def __init__(self):
            self.start = time.perf_counter()

        def elapsed(self) -> float:
            return time.perf_counter() - self.start

    clock = _Clock()
    yield clock
    rep = getattr(request.node, "rep_call", None)
    ok = rep is not None and rep.passed
    line = f"{request.node.name}: {'PASS' if ok else 'FAIL'} ({clock.elapsed():.2f} s)"
    _LINES.append(line)
    print(line)


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    if rep.when == "call":
        item.rep_call = rep


def pytest_terminal_summary(terminalreporter):
    if _LINES:
        terminalreporter.section("acceptance criteria")
        for line in _LINES:
            terminalreporter.write_line(line)
