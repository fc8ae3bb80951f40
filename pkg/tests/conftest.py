import contextlib

import pytest
from hypothesis import HealthCheck, settings

settings.register_profile(
    "forge", deadline=None, derandomize=True, max_examples=60,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("forge")

_RESULTS: dict = {}


def _order(key: str):
    digits = "".join(ch for ch in key if ch.isdigit())
    return int(digits), key


@pytest.fixture
def criterion():
    """Context manager that records a pass/fail line for one acceptance criterion."""

    @contextlib.contextmanager
    def check(key: str, title: str):
        ok = False
        try:
            yield
            ok = True
        finally:
            _RESULTS[key] = (ok, title)

    return check


def pytest_terminal_summary(terminalreporter):
    if not _RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for key in sorted(_RESULTS, key=_order):
        ok, title = _RESULTS[key]
        terminalreporter.write_line(f"criterion {key:<3} {'PASS' if ok else 'FAIL'}  {title}")
