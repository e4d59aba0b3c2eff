import numpy as np
import pytest
from hypothesis import settings

settings.register_profile("default", max_examples=60, deadline=None)
settings.load_profile("default")

ACCEPTANCE_LINES: list[str] = []


@pytest.fixture
def report():
    """Record a one-line PASS/FAIL verdict for an acceptance criterion."""
    def _record(criterion: str, ok: bool, detail: str = ""):
        ACCEPTANCE_LINES.append(f"{'PASS' if ok else 'FAIL'}  {criterion}  {detail}".rstrip())
        return ok
    return _record


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
