import pytest

from ricianlp import _backend
from ricianlp.kernels import get_backend

BACKENDS = ["numpy"] + (["numba"] if _backend.HAVE_NUMBA else [])


@pytest.fixture(params=BACKENDS)
def backend(request):
    """Each kernel implementation in turn."""
    return get_backend(request.param)


# one line per acceptance criterion, shown after the run
ACCEPTANCE_LINES = []


@pytest.fixture
def criterion():
    """Record ``(label, passed, detail)`` for the acceptance summary and return ``passed``."""

    def record(label, passed, detail):
        ACCEPTANCE_LINES.append(f"{'PASS' if passed else 'FAIL'}  {label}: {detail}")
        return passed

    return record


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
