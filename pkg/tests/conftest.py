import numpy as np
import pytest

from dktwist import parse_spec

PAIR_SPECS = ["A1", "A2", "A3", "B1", "B2", "C2", "C3", "D2", "D3"]


@pytest.fixture(params=PAIR_SPECS)
def spec(request):
    return parse_spec(request.param)


def signed_match(a, b):
    """max |a - sign * b| with the sign that makes a . b >= 0."""
    sign = 1.0 if float(np.dot(a, b)) >= 0 else -1.0
    return float(np.max(np.abs(a - sign * b)))


ACCEPTANCE_LINES: list[str] = []


def record(criterion, ok, detail):
    """Print and keep a one-line verdict for the acceptance summary."""
    line = f"[{'PASS' if ok else 'FAIL'}] criterion {criterion}: {detail}"
    print(line)
    ACCEPTANCE_LINES.append(line)
    return ok


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[2].rstrip(":"))):
            terminalreporter.write_line(line)
