import pytest

import lifetime_qfi as L

_ACCEPTANCE_LINES = []


@pytest.fixture(scope="session")
def numerics():
    return L.NumericsConfig()


@pytest.fixture
def record_criterion():
    """Collect one summary line per acceptance criterion."""
    def record(name, ok, detail):
        line = f"{'PASS' if ok else 'FAIL'}  {name}: {detail}"
        print(line)
        _ACCEPTANCE_LINES.append(line)
        return ok
    return record


def pytest_terminal_summary(terminalreporter):
    if _ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in _ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
