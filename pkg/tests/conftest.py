import pytest

_LINES_KEY = pytest.StashKey[list]()


def pytest_configure(config):
    config.stash[_LINES_KEY] = []


@pytest.fixture
def report(request):
    """Record one acceptance line; printed in the terminal summary."""
    lines = request.config.stash[_LINES_KEY]

    def _report(label: str, passed: bool, detail: str):
        lines.append(f"{'PASS' if passed else 'FAIL'}  {label}: {detail}")
        return passed

    return _report


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    lines = config.stash.get(_LINES_KEY, [])
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in lines:
            terminalreporter.write_line(line)
