import pytest

_RESULTS = pytest.StashKey[list]()


@pytest.fixture
def acceptance(request):
    """Record one acceptance line; the lines are repeated in the terminal summary."""
    store = request.config.stash.setdefault(_RESULTS, [])

    def record(number, title, ok, detail, elapsed):
        line = f"criterion {number:>2} {'PASS' if ok else 'FAIL'}  {title} ({elapsed:.1f} s): {detail}"
        store.append((number, line))
        print(line)

    return record


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    store = config.stash.get(_RESULTS, [])
    if store:
        terminalreporter.section("acceptance criteria")
        for _, line in sorted(store):
            terminalreporter.write_line(line)
