import pytest

ACCEPTANCE = {}


@pytest.fixture
def criterion(request):
    """Record PASS/FAIL for an acceptance criterion; the outcome is the test outcome."""
    number = request.node.get_closest_marker("criterion").args[0]
    ACCEPTANCE[number] = "FAIL"
    yield number
    # reached only after the test body; failures leave FAIL in place
    if request.node.rep_call_passed:
        ACCEPTANCE[number] = "PASS"


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    if rep.when == "call":
        item.rep_call_passed = rep.passed


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(n): acceptance criterion number")
    config.addinivalue_line("markers", "acceptance: acceptance suite")


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(ACCEPTANCE):
        terminalreporter.write_line(f"criterion {number:2d}: {ACCEPTANCE[number]}")
