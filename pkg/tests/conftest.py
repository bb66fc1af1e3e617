import pytest

from lwt_headroom.buffer_model import CpuProfile, NetDevice
from lwt_headroom.profiles import NICS


@pytest.fixture
def x86():
    return CpuProfile(64)


@pytest.fixture
def eth():
    return NetDevice("eth0", 14, 0)


@pytest.fixture
def i40e():
    return NICS["i40e-default"]


@pytest.fixture
def legacy_rx():
    return NICS["i40e-legacy-rx"]


ACCEPTANCE = []


@pytest.fixture
def criterion(request):
    """Record one acceptance line: call with the criterion label."""
    label = {}

    def name(text):
        label["text"] = text

    yield name
    rep = getattr(request.node, "rep_call", None)
    ok = rep is not None and rep.passed
    ACCEPTANCE.append(f"{'PASS' if ok else 'FAIL'}  {label.get('text', request.node.name)}")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    if rep.when == "call":
        item.rep_call = rep


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE:
            terminalreporter.write_line(line)
