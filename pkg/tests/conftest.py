import pytest

from elbowhaptic import SimConfig


@pytest.fixture
def cfg():
    return SimConfig()


@pytest.fixture
def quiet_cfg():
    """Defaults with every noise source and the stiction band switched off."""
    return SimConfig().replace(loop__noise_enabled=False, actuator__stiction_band=0.0)


# -- acceptance reporting ---------------------------------------------------

_criteria = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(n, title): numbered acceptance criterion")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    mark = item.get_closest_marker("criterion")
    if mark is None or rep.when != "call" and not rep.failed:
        return
    n, title = mark.args
    detail = dict(item.user_properties).get("detail", "")
    prev = _criteria.get(n)
    ok = rep.passed and (prev is None or prev[0])
    _criteria[n] = (ok, title, detail or (prev[2] if prev else ""))


def pytest_terminal_summary(terminalreporter):
    if not _criteria:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(_criteria):
        ok, title, detail = _criteria[n]
        line = f"{'PASS' if ok else 'FAIL'}  #{n} {title}"
        terminalreporter.write_line(line + (f"  [{detail}]" if detail else ""))
