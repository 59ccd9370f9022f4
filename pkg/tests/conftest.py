import numpy as np
import pytest

# criterion number -> list of (test id, passed, detail)
_RESULTS: dict = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "acceptance(n): test belongs to acceptance criterion n")


@pytest.fixture
def detail(request):
    """Attach a short measured-value note to the acceptance summary line."""

    def add(text):
        request.node.user_properties.append(("detail", str(text)))

    return add


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    marker = item.get_closest_marker("acceptance")
    if marker is None:
        return
    if rep.when == "call" or (rep.when == "setup" and not rep.passed):
        notes = [v for k, v in item.user_properties if k == "detail"]
        _RESULTS.setdefault(marker.args[0], []).append((item.name, rep.passed, "; ".join(notes)))


def pytest_terminal_summary(terminalreporter):
    if not _RESULTS:
        return
    tr = terminalreporter
    tr.section("acceptance criteria")
    for n in sorted(_RESULTS):
        runs = _RESULTS[n]
        ok = all(p for _, p, _ in runs)
        tr.write_line(f"criterion {n}: {'PASS' if ok else 'FAIL'} ({len(runs)} checks)")
        for name, passed, note in runs:
            tr.write_line(f"    {'ok  ' if passed else 'FAIL'} {name}{': ' + note if note else ''}")


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)
