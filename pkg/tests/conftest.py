import pytest

from frcompress.dynamics import compress_state
from frcompress.io import load_fixture, load_fixture_edit

CRITERIA = {
    "AC1": "row partitions of the printed system",
    "AC2": "compression of the reconciled system",
    "AC3": "superfluous relation and reducts",
    "AC4": "dynamic examples",
    "AC5": "differential suite against the scratch oracle",
    "AC6": "partition-computation counts",
    "AC7": "invariant property suites",
    "AC8": "known discrepancies",
}

_outcomes: dict[str, list[tuple[str, str]]] = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(id): acceptance criterion a test belongs to")


def pytest_runtest_logreport(report):
    ids = getattr(report, "criteria", ())
    if not ids:
        return
    if report.when == "call" or report.outcome != "passed":
        for cid in ids:
            _outcomes.setdefault(cid, []).append((report.nodeid.split("::")[-1], report.outcome))


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    report.criteria = tuple(m.args[0] for m in item.iter_markers("criterion"))


def pytest_terminal_summary(terminalreporter):
    if not _outcomes:
        return
    tr = terminalreporter
    tr.section("acceptance criteria")
    for cid, title in CRITERIA.items():
        results = _outcomes.get(cid)
        if not results:
            continue
        failed = [name for name, outcome in results if outcome != "passed"]
        verdict = "FAIL" if failed else "PASS"
        tail = f" (failing: {', '.join(failed)})" if failed else ""
        tr.write_line(f"{cid} {verdict}  {title}  [{len(results) - len(failed)}/{len(results)}]{tail}")


@pytest.fixture(scope="session")
def canon():
    return load_fixture("canon")


@pytest.fixture(scope="session")
def literal():
    return load_fixture("literal")


@pytest.fixture(scope="session")
def canon_state(canon):
    return compress_state(canon)


@pytest.fixture(scope="session")
def edits():
    return {
        name: load_fixture_edit(name)
        for name in ("add_r4", "remove_r1", "add_x9_x10", "remove_x1_x7_x8")
    }
