import pytest

from chowkit.builders import projective_bundle, projective_space
from chowkit.chern import dual, line, trivial


@pytest.fixture(scope="session")
def spaces():
    """P4, M = 8O - 5O(1) + O(2), Z = P(O + O(1)) and PZ = P(M*)."""
    P4 = projective_space(4, "H", name="P4")
    O = trivial(P4)
    M = 8 * O - 5 * line(P4.gen("H"), P4) + line(2 * P4.gen("H"), P4)
    Z = projective_bundle(P4, O + line(P4.gen("H"), P4), "E", name="Z")
    PZ = projective_bundle(Z, dual(M.pullback(Z)), "P", name="PZ")
    return {"P4": P4, "M": M, "Z": Z, "PZ": PZ}


_CRITERIA: dict = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(id): acceptance criterion covered by a test")


def pytest_runtest_logreport(report):
    marks = getattr(report, "criteria", None)
    if not marks:
        return
    if report.when == "call" or report.outcome != "passed":
        for cid in marks:
            entry = _CRITERIA.setdefault(cid, {"passed": 0, "failed": 0})
            entry["passed" if report.outcome == "passed" else "failed"] += 1


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    rep.criteria = [m.args[0] for m in item.iter_markers(name="criterion")]


def _criterion_key(cid):
    head = 0 if cid.startswith("C") else 1
    digits = "".join(ch for ch in cid if ch.isdigit())
    return (head, int(digits) if digits else 99, cid)


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for cid in sorted(_CRITERIA, key=_criterion_key):
        e = _CRITERIA[cid]
        status = "PASS" if e["failed"] == 0 else "FAIL"
        terminalreporter.write_line(f"{cid:<24} {status}  ({e['passed']} passed, {e['failed']} failed)")
