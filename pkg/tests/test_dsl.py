import json
from importlib import resources
from pathlib import Path

import jsonschema
import pytest

from chowkit.cli import main, shipped_defs
from chowkit.defs import DefsError, format_defs, parse_defs, presentation_to_defs
from chowkit.runner import DISCREPANCY, FAIL, PASS, run_checks, run_text

GOLDEN = Path(__file__).parent / "golden" / "report.json"

MINIMAL = """\
ring P4 = projective_space(4, H)   # the only ring
check T1 "top power"
  provenance TRIVIAL
  value integrate(H^4, P4)
  expect 1
end
"""


def schema():
    text = resources.files("chowkit").joinpath("data/report.schema.json").read_text()
    return json.loads(text)


@pytest.fixture(scope="module")
def suite():
    return parse_defs(shipped_defs())


def test_minimal_file():
    defs = parse_defs(MINIMAL)
    assert len(defs.rings) == 1 and len(defs.checks) == 1
    report = run_checks(defs)
    assert report.result("T1").status == PASS


def error_of(text):
    with pytest.raises(DefsError) as info:
        parse_defs(text)
    return info.value


def test_unbalanced_parenthesis_position():
    err = error_of("ring P4 = projective_space(4, H)\nlet x on P4 = (H + 1\n")
    assert (err.line, err.column) == (2, 21)
    assert "line 2, column 21" in str(err)


def test_unknown_identifier_position():
    err = error_of("ring P4 = projective_space(4, H)\nlet x on P4 = H + Q\n")
    assert (err.line, err.column) == (2, 19)
    assert "unknown identifier 'Q'" in str(err)


def test_forward_reference_rejected():
    err = error_of("ring P4 = projective_space(4, H)\nlet x on P4 = y\nlet y on P4 = H\n")
    assert err.line == 2 and "'y'" in str(err)
    err = error_of("bundle M on P4 = O\nring P4 = projective_space(4, H)\n")
    assert "unknown ring 'P4'" in str(err)


def test_arity_mismatch():
    err = error_of("ring P4 = projective_space(4, H)\nbundle M on P4 = O\nlet x on P4 = c(M)\n")
    assert err.line == 3 and "c takes 2 arguments, got 1" in str(err)


def test_other_errors():
    assert "unknown function" in str(error_of("let x = foo(1)\n"))
    assert "missing its 'end'" in str(error_of("ring S = surface(a)\n  a*a = 1\n"))
    assert "already declared" in str(error_of("let x = 1\nlet x = 2\n"))
    assert "duplicate check id" in str(error_of(
        'check A "a"\n  value 1\n  expect 1\nend\ncheck A "b"\n  value 1\n  expect 1\nend\n'))
    assert "needs 'expect'" in str(error_of('check A "a"\n  value 1\nend\n'))
    assert "needs 'printed'" in str(error_of(
        'check A "a"\n  mode DOCUMENTED_DISCREPANCY\n  value 1\n  expect 1\nend\n'))
    assert "provenance must be" in str(error_of('check A "a"\n  provenance NOPE\nend\n'))
    assert "needs a declared ring" in str(error_of("let x = integrate(1, Q)\n"))
    assert "unknown attribute" in str(error_of("let x = invariants(9, 3, 0).foo\n"))


def test_shipped_suite_resolves(suite):
    assert len(suite.checks) >= 25
    assert len({c.id for c in suite.checks}) == len(suite.checks)


def test_round_trip(suite):
    printed = format_defs(suite)
    again = parse_defs(printed)
    assert again == suite
    assert format_defs(again) == printed


def test_presentation_serialisation(spaces):
    text = presentation_to_defs("PZ2", spaces["PZ"])
    text += ('check T "relation"\n  in PZ2\n  value relation(PZ2, P^4)\n'
             '  expect -3*P^3*H - 5*P^2*H^2 - 5*P*H^3\nend\n'
             'check U "integral"\n  value integrate(P^3*H^4*E, PZ2)\n  expect 1\nend\n')
    report = run_text(text)
    assert [c.status for c in report.checks] == [PASS, PASS]


def test_filter_single_check(suite):
    report = run_checks(suite, ids={"C04"})
    assert [c.id for c in report.checks] == ["C04"]
    assert report.checks[0].computed == "40*H^3"
    assert report.checks[0].status == PASS


def test_empty_filter(suite):
    report = run_checks(suite, ids=set())
    assert report.checks == []
    assert report.summary == {"pass": 0, "fail": 0, "discrepancy": 0}


def test_unknown_filter_id(suite):
    with pytest.raises(KeyError):
        run_checks(suite, ids=["nope"])


def test_full_suite_has_no_failures(suite):
    report = run_checks(suite)
    assert report.summary["fail"] == 0, [c.id for c in report.checks if c.status == FAIL]
    assert {c.status for c in report.checks} <= {PASS, DISCREPANCY}


def test_report_ordering_is_natural():
    text = "".join(f'check C{n} "n"\n  value {n}\n  expect {n}\nend\n' for n in (10, 2, 1))
    assert [c.id for c in run_text(text).checks] == ["C1", "C2", "C10"]


def test_json_validates_and_matches_text(suite):
    report = run_checks(suite)
    data = report.to_json()
    jsonschema.validate(data, schema())
    text = report.to_text()
    for c in data["checks"]:
        line = next(l for l in text.splitlines() if l.split()[:2] == [c["status"], c["id"]])
        assert line


def test_concurrent_runs_are_byte_identical(suite):
    serial = run_checks(suite, timings=False).dumps()
    for jobs in (2, 4, 8):
        assert run_checks(suite, jobs=jobs, timings=False).dumps() == serial


def test_golden_report(suite):
    report = run_checks(suite, timings=False)
    assert report.dumps() == GOLDEN.read_text(encoding="utf-8")


def test_evaluation_error_marks_only_that_check():
    text = MINIMAL + ('check T2 "bad"\n  in P4\n  value porteous_sym(O, 3, 0)\n  expect 0\nend\n'
                      'check T3 "fine"\n  value 2 + 2\n  expect 4\nend\n')
    report = run_text(text)
    bad = report.result("T2")
    assert bad.status == FAIL and "corank" in bad.error
    assert report.result("T1").status == PASS and report.result("T3").status == PASS


def test_broken_declaration_fails_dependents():
    text = ("ring P2 = projective_space(2, H)\nlet bad on P2 = H^2 / 0\n"
            'check A "uses bad"\n  value bad\n  expect 0\nend\n'
            'check B "independent"\n  value 1\n  expect 1\nend\n')
    report = run_text(text)
    assert report.result("A").status == FAIL and "division by zero" in report.result("A").error
    assert report.result("B").status == PASS


def test_discrepancy_semantics():
    base = 'check D "d"\n  mode DOCUMENTED_DISCREPANCY\n  value {v}\n{exp}  printed 5\n  note "n"\nend\n'
    assert run_text(base.format(v=4, exp="")).checks[0].status == DISCREPANCY
    assert run_text(base.format(v=4, exp="  expect 4\n")).checks[0].status == DISCREPANCY
    assert run_text(base.format(v=4, exp="  expect 3\n")).checks[0].status == FAIL
    same = run_text(base.format(v=5, exp=""))
    assert same.checks[0].status == FAIL and "agrees" in same.checks[0].error


def test_polynomial_comparison_uses_normal_forms():
    text = ("ring P2 = projective_space(2, H)\n"
            'check A "nf"\n  in P2\n  value H^3 + H\n  expect H\nend\n')
    assert run_text(text).checks[0].status == PASS


def test_cli_exit_codes(tmp_path, capsys):
    assert main(["--check", "C04", "--no-timings"]) == 0
    out = capsys.readouterr().out
    assert out.startswith("PASS") and "40*H^3" in out
    bad = tmp_path / "bad.defs"
    bad.write_text('check A "wrong"\n  value 1\n  expect 2\nend\n')
    assert main(["--defs", str(bad)]) == 1
    broken = tmp_path / "broken.defs"
    broken.write_text("let x = (1\n")
    assert main(["--defs", str(broken)]) == 2
    assert "line 1" in capsys.readouterr().err
    assert main(["--check", "missing"]) == 2


def test_cli_json_and_confluence(capsys):
    assert main(["--format", "json", "--no-timings", "--confluence-degree", "8", "--jobs", "3"]) == 0
    data = json.loads(capsys.readouterr().out)
    jsonschema.validate(data, schema())
    assert all(r["confluent"] for r in data["confluence"])
    assert {r["ring"] for r in data["confluence"]} >= {"P4", "Z", "PZ", "B"}
