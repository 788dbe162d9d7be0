import json
import subprocess
import sys
from fractions import Fraction
from importlib import resources

import pytest
from hypothesis import given, strategies as st

from qbundles import __version__
from qbundles.checks import CATALOG, jsonable
from qbundles.cli import main, run_scenario
from qbundles.linalg import scalar
from qbundles.scenario import Scenario, ScenarioError, bundled_scenarios

MANIFEST = json.loads((resources.files("qbundles") / "scenarios" / "manifest.json").read_text())


def run_cli(capsys, *args):
    code = main(list(args))
    return code, capsys.readouterr().out


def write(tmp_path, data, name="s.json"):
    p = tmp_path / name
    p.write_text(json.dumps(data) if not isinstance(data, str) else data)
    return str(p)


def step_details(report, name):
    return next(s for s in report["steps"] if s["step"] == name)["details"]


def test_version(capsys):
    assert run_cli(capsys, "version") == (0, f"qbundles {__version__}\n")


def test_catalog(capsys):
    assert len(CATALOG) >= 12
    code, out = run_cli(capsys, "list-checks", "--format", "json")
    entries = json.loads(out)
    assert code == 0 and [e["step"] for e in entries] == list(CATALOG)
    assert all(e["location"] and e["verifies"] for e in entries)
    for name in ("covering-completion", "qvb-axioms", "associated-bundle", "horizontal-forms",
                 "connection-compatibility", "curvature"):
        assert name in CATALOG


def test_manifest_lists_every_bundled_scenario():
    assert sorted(MANIFEST) == bundled_scenarios()


@pytest.mark.parametrize("name", sorted(MANIFEST))
def test_bundled_scenarios_exit_codes(name):
    report = run_scenario(name)
    assert report["exit_code"] == MANIFEST[name], report


def test_b3_reports_completion_dim():
    report = run_scenario("b3-complete-covering")
    assert report["status"] == "pass"
    assert step_details(report, "covering-completion")["dim_completion"] == 3


def test_mobius_associated_reports():
    report = run_scenario("c4-mobius-associated")
    d = step_details(report, "associated-bundle")
    assert (d["dim_cotensor"], d["dim_glued"], d["epsilon_bijective"]) == (4, 4, True)


def test_incompatible_gauges_print_residual(capsys):
    code, out = run_cli(capsys, "run", "c4-incompatible-gauges")
    assert code == 1
    assert "[fail] connection-compatibility" in out
    assert "residual on overlap 0-1:" in out
    assert "[-2,0,0,0,0,0]" in out
    assert "[skipped] global-connection" in out


def test_keep_going_runs_remaining_steps():
    report = run_scenario("c4-incompatible-gauges", keep_going=True)
    last = report["steps"][-1]
    assert last["step"] == "global-connection" and last["status"] == "fail"
    assert last["pair"] == [0, 1] and len(last["residual"]) == 6
    assert report["skipped"] == []


def test_json_report_is_deterministic(capsys):
    names = bundled_scenarios()
    first = run_cli(capsys, "run", "--report", "json", *names)
    second = run_cli(capsys, "run", "--report", "json", "--jobs", "2", *names)
    assert first == second
    assert json.loads(first[1])["exit_code"] == 1


def test_module_entry_point(tmp_path):
    out = subprocess.run([sys.executable, "-m", "qbundles", "run", "--report", "json", "b3-complete-covering"],
                         capture_output=True, text=True, check=False)
    assert out.returncode == 0
    assert json.loads(out.stdout)["status"] == "pass"


B3 = {"name": "t", "base": {"function_algebra": 3}, "covering": [[[0, 0, 1]], [[1, 0, 0]]]}


@pytest.mark.parametrize("data, fragment", [
    ('{"name": ', "not valid JSON"),
    ({"base": {"function_algebra": 3}, "pipeline": ["algebra-axioms"]}, "'name' is a required property"),
    ({**B3, "pipeline": ["no-such-step"]}, "unknown pipeline steps"),
    ({**B3, "pipeline": ["qvb-axioms"]}, "needs transitions or tau with comodule"),
    ({**B3, "pipeline": ["covering-ideals"], "covering": [[[0, 1]]]}, "covering vectors must have length 3"),
    ({**B3, "pipeline": ["covering-ideals"], "covering": [[[1, 1, 0]], [[0, 0, 1]]]}, "not a two-sided ideal"),
    ({**B3, "pipeline": ["transition-maps"], "transitions": {"fibre_dim": 1, "functions": {"0-1": [[["1/0"]]]}}},
     "zero denominator"),
    ({**B3, "pipeline": ["algebra-axioms"], "extra": 1}, "Additional properties"),
    ({**B3, "pipeline": ["algebra-axioms"], "hopf": {"cyclic_group": 2, "sweedler": True}}, "invalid scenario"),
])
def test_invalid_scenarios_exit_2(tmp_path, capsys, data, fragment):
    code, out = run_cli(capsys, "run", write(tmp_path, data))
    assert code == 2
    assert fragment in out


def test_missing_file_exit_2(capsys):
    code, out = run_cli(capsys, "run", "/nonexistent/x.json")
    assert code == 2 and "cannot read file" in out


def test_rational_strings_in_transitions(tmp_path):
    data = {**B3, "transitions": {"fibre_dim": 1, "functions": {"0-1": [[["-3/2"]]]}},
            "pipeline": ["transition-maps", "qvb-axioms", "gluing-round-trip"]}
    report = run_scenario(write(tmp_path, data))
    assert report["exit_code"] == 0
    assert step_details(report, "transition-maps")["matrices"]["0-1"] == [["-3/2"]]


def test_structure_constants_base(tmp_path):
    # dual numbers Q[e]/e^2 entered by structure constants, covered trivially
    table = [[[1, 0], [0, 1]], [[0, 1], [0, 0]]]
    data = {"name": "dual", "base": {"structure": table, "unit": [1, 0]}, "covering": [[]],
            "pipeline": ["algebra-axioms", {"step": "covering-completion", "expect": {"complete": True}}]}
    assert run_scenario(write(tmp_path, data))["exit_code"] == 0
    bad = {**data, "base": {"structure": [[[1, 0], [0, 1]], [[0, 1], [1, 1]]], "unit": [0, 1]}}
    assert run_scenario(write(tmp_path, bad))["exit_code"] == 2


def test_failed_expectation(tmp_path):
    data = {**B3, "pipeline": [{"step": "covering-completion", "expect": {"dim_completion": 5}}]}
    report = run_scenario(write(tmp_path, data))
    assert report["exit_code"] == 1
    assert report["steps"][0]["violations"] == ["expected dim_completion = 5, got 3"]


def test_scenario_sections_are_built_once():
    scn = Scenario.load(resources.files("qbundles") / "scenarios" / "c4-mobius-associated.json")
    assert scn.transitions is scn.transitions
    assert len(scn.gauges) == 2


def test_scenario_error_is_library_error():
    with pytest.raises(ScenarioError):
        Scenario({"name": "x"})


@given(st.fractions(max_denominator=50))
def test_rationals_round_trip_through_reports(x):
    encoded = json.loads(json.dumps(jsonable(x)))
    assert scalar(encoded) == x
    assert isinstance(encoded, int) == (Fraction(x).denominator == 1)


def test_gauge_and_connection_form_scenarios_agree():
    # the documented equivalence between gauges and connection_forms for the sign comodule
    folder = resources.files("qbundles") / "scenarios"
    by_gauge = Scenario.load(folder / "c4-mobius-associated.json").local_connections
    by_form = Scenario.load(folder / "c4-mobius-connection.json").local_connections
    assert [c.forms for c in by_gauge] == [c.forms for c in by_form]
