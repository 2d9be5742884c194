import json

import pytest

from assertibility_gate.decision import Status
from assertibility_gate.gate import ReasonClass
from assertibility_gate.helpers import format_timestamp
from assertibility_gate.helpers.errors import ConfigurationError, ParseError
from assertibility_gate.scenarios import DATA_DIR, build_contract, bundled_scenario, load_scenario, run_scenario

from .factories import identity_network


def test_table(report):
    lines = report.table().splitlines()
    assert lines[0].split() == ["query_id", "record_time", "status", "reason", "bounds", "stages", "cost", "expected"]
    assert set(lines[1]) == {"-", " "}
    assert lines[2].split() == [
        "tooth-social-stage-1", "2025-03-01T00:00:00Z", "U", "U-MODEL", "[21/50,", "81/100]", "5", "63", "U",
    ]
    assert lines[3].split() == [
        "tooth-social-stage-2", "2025-06-01T00:00:00Z", "A", "-", "[19/25,", "21/25]", "5", "63", "A",
    ]


def test_exoneration_runs_u_then_d(exoneration):
    report = run_scenario(exoneration)
    assert report.statuses == [Status.UNDETERMINED, Status.DENIED]
    assert report.outputs[0].reason is ReasonClass.U_MODEL
    assert (report.rows[1].stages_used, report.rows[1].cost_spent) == (0, 1)
    assert report.all_matched


def test_contracts_follow_the_record_time(report):
    first = report.contracts["tooth-social-stage-1"]
    second = report.contracts["tooth-social-stage-2"]
    assert first.t_int == second.t_int
    assert first.contract_hash != second.contract_hash
    assert format_timestamp(second.record_time) == "2025-06-01T00:00:00Z"


def test_expectation_override_reports_mismatch(scenario):
    report = run_scenario(scenario, expectations={"tooth-social-stage-2": Status.DENIED})
    assert not report.all_matched
    assert [row.query_id for row in report.mismatches] == ["tooth-social-stage-2"]


def test_runs_are_deterministic(scenario):
    first, second = run_scenario(scenario), run_scenario(scenario)
    assert first.history.dumps() == second.history.dumps()
    assert first.table() == second.table()


def test_unknown_bundled_scenario():
    with pytest.raises(ConfigurationError):
        bundled_scenario("tooth_social_sequel")


def _write_variant(tmp_path, change):
    document = json.loads((DATA_DIR / "tooth_social.scenario.json").read_text())
    for name in ("network", "policies", "contract"):
        document[name] = str(DATA_DIR / document[name])
    change(document)
    path = tmp_path / "variant.scenario.json"
    path.write_text(json.dumps(document))
    return path


def test_scenario_file_with_absolute_references(tmp_path):
    scenario = load_scenario(_write_variant(tmp_path, lambda d: None))
    assert run_scenario(scenario).statuses == [Status.UNDETERMINED, Status.ASSERTED]


def test_scenario_file_errors(tmp_path):
    with pytest.raises(ParseError):
        load_scenario(_write_variant(tmp_path, lambda d: d.pop("queries")))
    with pytest.raises(ParseError):
        load_scenario(_write_variant(tmp_path, lambda d: d["timeline"].reverse()))


def test_contract_template_pinning(scenario):
    template = dict(scenario.contract_template)
    template["t_int"] = {"timestamp": "2025-01-15T00:00:00Z", "model_hash": "f" * 64}
    with pytest.raises(ConfigurationError):
        build_contract(template, scenario.network)
    with pytest.raises(ConfigurationError):
        build_contract({"regime": {}}, scenario.network)
    contract = build_contract(scenario.contract_template, identity_network())
    assert contract.t_int.model_hash == identity_network().model_hash
