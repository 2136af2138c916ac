import copy
import csv
import io
import json

import pytest
import yaml
from hypothesis import given, settings
from hypothesis import strategies as st

from xrorch.orchestrator import Trace, run
from xrorch.scenario import (OUTPUT_DIR_ENV, ScenarioError, dump_scenario, fmt, load_scenario, parse_scenario,
                             reference_scenario_path, save_scenario, trace_json, write_trace)
from xrorch.synthetic import random_scenario


@pytest.fixture
def doc():
    return yaml.safe_load(reference_scenario_path().read_text())


def test_reference_loads(reference):
    assert len(reference.topology.nodes) == 6
    assert len(reference.users) == 9
    assert len(reference.events) == 9
    assert reference.users["UE4"].r_usage.vcpu == 5


def test_weights_must_sum_to_one(doc):
    doc["score_tables"]["weights"]["w_r"] = 0.35
    with pytest.raises(ScenarioError) as exc:
        parse_scenario(doc)
    assert exc.value.locator.startswith("score_tables")
    assert "weights" in str(exc.value)


def test_unknown_attachment_names_user(doc):
    doc["users"]["profiles"][2]["attachment"] = "UE42"
    with pytest.raises(ScenarioError) as exc:
        parse_scenario(doc)
    assert exc.value.locator == "users.profiles[2].attachment"
    assert "UE3" in str(exc.value)


def test_negative_capacity_located(doc):
    doc["topology"]["nodes"][0]["r_max"]["vcpu"] = -1
    with pytest.raises(ScenarioError) as exc:
        parse_scenario(doc)
    assert exc.value.locator == "topology.nodes[0].r_max.vcpu"


@pytest.mark.parametrize("mutate,locator", [
    (lambda d: d.update(schema_version=2), "schema_version"),
    (lambda d: d["tradeoffs"].pop("alpha"), "tradeoffs.alpha"),
    (lambda d: d["policy"]["strictness"].update(RAC="Maybe"), "policy.strictness.RAC"),
    (lambda d: d["deployment"].update(pop=2), "deployment.pop"),
    (lambda d: d["users"]["schedule"].append({"join": "UE99"}), "users.schedule[9]"),
])
def test_invalid_fields_are_located(doc, mutate, locator):
    mutate(doc)
    with pytest.raises(ScenarioError) as exc:
        parse_scenario(doc)
    assert exc.value.locator.startswith(locator)


def test_disconnected_topology_rejected(doc):
    doc["topology"]["links"] = [lk for lk in doc["topology"]["links"] if "DC3" not in (lk["a"], lk["b"])]
    with pytest.raises(ScenarioError, match="DC3"):
        parse_scenario(doc)


def test_soft_strictness_parsed(doc):
    doc["policy"]["strictness"]["RAC"] = {"Soft": 0.2}
    sc = parse_scenario(doc)
    assert sc.policy.strictness["RAC"].penalty == 0.2


def test_round_trip_reference(reference, tmp_path):
    p = tmp_path / "copy.scenario"
    save_scenario(reference, p)
    assert load_scenario(p) == reference


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 10**6))
def test_round_trip_synthetic(seed):
    sc = random_scenario(seed, soft_penalties=True)
    again = parse_scenario(copy.deepcopy(dump_scenario(sc)))
    assert again == sc


def test_fmt():
    assert fmt(0.31391) == "0.3139"
    assert fmt(-0.00001) == "0.0000"
    assert fmt(float("inf")) == "inf"
    assert fmt(None) == ""


def test_write_trace_outputs(reference, tmp_path):
    trace = run(reference)
    paths = write_trace(trace, tmp_path, scenario_name="reference")
    assert sorted(p.name for p in paths) == ["candidates.csv", "report.json", "summary.csv"]
    raw = (tmp_path / "summary.csv").read_bytes()
    assert raw.count(b"\r\n") == 10
    rows = list(csv.DictReader(io.StringIO(raw.decode())))
    assert len(rows) == 9
    assert rows[0]["time"] == "t1" and rows[0]["j_current"] == "None"
    cands = list(csv.DictReader(io.StringIO((tmp_path / "candidates.csv").read_text())))
    assert len(cands) == 54
    assert sum(int(r["chosen"]) for r in cands) == 9


def test_csv_and_json_agree(reference, tmp_path):
    trace = run(reference)
    write_trace(trace, tmp_path)
    report = json.loads((tmp_path / "report.json").read_text())
    rows = list(csv.DictReader(io.StringIO((tmp_path / "summary.csv").read_text())))
    for row, st_ in zip(rows, report["steps"]):
        assert row["j_best"] == st_["j_best"]
        assert float(row["f_best"]) == st_["f_best"]
        assert row["ro"] == st_["op"]


def test_empty_trace_has_headers_only(tmp_path):
    write_trace(Trace(), tmp_path, format="csv")
    assert (tmp_path / "summary.csv").read_text().strip() == "time,context_change,j_current,j_best,f_best,ro"
    assert not (tmp_path / "report.json").exists()


def test_output_dir_from_environment(reference, tmp_path, monkeypatch):
    monkeypatch.setenv(OUTPUT_DIR_ENV, str(tmp_path / "env-out"))
    write_trace(run(reference, until=1), format="json")
    assert (tmp_path / "env-out" / "report.json").exists()


def test_trace_json_is_byte_stable(reference):
    assert trace_json(run(reference)) == trace_json(run(reference))


def test_unknown_format_rejected(tmp_path):
    with pytest.raises(ValueError):
        write_trace(Trace(), tmp_path, format="xml")
