import json

import pytest

from errors import ScenarioError, ScenarioParseError, ScenarioReferenceError
from scenario import ExperimentBlock, build_scenario, load_scenario, resolve_path


def sg_document(scenario_path):
    return json.loads(scenario_path("stern_gerlach").read_text())


def write(tmp_path, document):
    path = tmp_path / "scenario.json"
    path.write_text(json.dumps(document))
    return path


def test_stern_gerlach_loads(stern_gerlach):
    assert stern_gerlach.name == "stern_gerlach"
    assert stern_gerlach.dimension == 2
    assert list(stern_gerlach.psas) == ["psi"]
    assert list(stern_gerlach.bases) == ["z", "x"]
    assert stern_gerlach.basis("x").names == ("P_minus", "P_plus")
    pair = stern_gerlach.pairs_for("z")[0]
    assert (pair.power_a, pair.power_b, pair.observable) == ("P_up", "P_down", "sigma_z")
    assert stern_gerlach.experiments[0] == ExperimentBlock("psi", "z", 100000, 42)


@pytest.mark.parametrize("name", ["stern_gerlach", "eigenstate", "thirds", "rabi", "generic"])
def test_bundled_scenarios_load(name):
    scenario = load_scenario(name)
    for block in scenario.experiments:
        assert scenario.situation(block.psa, block.basis).basis_label == block.basis


def test_rabi_evolution_block():
    rabi = load_scenario("rabi")
    assert rabi.evolution.hamiltonian == "h_rabi"
    assert rabi.evolution.times[0] == 0.0
    assert rabi.observable("h_rabi").matrix[0, 1] == pytest.approx(0.5)


def test_resolve_path_prefers_existing_files(scenario_path):
    assert resolve_path("thirds") == scenario_path("thirds")
    assert resolve_path(str(scenario_path("thirds"))) == scenario_path("thirds")


def test_unnormalized_state_names_the_vector(tmp_path, scenario_path):
    doc = sg_document(scenario_path)
    doc["psas"]["psi"] = [0.9, 0]
    with pytest.raises(ScenarioError) as info:
        load_scenario(write(tmp_path, doc))
    assert "$.psas.psi" in str(info.value)
    assert "0.9" in str(info.value)
    assert info.value.exit_code == 2


def test_unknown_basis_reference(tmp_path, scenario_path):
    doc = sg_document(scenario_path)
    doc["experiments"][0]["basis"] = "y"
    with pytest.raises(ScenarioReferenceError) as info:
        load_scenario(write(tmp_path, doc))
    assert info.value.path == "$.experiments[0].basis"


def test_unknown_power_in_pair(tmp_path, scenario_path):
    doc = sg_document(scenario_path)
    doc["contradictory_pairs"][0]["powers"] = ["P_up", "P_left"]
    with pytest.raises(ScenarioReferenceError):
        load_scenario(write(tmp_path, doc))


def test_invalid_contradictory_pair(tmp_path, scenario_path):
    doc = sg_document(scenario_path)
    doc["contradictory_pairs"][0]["observable"] = "sigma_x"
    with pytest.raises(ScenarioError) as info:
        load_scenario(write(tmp_path, doc))
    assert "not eigenvectors" in str(info.value)
    assert info.value.path == "$.contradictory_pairs[0]"


def test_malformed_json_reports_position(tmp_path):
    path = tmp_path / "broken.json"
    path.write_text('{\n  "schema_version": 1,\n  "dimension": 2,,\n}')
    with pytest.raises(ScenarioParseError) as info:
        load_scenario(path)
    assert info.value.line == 3


@pytest.mark.parametrize("mutate", [
    lambda d: d.pop("dimension"),
    lambda d: d.update(schema_version=2),
    lambda d: d.update(colour="blue"),
    lambda d: d["experiments"][0].update(shots=0),
    lambda d: d["psas"].update({"bad name": [1, 0]}),
])
def test_schema_violations(scenario_path, mutate):
    doc = sg_document(scenario_path)
    mutate(doc)
    with pytest.raises(ScenarioError, match="schema violation"):
        build_scenario(doc)


def test_dimension_mismatch(scenario_path):
    doc = sg_document(scenario_path)
    doc["psas"]["psi"] = [1, 0, 0]
    with pytest.raises(ScenarioError, match="3 amplitudes"):
        build_scenario(doc)


def test_missing_file(tmp_path):
    with pytest.raises(ScenarioError):
        load_scenario(tmp_path / "nowhere.json")


def test_lookup_errors(stern_gerlach):
    with pytest.raises(ScenarioReferenceError):
        stern_gerlach.psa("phi")
    with pytest.raises(ScenarioReferenceError):
        stern_gerlach.basis("y")
    with pytest.raises(ScenarioReferenceError):
        stern_gerlach.observable("sigma_y")


def test_pair_over_part_of_a_larger_context(tmp_path):
    third = 0.5773502691896258
    doc = {
        "schema_version": 1,
        "dimension": 3,
        "psas": {"psi": [third, third, third]},
        "observables": {"obs": {"matrix": [[1, 0, 0], [0, 0, 0], [0, 0, -1]]}},
        "bases": {"s": {"vectors": [[1, 0, 0], [0, 1, 0], [0, 0, 1]], "names": ["P_a", "P_b", "P_c"]}},
        "contradictory_pairs": [{"basis": "s", "powers": ["P_a", "P_b"], "observable": "obs"}],
    }
    with pytest.raises(ScenarioError) as info:
        load_scenario(write(tmp_path, doc))
    assert info.value.path == "$.contradictory_pairs[0]"
    assert "not exhaustive" in str(info.value)
