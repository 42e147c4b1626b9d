import json
from dataclasses import asdict
from fractions import Fraction

import pytest

from src.config import Config
from src.errors import ScenarioError
from src.scenario import SUITE_IDS, Scenario, ScenarioManager, parse_scenario, parse_scenario_text


def test_defaults_are_filled_in():
    scenario = parse_scenario_text("{}")
    assert scenario.dim == 2
    assert scenario.order == 10
    assert scenario.alphas == ["1/3", "1/4", "5/12"]
    assert scenario.a_value == 1
    assert scenario.beta2_value is None
    assert not scenario.lotka_volterra
    assert scenario.selected_suites() == list(SUITE_IDS)


def test_rational_strings_are_exact():
    scenario = parse_scenario_text('{"alphas": ["1/2", 0.25, "1/4"], "beta2": "-1"}')
    assert scenario.alpha_params.a0 == Fraction(1, 2)
    assert scenario.alpha_params.a1 == Fraction(1, 4)
    assert scenario.beta2_value == -1


def test_errors_name_field_and_line():
    text = '{\n  "dim": 1,\n  "alphas": [1, 0]\n}'
    with pytest.raises(ScenarioError) as info:
        parse_scenario_text(text)
    assert info.value.field == "alphas"
    assert info.value.line == 3
    assert "(field 'alphas', line 3)" in str(info.value)


def test_malformed_json_reports_the_line():
    with pytest.raises(ScenarioError) as info:
        parse_scenario_text('{\n  "dim": 1,\n  "order": \n}')
    assert info.value.line == 4
    assert "malformed JSON" in str(info.value)


def test_unknown_fields_are_rejected():
    with pytest.raises(ScenarioError) as info:
        parse_scenario_text('{"dim": 1,\n "colour": "red"}')
    assert info.value.field == "colour"
    assert info.value.line == 2


@pytest.mark.parametrize(
    "text, field",
    [
        ('{"mode": "interval"}', "mode"),
        ('{"order": 3}', "order"),
        ('{"dim": 0}', "dim"),
        ('{"nmax": 1}', "nmax"),
        ('{"seed": "x"}', "seed"),
        ('{"mode": "float", "tolerance": 0}', "tolerance"),
        ('{"alphas": [1, 1, 1]}', "alphas"),
        ('{"beta2": "one"}', "beta2"),
        ('{"qdet_samples": 0}', "qdet_samples"),
        ('{"suites": ["toda", "kdv"]}', "suites"),
        ('{"dim": 2, "initial": {"f1": [[1, 2]]}}', "initial"),
        ('{"initial": {"g": 1}}', "initial"),
    ],
)
def test_invalid_fields(text, field):
    with pytest.raises(ScenarioError) as info:
        parse_scenario_text(text)
    assert info.value.field == field


def test_alpha_sum_zero_selects_lotka_volterra():
    scenario = parse_scenario_text('{"alphas": ["1/2", "-1/2", 0]}')
    assert scenario.lotka_volterra


def test_initial_values_become_matrices():
    scenario = Scenario(dim=2, initial={"f1": 3, "f2": [[1, "1/2"], [0, 1]]})
    assert scenario.initial_matrix("f1", True)[1, 1] == 3
    assert scenario.initial_matrix("f2", True)[0, 1] == Fraction(1, 2)
    assert scenario.initial_matrix("f0", True) is None


def test_suite_selection():
    scenario = Scenario(suites=["lax", "ring"])
    assert scenario.selected_suites() == ["ring", "lax"]
    assert scenario.selected_suites("toda") == ["toda"]
    assert scenario.selected_suites("all") == list(SUITE_IDS)


def test_digest_is_stable():
    assert Scenario(seed=4).digest() == Scenario(seed=4).digest()
    assert Scenario(seed=4).digest() != Scenario(seed=5).digest()
    assert len(Scenario().digest()) == 16


def test_ring_context_follows_the_scenario():
    ctx = Scenario(mode="float", tolerance=1e-7, entry_range=5).ring_context()
    assert ctx.mode == "float"
    assert ctx.tol == 1e-7
    assert ctx.entry_range == 5


def test_missing_file(tmp_path):
    with pytest.raises(ScenarioError):
        parse_scenario(str(tmp_path / "absent.json"))


def test_file_name_becomes_the_scenario_name(tmp_path):
    path = tmp_path / "tiny.json"
    path.write_text(json.dumps({"dim": 1}))
    assert parse_scenario(str(path)).name == "tiny"


def test_manager_save_and_load(tmp_path):
    manager = ScenarioManager()
    scenario = manager.get_preset("exact-d1", seed=11)
    path = tmp_path / "nested" / "saved.json"
    manager.save(scenario, str(path))
    assert asdict(manager.load(str(path))) == asdict(scenario)


def test_presets():
    manager = ScenarioManager()
    assert manager.list_presets() == ["smoke", "exact-d1", "exact-d2", "float-d3"]
    smoke = manager.get_preset("smoke", dim=None, order=8)
    assert smoke.dim == 1
    assert smoke.order == 8
    with pytest.raises(ScenarioError) as info:
        manager.get_preset("huge")
    assert info.value.field == "preset"


def test_config_defaults_and_threads(tmp_path, monkeypatch):
    monkeypatch.setenv("NCP4_THREADS", "3")
    config = Config(str(tmp_path / "ncp4.json"))
    assert config.get_threads() == 3
    assert config.get_mode() == "exact"
    ctx = config.ring_context(mode="float", tol=None)
    assert ctx.mode == "float"
    assert ctx.tol == 1e-9
    monkeypatch.setenv("NCP4_THREADS", "many")
    assert config.get_threads() == 1


def test_config_merges_file_values(tmp_path):
    path = tmp_path / "ncp4.json"
    path.write_text(json.dumps({"tolerance": 1e-6}))
    config = Config(str(path))
    assert config.get_tolerance() == 1e-6
    assert config.get_condition_bound() == 1e12


def test_settings_fill_fields_the_file_leaves_out():
    defaults = {"mode": "float", "tolerance": 1e-7, "entry_range": 5}
    scenario = parse_scenario_text("{}", defaults)
    assert scenario.mode == "float"
    assert scenario.tolerance == 1e-7
    assert scenario.entry_range == 5
    scenario = parse_scenario_text('{"mode": "exact", "entry_range": 2}', defaults)
    assert scenario.mode == "exact"
    assert scenario.entry_range == 2
    assert scenario.tolerance == 1e-7


def test_manager_defaults_sit_under_presets():
    manager = ScenarioManager(defaults={"tolerance": 1e-6, "entry_range": 4})
    smoke = manager.get_preset("smoke")
    assert smoke.entry_range == 4
    assert smoke.tolerance == 1e-6
    # preset values win over the settings
    assert manager.get_preset("float-d3").tolerance == 1e-8


def test_config_scenario_defaults(tmp_path):
    path = tmp_path / "ncp4.json"
    path.write_text(json.dumps({"mode": "float", "tolerance": 1e-5, "entry_range": 7}))
    config = Config(str(path))
    assert config.scenario_defaults() == {"mode": "float", "tolerance": 1e-5, "entry_range": 7}
    scenario = ScenarioManager(defaults=config.scenario_defaults()).get_preset("smoke")
    assert scenario.ring_context().tol == 1e-5


def test_unreadable_config_falls_back_to_defaults(tmp_path):
    path = tmp_path / "ncp4.json"
    path.write_text("{not json")
    config = Config(str(path))
    assert config.get_tolerance() == 1e-9
    assert config.get_mode() == "exact"
    assert config.scenario_defaults()["entry_range"] == 3
