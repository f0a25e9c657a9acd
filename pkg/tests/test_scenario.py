from decimal import Decimal

import pytest

from config import Settings
from schemas import Architecture, CommuteMode, DurationKind, MediaClass, Pricing
from scenario import (
    BUNDLED_SCENARIO,
    ScenarioError,
    parse_scenario,
    parse_scenario_text,
    parse_tariff_file,
    read_sections,
)

MINIMAL = """
[grid]
ncf = 0, 0.5

[residence]
label = home
distance = 10
time = 30
housing = 2500
mode = Car
"""


def test_bundled_scenario_has_ten_rows():
    scenario = parse_scenario(BUNDLED_SCENARIO)
    assert [o.label for o in scenario.residences] == [
        "0mi", "5mi", "10mi", "25mi", "40mi", "100mi", "1000mi", "2500mi", "2500mi-hotel", "6000mi"]
    assert scenario.ncf_grid == [0, 0.2, 0.4, 0.6, 0.8, 0.9, 0.95]
    hotel = scenario.residences[8]
    assert hotel.hotel and hotel.mode == CommuteMode.MID_HAUL_AIR and hotel.min_ncf == 0.4


def test_bundled_scenario_carries_printed_cells():
    scenario = parse_scenario(BUNDLED_SCENARIO)
    assert scenario.printed_cells["2500mi"]["0.4"] == "12K"
    assert scenario.printed_cells["1000mi"]["0"] == "N/A"
    assert scenario.printed_cells["100mi"]["trip_cost"] == "200"


def test_bundled_scenario_sim_section():
    sim = parse_scenario(BUNDLED_SCENARIO).sim
    assert sim.topology.architecture == Architecture.CDN_BASED
    assert sim.duration_model.kind == DurationKind.EXPONENTIAL
    assert sim.media_mix == {MediaClass.VERBAL: 1, MediaClass.VISUAL: 2, MediaClass.TELEPRESENCE: 1}
    assert sim.seed == 42
    isp_c = next(n for n in sim.topology.nodes if n.id == "isp-c")
    assert isp_c.transit_price == Decimal("0.0015")


def test_minimal_scenario_uses_default_params():
    scenario = parse_scenario_text(MINIMAL)
    assert scenario.cost_params.working_days == 20
    assert scenario.sim is None
    assert scenario.printed_cells == {}


def test_empty_file_is_missing_sections():
    with pytest.raises(ScenarioError, match="missing section"):
        parse_scenario_text("")


def test_ncf_grid_must_increase():
    with pytest.raises(ScenarioError) as excinfo:
        parse_scenario_text(MINIMAL.replace("0, 0.5", "0.4, 0.2"))
    assert excinfo.value.line == 2


def test_ncf_grid_must_stay_in_unit_interval():
    with pytest.raises(ScenarioError):
        parse_scenario_text(MINIMAL.replace("0, 0.5", "0, 1.5"))


def test_unknown_key_reports_line_and_column():
    text = MINIMAL + "colour = red\n"
    with pytest.raises(ScenarioError) as excinfo:
        parse_scenario_text(text)
    assert excinfo.value.line == 11
    assert excinfo.value.column == 1
    assert "unknown key 'colour'" in str(excinfo.value)


def test_unknown_section_is_rejected():
    with pytest.raises(ScenarioError, match=r"unknown section \[weather\]"):
        read_sections("[weather]\n")


def test_repeated_single_section_is_rejected():
    with pytest.raises(ScenarioError, match="more than once"):
        read_sections("[grid]\nncf = 0\n[grid]\nncf = 1\n")


def test_duplicate_key_is_rejected():
    with pytest.raises(ScenarioError, match="duplicate key"):
        read_sections("[grid]\nncf = 0\nncf = 1\n")


def test_line_without_equals_is_a_syntax_error():
    with pytest.raises(ScenarioError) as excinfo:
        read_sections("[grid]\n  ncf 0\n")
    assert (excinfo.value.line, excinfo.value.column) == (2, 3)


def test_comments_and_blank_lines_are_ignored():
    sections = read_sections("# header\n\n[grid]  # trailing\nncf = 0  # zero\n")
    assert sections[0].get("ncf") == "0"


def test_bad_number_names_the_key():
    with pytest.raises(ScenarioError, match="distance must be a number"):
        parse_scenario_text(MINIMAL.replace("distance = 10", "distance = far"))


def test_constraint_violation_names_the_field():
    with pytest.raises(ScenarioError, match="housing"):
        parse_scenario_text(MINIMAL.replace("housing = 2500", "housing = -1"))


def test_hotel_requires_air_mode():
    with pytest.raises(ScenarioError, match="hotel requires an air mode"):
        parse_scenario_text(MINIMAL + "hotel = true\n")


def test_duplicate_residence_label():
    with pytest.raises(ScenarioError, match="duplicate residence label"):
        parse_scenario_text(MINIMAL + MINIMAL.split("\n", 4)[-1].replace("[grid]", ""))


def test_printed_cells_must_match_grid_width():
    with pytest.raises(ScenarioError, match="printed has 1 values"):
        parse_scenario_text(MINIMAL + "printed = 3300\n")


def test_sim_requires_topology():
    with pytest.raises(ScenarioError, match=r"missing section \[topology\]"):
        parse_scenario_text(MINIMAL + "[sim]\narrival_rate = 10\nhorizon = 60\n")


def test_bad_duration_syntax():
    text = MINIMAL + """
[topology]
architecture = CdnBased
[node]
id = corp
role = Corporation
[sim]
arrival_rate = 10
horizon = 60
duration = 30
"""
    with pytest.raises(ScenarioError, match="duration"):
        parse_scenario_text(text)


def test_unknown_media_in_mix():
    text = MINIMAL + """
[topology]
architecture = CdnBased
[sim]
arrival_rate = 10
horizon = 60
mix = Smoke:1
"""
    with pytest.raises(ScenarioError, match="unknown media class 'Smoke'"):
        parse_scenario_text(text)


def test_scenario_tariff_overrides():
    text = MINIMAL + "[tariff]\nmedia = Visual\nproximity = MetroDsl\npricing = PerMinute\nprice = 0.02\n"
    scenario = parse_scenario_text(text)
    assert scenario.tariff_overrides[0].pricing == Pricing.PER_MINUTE


def test_path_is_prefixed_to_errors(tmp_path):
    path = tmp_path / "broken.scn"
    path.write_text("[grid]\nncf = 0\nbogus\n", encoding="utf-8")
    with pytest.raises(ScenarioError) as excinfo:
        parse_scenario(path)
    assert str(excinfo.value).startswith(f"{path}: line 3")


def test_missing_file_is_an_os_error(tmp_path):
    with pytest.raises(OSError):
        parse_scenario(tmp_path / "absent.scn")


def test_tariff_file_rejects_other_sections(tmp_path):
    path = tmp_path / "tariffs.scn"
    path.write_text("[grid]\nncf = 0\n", encoding="utf-8")
    with pytest.raises(ScenarioError, match="only hold"):
        parse_tariff_file(path)


def test_sim_without_seed_or_rebate_uses_settings(monkeypatch):
    monkeypatch.setattr("config.settings", Settings(_env_file=None, default_seed=7, sla_rebate=0.25))
    text = MINIMAL + """
[topology]
architecture = CdnBased
[node]
id = corp
role = Corporation
[node]
id = cdn
role = CdnOperator
[node]
id = isp-a
role = LastMileIsp
[sim]
arrival_rate = 10
horizon = 60
"""
    sim = parse_scenario_text(text).sim
    assert sim.seed == 7
    assert sim.sla_rebate == 0.25
