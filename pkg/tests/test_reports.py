import io

import pandas as pd
import pytest

import deviations
import reports
from schemas import ConnectionProfile
from scenario import BUNDLED_SCENARIO, parse_scenario, parse_scenario_text

SINGLE_ROW = """
[grid]
ncf = 0, 1

[residence]
label = home
distance = 10
time = 30
housing = 2500
mode = Car
"""


@pytest.fixture(scope="module")
def table3():
    return parse_scenario(BUNDLED_SCENARIO)


def test_cost_grid_header_and_shape(table3):
    csv = reports.emit_cost_grid(table3)
    lines = csv.splitlines()
    assert lines[0] == ("label,distance,time,housing,mode,trip_cost,"
                        "NCF=0,NCF=0.2,NCF=0.4,NCF=0.6,NCF=0.8,NCF=0.9,NCF=0.95")
    assert len(lines) == 11
    assert lines[4] == "25mi,25,45,1500,Car,71,2920,2636,2352,2068,1784,1642,1571"


def test_cost_grid_renders_infeasible_cells(table3):
    lines = reports.emit_cost_grid(table3).splitlines()
    assert lines[7] == "1000mi,1000,180,900,TrainAir,380,N/A,6980,5460,3940,2420,1660,1280"
    assert lines[9].startswith("2500mi-hotel,2500,300,1200,MidHaulAir + hotel,900,N/A,N/A,6300")


def test_cost_grid_numbers_reparse(table3):
    frame = pd.read_csv(io.StringIO(reports.emit_cost_grid(table3)))
    assert frame.loc[frame.label == "40mi", "NCF=0.8"].item() == 1600


def test_single_row_grid_is_two_lines():
    csv = reports.emit_cost_grid(parse_scenario_text(SINGLE_ROW))
    assert csv == "label,distance,time,housing,mode,trip_cost,NCF=0,NCF=1\nhome,10,30,2500,Car,40,3300,2500\n"


def test_full_ncf_column_equals_housing(table3):
    scenario = table3.model_copy(update={"ncf_grid": [1.0]})
    grid = reports.cost_grid(scenario)
    assert list(grid["NCF=1"]) == list(grid["housing"])


def test_emit_is_stable(table3):
    assert reports.emit_cost_grid(table3) == reports.emit_cost_grid(parse_scenario(BUNDLED_SCENARIO))


def test_gain_grid(table3):
    grid = reports.gain_grid(table3)
    assert len(grid) == 70
    row = grid[(grid.label == "40mi") & (grid.ncf == 0.8)].iloc[0]
    assert row.gain == 1600
    assert row.relocation_gain == 1320


def test_settlement_track(table3):
    track = reports.settlement_track(table3)
    assert list(track.best) == ["25mi", "25mi", "25mi", "40mi", "40mi", "40mi", "1000mi"]
    assert track.iloc[-1].total == 1280
    assert track.iloc[4].acceptable == "10mi|25mi|40mi|100mi|1000mi|2500mi-hotel"


def test_media_report(table3):
    frame = reports.media_report(table3.connection, 4)
    by_media = frame.set_index("media")
    assert bool(by_media.loc["Visual", "best_effort"])
    assert not bool(by_media.loc["Telepresence", "best_effort"])
    assert bool(by_media.loc["Telepresence", "guaranteed"])
    assert by_media.loc["Visual", "required_best_effort_mbps"] == pytest.approx(8)


def test_media_report_zero_link():
    frame = reports.media_report(ConnectionProfile(down=0), 1)
    assert not frame.best_effort.any()


def test_ledger_is_exhaustive(table3):
    ledger = deviations.build_ledger(table3)
    assert sorted(e.reference for e in ledger) == sorted([
        "25mi / NCF=0",
        "25mi / trip cost (formula)",
        "100mi / trip_cost",
        "1000mi / trip_cost",
        "2500mi-hotel / NCF=0.4",
        "2500mi-hotel / NCF=0.6",
        "2500mi-hotel / NCF=0.9",
        "2500mi-hotel / NCF=0.95",
    ])


def test_ledger_values(table3):
    by_ref = {e.reference: e for e in deviations.build_ledger(table3)}
    assert (by_ref["25mi / NCF=0"].paper_value, by_ref["25mi / NCF=0"].recomputed_value) == ("2980", "2920")
    assert by_ref["2500mi-hotel / NCF=0.4"].recomputed_value == "6300"
    assert by_ref["25mi / trip cost (formula)"].recomputed_value == "70"
    assert all(e.note for e in by_ref.values())


def test_ledger_matches_grid_comparison(table3):
    # every mismatched cell is in the ledger, and nothing else is
    grid = reports.cost_grid(table3).set_index("label")
    mismatched = set()
    for label, cells in table3.printed_cells.items():
        for key, printed in cells.items():
            column = "trip_cost" if key == "trip_cost" else f"NCF={key}"
            if not deviations.cells_match(printed, grid.at[label, column]):
                mismatched.add(f"{label} / {column}")
    ledger = {e.reference for e in deviations.grid_deviations(table3)}
    assert ledger == mismatched


@pytest.mark.parametrize("printed, ours, expected", [
    ("N/A", "N/A", True),
    ("N/A", 5000, False),
    ("5000", "N/A", False),
    ("12K", 11900, True),
    ("12K", 11400, False),
    ("2980", 2920, False),
    ("2636", 2636, True),
    ("2636", 2637, True),
])
def test_cells_match(printed, ours, expected):
    assert deviations.cells_match(printed, ours) is expected


def test_ledger_frame_columns(table3):
    frame = reports.ledger_frame(deviations.build_ledger(table3))
    assert list(frame.columns) == ["reference", "paper_value", "recomputed_value", "note"]
    assert len(frame) == 8


def test_tariff_frame_lists_every_pair():
    import media_catalog
    frame = reports.tariff_frame(media_catalog.DEFAULT_TARIFFS)
    assert len(frame) == 20
    assert frame.iloc[0].media == "Message"
