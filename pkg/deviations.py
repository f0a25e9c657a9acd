"""Where the printed housing+transport table disagrees with its own formula.

The ledger is computed, not hand-kept: every printed cell carried by a
scenario is compared with the recomputed grid, and every printed trip cost
with the formula. Known mismatches get an explanatory note.
"""
import logging
from typing import Dict, List

import econ_model
import reports
from schemas import DeviationEntry, Scenario, cents_to_dollars

logger = logging.getLogger(__name__)

NOTES: Dict[str, str] = {
    "25mi / NCF=0": "row arithmetic gives 1500 + 20 x 71; the printed cell is 60 higher",
    "25mi / trip cost (formula)": "90 min x $0.5 + 50 mi x $0.5 = $70; cells use the printed $71",
    "100mi / trip_cost": "printed $200 but every cell uses $220 (the formula value)",
    "1000mi / trip_cost": "printed $480 but every cell uses $380 (time + short-haul fare)",
    "2500mi-hotel / NCF=0.4": "no single hotel-batching model reproduces this row",
    "2500mi-hotel / NCF=0.6": "no single hotel-batching model reproduces this row",
    "2500mi-hotel / NCF=0.9": "no single hotel-batching model reproduces this row",
    "2500mi-hotel / NCF=0.95": "no single hotel-batching model reproduces this row",
}
DEFAULT_NOTE = "recomputed value differs from the printed cell"


def cells_match(printed: str, ours) -> bool:
    """Printed vs recomputed cell: N/A must agree, "12K" matches to the
    thousand, dollar cells match within $1."""
    printed = printed.strip()
    ours_text = str(ours)
    if printed == reports.NA or ours_text == reports.NA:
        return printed == ours_text
    if printed.upper().endswith("K"):
        return round(int(ours) / 1000) == float(printed[:-1])
    return abs(float(printed) - float(ours)) <= 1


def _entry(reference: str, cell, ours) -> DeviationEntry:
    return DeviationEntry(reference=reference, paper_value=str(cell), recomputed_value=str(ours),
                          note=NOTES.get(reference, DEFAULT_NOTE))


def grid_deviations(scenario: Scenario) -> List[DeviationEntry]:
    """Printed cells (and printed trip costs) that the recomputed grid does not reproduce."""
    grid = reports.cost_grid(scenario).set_index("label")
    entries = []
    for option in scenario.residences:
        printed = scenario.printed_cells.get(option.label, {})
        for key, cell in printed.items():
            column = "trip_cost" if key == "trip_cost" else f"NCF={key}"
            ours = grid.at[option.label, column]
            if not cells_match(cell, ours):
                entries.append(_entry(f"{option.label} / {column}", cell, ours))
    return entries


def formula_deviations(scenario: Scenario) -> List[DeviationEntry]:
    """Rows whose cell-consistent trip cost differs from the recomputed formula."""
    entries = []
    for option in scenario.residences:
        if option.cell_trip_cost is None:
            continue
        formula = cents_to_dollars(econ_model.to_cents(econ_model.trip_cost(option, scenario.cost_params)))
        if formula != option.cell_trip_cost:
            entries.append(_entry(f"{option.label} / trip cost (formula)",
                                  option.cell_trip_cost, formula))
    return entries


def build_ledger(scenario: Scenario) -> List[DeviationEntry]:
    ledger = grid_deviations(scenario) + formula_deviations(scenario)
    for entry in ledger:
        logger.warning("Deviation %s: printed %s, recomputed %s",
                       entry.reference, entry.paper_value, entry.recomputed_value)
    return ledger
