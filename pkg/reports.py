"""Tabular outputs: cost grid, gain grid, settlement track, media report and
simulator summaries, as DataFrames and as CSV text."""
import logging
from typing import Optional

import pandas as pd

import econ_model
import media_catalog
from schemas import (
    ArchitectureComparison,
    ConnectionProfile,
    MediaClass,
    Scenario,
    SimReport,
    SlaSpec,
    cents_to_dollars,
)

logger = logging.getLogger(__name__)

NA = "N/A"


def ncf_column(ncf: float) -> str:
    return f"NCF={ncf:g}"


def _plain(value: float):
    """Integral floats as ints so CSV cells read 10, not 10.0."""
    return int(value) if float(value).is_integer() else value


def to_csv(frame: pd.DataFrame) -> str:
    return frame.to_csv(index=False, lineterminator="\n")


def cost_grid(scenario: Scenario) -> pd.DataFrame:
    params = scenario.cost_params
    rows = []
    for option in scenario.residences:
        trip = econ_model.effective_trip_cost(option, params)
        row = {
            "label": option.label,
            "distance": _plain(option.distance),
            "time": _plain(option.one_way_time),
            "housing": option.housing,
            "mode": option.mode.value + (" + hotel" if option.hotel else ""),
            "trip_cost": cents_to_dollars(econ_model.to_cents(trip)),
        }
        for ncf in scenario.ncf_grid:
            cost = econ_model.monthly_cost(option, ncf, params)
            row[ncf_column(ncf)] = cost.total_usd if cost.feasible else NA
        rows.append(row)
    return pd.DataFrame(rows, columns=list(rows[0]))


def emit_cost_grid(scenario: Scenario) -> str:
    return to_csv(cost_grid(scenario))


def gain_grid(scenario: Scenario) -> pd.DataFrame:
    points = econ_model.gain_curve(scenario.residences, scenario.ncf_grid, scenario.cost_params)
    frame = pd.DataFrame([
        {
            "label": p.label,
            "distance": _plain(p.distance),
            "ncf": p.ncf,
            "gain": p.gain_usd,
            "baseline_ncf": p.baseline_ncf,
            "flagged": p.flagged,
            "relocation_gain": NA if p.relocation_gain is None else cents_to_dollars(p.relocation_gain),
        }
        for p in points
    ], columns=["label", "distance", "ncf", "gain", "baseline_ncf", "flagged", "relocation_gain"])
    return frame


def settlement_track(scenario: Scenario) -> pd.DataFrame:
    """Best residence, settlement radius and acceptable residences per NCF."""
    params = scenario.cost_params
    options = scenario.residences
    baseline = econ_model.relocation_baseline(options, params)
    budget = float("inf") if baseline is None else baseline.total / 100
    acceptable = econ_model.acceptable_cells(options, scenario.ncf_grid, params)
    rows = []
    for ncf in scenario.ncf_grid:
        best = econ_model.optimize_settlement(options, ncf, params)
        radius = econ_model.settlement_radius(options, ncf, budget, params)
        rows.append({
            "ncf": ncf,
            "best": best.option.label if best else NA,
            "distance": _plain(best.option.distance) if best else NA,
            "total": best.cost.total_usd if best else NA,
            "settlement_radius": NA if radius is None else _plain(radius),
            "acceptable": "|".join(label for label, cells in acceptable.items() if ncf in cells),
        })
    return pd.DataFrame(rows, columns=["ncf", "best", "distance", "total", "settlement_radius",
                                       "acceptable"])


def media_report(conn: ConnectionProfile, overprovision: float,
                 sla: Optional[SlaSpec] = None) -> pd.DataFrame:
    sla = sla or SlaSpec()
    best_effort = media_catalog.feasible_media(conn, overprovision, sla, guaranteed=False)
    guaranteed = media_catalog.feasible_media(conn, overprovision, sla, guaranteed=True)
    rows = []
    for media in MediaClass:
        p = media_catalog.profile(media)
        rows.append({
            "media": media.value,
            "qos_tier": p.qos_tier.name,
            "required_best_effort_mbps": media_catalog.required_access(media, overprovision),
            "required_guaranteed_mbps": media_catalog.required_access(media, 1.0),
            "best_effort": media in best_effort,
            "guaranteed": media in guaranteed,
        })
    return pd.DataFrame(rows)


def sim_report_frame(report: SimReport) -> pd.DataFrame:
    rows = [
        ("architecture", "", report.architecture.value),
        ("seed", "", report.seed),
        ("offered", "", report.offered),
        ("admitted", "", report.admitted),
        ("rejected", "", report.rejected),
        ("acceptance_ratio", "", report.acceptance_ratio),
        ("sla_violations", "", report.sla_violations),
        ("sla_violation_rate", "", report.sla_violation_rate),
        ("forced_completions", "", report.forced_completions),
        ("platform_count", "", report.platform_count),
    ]
    rows += [("revenue", party, str(amount)) for party, amount in sorted(report.revenue.items())]
    rows += [("peak_utilization", link, u) for link, u in sorted(report.peak_utilization.items())]
    rows += [("mean_utilization", link, u) for link, u in sorted(report.mean_utilization.items())]
    return pd.DataFrame(rows, columns=["metric", "key", "value"])


def comparison_frame(comparison: ArchitectureComparison) -> pd.DataFrame:
    frames = []
    for report in (comparison.cdn_based, comparison.walled_garden):
        frame = sim_report_frame(report)
        frame.insert(0, "run", report.architecture.value)
        frames.append(frame)
    return pd.concat(frames, ignore_index=True)


def ledger_frame(entries) -> pd.DataFrame:
    return pd.DataFrame([e.model_dump() for e in entries],
                        columns=["reference", "paper_value", "recomputed_value", "note"])


def tariff_frame(book: media_catalog.TariffBook) -> pd.DataFrame:
    rows = [
        {"media": e.media.value, "proximity": e.proximity.value,
         "pricing": e.pricing.value, "price": str(e.price)}
        for e in sorted(book.entries(), key=lambda e: (list(MediaClass).index(e.media),
                                                        e.proximity.value))
    ]
    return pd.DataFrame(rows, columns=["media", "proximity", "pricing", "price"])


def curve_frame(series) -> pd.DataFrame:
    """Long-form (ncf, distance, usd) rows behind an SVG curve family."""
    rows = [
        {"ncf": ncf, "distance": _plain(distance), "usd": value}
        for ncf, points in sorted(series.items())
        for distance, value in points
    ]
    return pd.DataFrame(rows, columns=["ncf", "distance", "usd"])
