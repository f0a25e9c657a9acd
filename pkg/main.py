"""Command-line front end.

    python main.py table3 --scenario fixtures/table3.scn
    python main.py budget --row 40mi --ncf 0.8
    python main.py simulate --seed 42 --trace trace.jsonl

Exit codes: 0 success, 1 validation error (including usage errors),
2 I/O error.
"""
import argparse
import json
import logging
import sys
from pathlib import Path
from typing import List, Optional

from logging_config import setup_logging

import charts
import deviations
import econ_model
import media_catalog
import qos_sim
import reports
from schemas import ConnectionProfile, Scenario, cents_to_dollars
from scenario import BUNDLED_SCENARIO, parse_scenario

logger = logging.getLogger(__name__)

EXIT_OK, EXIT_VALIDATION, EXIT_IO = 0, 1, 2


class CliParser(argparse.ArgumentParser):
    """argparse exits 2 on usage errors; here 2 is reserved for I/O."""

    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_VALIDATION, f"{self.prog}: error: {message}\n")


def build_parser() -> CliParser:
    common = CliParser(add_help=False)
    common.add_argument("--scenario", default=str(BUNDLED_SCENARIO),
                        help="scenario file (default: the bundled housing+transport table)")
    common.add_argument("--out", help="write output here instead of standard output")
    common.add_argument("--seed", type=int, help="override the simulator seed")
    common.add_argument("--format", choices=["csv", "svg"], help="output format")

    parser = CliParser(prog="netcentric",
                       description="Net-centric telecommuting economics and QoS session simulator")
    sub = parser.add_subparsers(dest="command", required=True, metavar="COMMAND")

    sub.add_parser("table3", parents=[common], help="housing+transport cost grid (CSV)")

    curves = sub.add_parser("curves", parents=[common], help="cost or gain vs distance (SVG)")
    curves.add_argument("--kind", choices=[k.value for k in charts.CurveKind],
                        default=charts.CurveKind.COST_VS_DISTANCE.value)

    sub.add_parser("gain", parents=[common], help="gain vs distance grid (CSV)")
    sub.add_parser("optimize", parents=[common],
                   help="best residence, settlement radius and acceptable rows per NCF")

    budget = sub.add_parser("budget", parents=[common], help="largest affordable telecom spend")
    budget.add_argument("--row", required=True, help="residence label")
    budget.add_argument("--ncf", required=True, type=float)
    budget.add_argument("--baseline", choices=["in-place", "relocation"], default="in-place")

    media = sub.add_parser("media", parents=[common], help="media classes a connection carries")
    media.add_argument("--down", type=float, help="downstream Mbps (default: scenario connection)")
    media.add_argument("--loss", type=float)
    media.add_argument("--jitter", type=float)
    media.add_argument("--delay", type=float)
    media.add_argument("--overprovision", type=float, default=4.0)

    tariffs = sub.add_parser("tariffs", parents=[common], help="per-media tariff table (CSV)")
    tariffs.add_argument("--override", help="tariff override file applied last")

    simulate = sub.add_parser("simulate", parents=[common], help="run the session simulator")
    simulate.add_argument("--trace", help="write one JSON record per event to this file")

    sub.add_parser("compare", parents=[common], help="CDN-based vs walled-garden on one seed")
    sub.add_parser("deviations", parents=[common],
                   help="printed table cells the recomputation does not reproduce")
    return parser


# ------------------------------------------------------------------ commands

def _csv_only(args):
    if args.format == "svg":
        raise ValueError(f"{args.command} emits CSV only")


def _sim_config(scenario: Scenario, seed: Optional[int]):
    if scenario.sim is None:
        raise ValueError("scenario has no [sim] section")
    if seed is None:
        return scenario.sim
    return scenario.sim.model_copy(update={"seed": seed})


def cmd_table3(args, scenario: Scenario) -> str:
    _csv_only(args)
    return reports.emit_cost_grid(scenario)


def cmd_curves(args, scenario: Scenario) -> str:
    if args.format == "csv":
        series = charts.curve_series(scenario, charts.CurveKind(args.kind))
        return reports.to_csv(reports.curve_frame(series))
    return charts.emit_curves(scenario, args.kind)


def cmd_gain(args, scenario: Scenario) -> str:
    _csv_only(args)
    return reports.to_csv(reports.gain_grid(scenario))


def cmd_optimize(args, scenario: Scenario) -> str:
    _csv_only(args)
    return reports.to_csv(reports.settlement_track(scenario))


def cmd_budget(args, scenario: Scenario) -> str:
    _csv_only(args)
    by_label = {o.label: o for o in scenario.residences}
    if args.row not in by_label:
        raise ValueError(f"no residence labelled {args.row!r}; have {sorted(by_label)}")
    if not 0 <= args.ncf <= 1:
        raise ValueError(f"--ncf must be within [0, 1], got {args.ncf}")
    params = scenario.cost_params
    baseline = None
    if args.baseline == "relocation":
        baseline = econ_model.relocation_baseline(scenario.residences, params)
        if baseline is None:
            raise ValueError("no residence is feasible at NCF 0")
    cents = econ_model.telecom_budget(by_label[args.row], args.ncf, params, baseline)
    return f"{cents_to_dollars(cents)}\n"


def cmd_media(args, scenario: Scenario) -> str:
    _csv_only(args)
    conn = scenario.connection or ConnectionProfile(down=0)
    updates = {k: getattr(args, k) for k in ("down", "loss", "jitter", "delay")
               if getattr(args, k) is not None}
    if updates:
        conn = ConnectionProfile(**{**conn.model_dump(), **updates})
    sla = scenario.sim.sla if scenario.sim else None
    return reports.to_csv(reports.media_report(conn, args.overprovision, sla))


def cmd_tariffs(args, scenario: Scenario) -> str:
    _csv_only(args)
    book = media_catalog.load_tariffs().with_overrides(scenario.tariff_overrides)
    if args.override:
        book = book.with_overrides(media_catalog.load_tariffs(args.override).entries())
    return reports.to_csv(reports.tariff_frame(book))


def cmd_simulate(args, scenario: Scenario) -> str:
    _csv_only(args)
    config = _sim_config(scenario, args.seed)
    trace: Optional[list] = [] if args.trace else None
    report = qos_sim.run(config, trace)
    if trace is not None:
        lines = "".join(json.dumps(record, sort_keys=True) + "\n" for record in trace)
        Path(args.trace).write_text(lines, encoding="utf-8", newline="\n")
        logger.info("Wrote %d trace records to %s", len(trace), args.trace)
    return reports.to_csv(reports.sim_report_frame(report))


def cmd_compare(args, scenario: Scenario) -> str:
    _csv_only(args)
    comparison = qos_sim.compare_architectures(_sim_config(scenario, args.seed))
    return reports.to_csv(reports.comparison_frame(comparison))


def cmd_deviations(args, scenario: Scenario) -> str:
    _csv_only(args)
    return reports.to_csv(reports.ledger_frame(deviations.build_ledger(scenario)))


COMMANDS = {
    "table3": cmd_table3,
    "curves": cmd_curves,
    "gain": cmd_gain,
    "optimize": cmd_optimize,
    "budget": cmd_budget,
    "media": cmd_media,
    "tariffs": cmd_tariffs,
    "simulate": cmd_simulate,
    "compare": cmd_compare,
    "deviations": cmd_deviations,
}


def _emit(text: str, out: Optional[str]):
    if out:
        Path(out).write_text(text, encoding="utf-8", newline="\n")
        logger.info("Wrote %s", out)
    else:
        sys.stdout.write(text)


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else EXIT_VALIDATION

    setup_logging()
    try:
        scenario = parse_scenario(args.scenario)
        _emit(COMMANDS[args.command](args, scenario), args.out)
    except ValueError as exc:
        logger.error("%s", exc)
        return EXIT_VALIDATION
    except OSError as exc:
        logger.error("I/O error: %s", exc)
        return EXIT_IO
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
