"""Scenario files: line-oriented ``[section]`` blocks of ``key = value`` pairs.

``#`` starts a comment. ``[residence]``, ``[tariff]``, ``[node]`` and
``[link]`` may repeat and keep file order; every other section appears at
most once. Unknown sections and keys are rejected with their line number.
"""
import logging
import re
from dataclasses import dataclass, field
from decimal import Decimal, InvalidOperation
from pathlib import Path
from typing import Dict, List, Optional, Tuple

from pydantic import ValidationError

from schemas import (
    AirFares,
    ConnectionProfile,
    CostParams,
    DurationModel,
    Link,
    MediaClass,
    ProviderNode,
    ResidenceOption,
    Scenario,
    SimConfig,
    SlaSpec,
    TariffEntry,
    TopologySpec,
)

logger = logging.getLogger(__name__)

BUNDLED_SCENARIO = Path(__file__).resolve().parent / "fixtures" / "table3.scn"

_SECTION_RE = re.compile(r"^\[\s*([A-Za-z_]+)\s*\]$")
_KEY_RE = re.compile(r"^[A-Za-z_][A-Za-z0-9_]*$")

SECTION_KEYS = {
    "params": {"time_value", "car_rate", "air_short", "air_mid", "air_long", "hotel_rate",
               "working_days", "hotel_batch", "transit_fare"},
    "grid": {"ncf"},
    "residence": {"label", "distance", "time", "housing", "mode", "hotel", "min_ncf",
                  "printed_trip_cost", "cell_trip_cost", "printed"},
    "tariff": {"media", "proximity", "pricing", "price"},
    "connection": {"down", "up", "loss", "jitter", "delay", "price_per_mbps"},
    "topology": {"architecture", "default_capacity", "default_latency_ms", "platform_margin"},
    "node": {"id", "role", "transit_price", "margin"},
    "link": {"a", "b", "capacity", "latency"},
    "sim": {"arrival_rate", "duration", "mix", "guaranteed", "overprovision", "horizon", "seed",
            "max_loss", "max_jitter", "max_delay", "sla_rebate"},
}
REPEATABLE = {"residence", "tariff", "node", "link"}


class ScenarioError(ValueError):
    """Scenario syntax or constraint error, located by line (and column)."""

    def __init__(self, message: str, line: Optional[int] = None, column: Optional[int] = None,
                 path: Optional[str] = None):
        self.message = message
        self.line = line
        self.column = column
        self.path = path
        where = ""
        if line is not None:
            where = f"line {line}" + (f", column {column}" if column is not None else "")
            where = f"{path}: {where}: " if path else f"{where}: "
        super().__init__(f"{where}{message}")


@dataclass
class Section:
    name: str
    line: int
    entries: Dict[str, Tuple[str, int]] = field(default_factory=dict)

    def get(self, key: str, default: Optional[str] = None) -> Optional[str]:
        return self.entries[key][0] if key in self.entries else default

    def require(self, key: str) -> str:
        if key not in self.entries:
            raise ScenarioError(f"[{self.name}] is missing required key {key!r}", self.line)
        return self.entries[key][0]

    def line_of(self, key: str) -> int:
        return self.entries.get(key, ("", self.line))[1]


def read_sections(text: str) -> List[Section]:
    sections: List[Section] = []
    seen_single = set()
    current: Optional[Section] = None
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        match = _SECTION_RE.match(line)
        if match:
            name = match.group(1).lower()
            if name not in SECTION_KEYS:
                raise ScenarioError(f"unknown section [{name}]", lineno, raw.index("[") + 1)
            if name not in REPEATABLE:
                if name in seen_single:
                    raise ScenarioError(f"section [{name}] appears more than once", lineno)
                seen_single.add(name)
            current = Section(name, lineno)
            sections.append(current)
            continue
        if "=" not in line:
            raise ScenarioError("expected '[section]' or 'key = value'", lineno,
                                len(raw) - len(raw.lstrip()) + 1)
        if current is None:
            raise ScenarioError("key outside of any section", lineno, 1)
        key, value = (part.strip() for part in line.split("=", 1))
        if not _KEY_RE.match(key):
            raise ScenarioError(f"invalid key {key!r}", lineno, raw.index(key[:1] or "=") + 1)
        if key not in SECTION_KEYS[current.name]:
            raise ScenarioError(f"unknown key {key!r} in [{current.name}]", lineno,
                                raw.index(key) + 1)
        if key in current.entries:
            raise ScenarioError(f"duplicate key {key!r} in [{current.name}]", lineno)
        current.entries[key] = (value, lineno)
    return sections


# ------------------------------------------------------------- value parsing

def _number(section: Section, key: str, value: str) -> float:
    try:
        return float(value)
    except ValueError:
        raise ScenarioError(f"[{section.name}] {key} must be a number, got {value!r}",
                            section.line_of(key)) from None


def _decimal(section: Section, key: str, value: str) -> Decimal:
    try:
        return Decimal(value)
    except InvalidOperation:
        raise ScenarioError(f"[{section.name}] {key} must be a number, got {value!r}",
                            section.line_of(key)) from None


def _bool(section: Section, key: str, value: str) -> bool:
    lowered = value.lower()
    if lowered in ("true", "yes", "1"):
        return True
    if lowered in ("false", "no", "0"):
        return False
    raise ScenarioError(f"[{section.name}] {key} must be true or false, got {value!r}",
                        section.line_of(key))


def _split(value: str) -> List[str]:
    return [part.strip() for part in value.split(",") if part.strip()]


def _numbers(section: Section, keys, target=float) -> dict:
    out = {}
    for key, name in keys.items():
        value = section.get(key)
        if value is not None:
            out[name] = _decimal(section, key, value) if target is Decimal else _number(section, key, value)
    return out


def _build(model, section: Section, **kwargs):
    """Construct a pydantic model, reporting the failing field by name and line."""
    try:
        return model(**kwargs)
    except ValidationError as exc:
        err = exc.errors()[0]
        loc = ".".join(str(p) for p in err["loc"]) or model.__name__
        raise ScenarioError(f"[{section.name}] invalid {loc}: {err['msg']}", section.line) from None


# ---------------------------------------------------------- section builders

def _params(section: Section) -> CostParams:
    values = _numbers(section, {"time_value": "time_value", "car_rate": "car_rate",
                                "hotel_rate": "hotel_rate", "hotel_batch": "hotel_batch",
                                "transit_fare": "transit_fare"})
    fares = _numbers(section, {"air_short": "short", "air_mid": "mid", "air_long": "long"})
    if section.get("working_days") is not None:
        days = _number(section, "working_days", section.get("working_days"))
        if days != int(days):
            raise ScenarioError("[params] working_days must be an integer", section.line_of("working_days"))
        values["working_days"] = int(days)
    fares_model = _build(AirFares, section, **fares)
    return _build(CostParams, section, air_fares=fares_model, **values)


def _grid(section: Section) -> List[float]:
    return [_number(section, "ncf", v) for v in _split(section.require("ncf"))]


def _residence(section: Section) -> Tuple[ResidenceOption, List[str]]:
    kwargs = dict(
        label=section.require("label"),
        distance=_number(section, "distance", section.require("distance")),
        one_way_time=_number(section, "time", section.require("time")),
        housing=_number(section, "housing", section.require("housing")),
        mode=section.require("mode"),
        hotel=_bool(section, "hotel", section.get("hotel", "false")),
    )
    for key in ("min_ncf",):
        if section.get(key) is not None:
            kwargs[key] = _number(section, key, section.get(key))
    for key in ("printed_trip_cost", "cell_trip_cost"):
        if section.get(key) is not None:
            kwargs[key] = int(_number(section, key, section.get(key)))
    if kwargs["housing"] != int(kwargs["housing"]):
        raise ScenarioError("[residence] housing must be whole dollars", section.line_of("housing"))
    kwargs["housing"] = int(kwargs["housing"])
    option = _build(ResidenceOption, section, **kwargs)
    return option, _split(section.get("printed", ""))


def _tariff(section: Section) -> TariffEntry:
    kwargs = dict(media=section.require("media"), proximity=section.require("proximity"),
                  pricing=section.require("pricing"))
    if section.get("price") is not None:
        kwargs["price"] = _decimal(section, "price", section.get("price"))
    return _build(TariffEntry, section, **kwargs)


def _connection(section: Section) -> ConnectionProfile:
    values = _numbers(section, {k: k for k in SECTION_KEYS["connection"]})
    return _build(ConnectionProfile, section, **values)


def _node(section: Section) -> ProviderNode:
    kwargs = dict(id=section.require("id"), role=section.require("role"))
    kwargs.update(_numbers(section, {"transit_price": "transit_price", "margin": "margin"}, Decimal))
    return _build(ProviderNode, section, **kwargs)


def _link(section: Section) -> Link:
    kwargs = dict(endpoints=(section.require("a"), section.require("b")),
                  capacity=_number(section, "capacity", section.require("capacity")))
    if section.get("latency") is not None:
        kwargs["base_latency"] = _number(section, "latency", section.get("latency"))
    return _build(Link, section, **kwargs)


def _topology(section: Section, nodes: List[ProviderNode], links: List[Link]) -> TopologySpec:
    kwargs = dict(architecture=section.require("architecture"), nodes=nodes, links=links)
    kwargs.update(_numbers(section, {"default_capacity": "default_capacity",
                                     "default_latency_ms": "default_latency_ms"}))
    kwargs.update(_numbers(section, {"platform_margin": "platform_margin"}, Decimal))
    return _build(TopologySpec, section, **kwargs)


def _duration(section: Section) -> DurationModel:
    value = section.get("duration")
    if value is None:
        return DurationModel()
    parts = value.split()
    if len(parts) != 2:
        raise ScenarioError("[sim] duration must be 'Fixed <minutes>' or 'Exponential <minutes>'",
                            section.line_of("duration"))
    return _build(DurationModel, section, kind=parts[0],
                  minutes=_number(section, "duration", parts[1]))


def _mix(section: Section) -> Dict[MediaClass, float]:
    value = section.get("mix")
    if value is None:
        return {MediaClass.VISUAL: 1.0}
    mix = {}
    for item in _split(value):
        name, _, weight = item.partition(":")
        try:
            media = MediaClass(name.strip())
        except ValueError:
            raise ScenarioError(f"[sim] unknown media class {name.strip()!r}",
                                section.line_of("mix")) from None
        mix[media] = _number(section, "mix", weight or "1")
    return mix


def _sim(section: Section, topology: TopologySpec) -> SimConfig:
    kwargs = dict(
        topology=topology,
        arrival_rate=_number(section, "arrival_rate", section.require("arrival_rate")),
        horizon=int(_number(section, "horizon", section.require("horizon"))),
        duration_model=_duration(section),
        media_mix=_mix(section),
    )
    if section.get("guaranteed") is not None:
        kwargs["guaranteed"] = _bool(section, "guaranteed", section.get("guaranteed"))
    for key in ("overprovision", "sla_rebate"):
        if section.get(key) is not None:
            kwargs[key] = _number(section, key, section.get(key))
    if section.get("seed") is not None:
        kwargs["seed"] = int(_number(section, "seed", section.get("seed")))
    sla = _numbers(section, {"max_loss": "max_loss", "max_jitter": "max_jitter",
                             "max_delay": "max_delay"})
    kwargs["sla"] = _build(SlaSpec, section, **sla)
    return _build(SimConfig, section, **kwargs)


def _read_text(path) -> str:
    return Path(path).read_text(encoding="utf-8")


def parse_scenario_text(text: str, path: Optional[str] = None) -> Scenario:
    try:
        return _parse(read_sections(text))
    except ScenarioError as exc:
        if path and exc.path is None:
            raise ScenarioError(exc.message, exc.line, exc.column, path) from None
        raise


def parse_scenario(path) -> Scenario:
    """Read and fully validate a scenario file."""
    scenario = parse_scenario_text(_read_text(path), str(path))
    logger.info("Loaded scenario %s: %d residences, %d NCF values",
                path, len(scenario.residences), len(scenario.ncf_grid))
    return scenario


def _parse(sections: List[Section]) -> Scenario:
    by_name: Dict[str, List[Section]] = {}
    for section in sections:
        by_name.setdefault(section.name, []).append(section)

    for required in ("grid", "residence"):
        if required not in by_name:
            raise ScenarioError(f"missing section [{required}]")

    params = _params(by_name["params"][0]) if "params" in by_name else CostParams()
    grid_section = by_name["grid"][0]
    grid = _grid(grid_section)

    residences, printed_cells = [], {}
    labels = set()
    for section in by_name["residence"]:
        option, printed = _residence(section)
        if option.label in labels:
            raise ScenarioError(f"duplicate residence label {option.label!r}", section.line)
        labels.add(option.label)
        residences.append(option)
        cells = {}
        if printed:
            if len(printed) != len(grid):
                raise ScenarioError(
                    f"[residence] printed has {len(printed)} values for {len(grid)} NCF columns",
                    section.line_of("printed"))
            cells = {f"{ncf:g}": value for ncf, value in zip(grid, printed)}
        if option.printed_trip_cost is not None:
            cells["trip_cost"] = str(option.printed_trip_cost)
        if cells:
            printed_cells[option.label] = cells

    tariffs = [_tariff(s) for s in by_name.get("tariff", [])]
    connection = _connection(by_name["connection"][0]) if "connection" in by_name else None

    sim = None
    if "sim" in by_name:
        if "topology" not in by_name:
            raise ScenarioError("missing section [topology] (required by [sim])")
        nodes = [_node(s) for s in by_name.get("node", [])]
        links = [_link(s) for s in by_name.get("link", [])]
        topology = _topology(by_name["topology"][0], nodes, links)
        sim = _sim(by_name["sim"][0], topology)

    try:
        return Scenario(cost_params=params, residences=residences, ncf_grid=grid,
                        tariff_overrides=tariffs, connection=connection, sim=sim,
                        printed_cells=printed_cells)
    except ValidationError as exc:
        err = exc.errors()[0]
        loc = ".".join(str(p) for p in err["loc"])
        line = grid_section.line if loc.startswith("ncf_grid") else None
        raise ScenarioError(f"invalid {loc}: {err['msg']}", line) from None


def parse_tariff_file(path) -> List[TariffEntry]:
    """[tariff] sections of an override file (no other sections allowed)."""
    sections = read_sections(_read_text(path))
    others = [s for s in sections if s.name != "tariff"]
    if others:
        raise ScenarioError(f"tariff override files only hold [tariff] sections, found [{others[0].name}]",
                            others[0].line, path=str(path))
    return [_tariff(s) for s in sections]
