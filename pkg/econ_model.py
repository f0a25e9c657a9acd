"""Net-centric factor economics: commute cost, settlement choice and the
telecom budget a worker can afford.

Amounts are exact: NCF and per-day arithmetic run on ``Fraction`` and every
monthly figure is rounded once, to integer cents, at the end. Dollar outputs
(``MonthlyCost.total_usd`` and friends) round half away from zero.
"""
import logging
import math
from fractions import Fraction
from typing import Dict, Iterable, List, Optional, Sequence

from schemas import (
    CommuteMode,
    CostParams,
    GainPoint,
    MonthlyCost,
    ResidenceOption,
    SettlementChoice,
    to_fraction,
)

logger = logging.getLogger(__name__)

DEFAULT_PARAMS = CostParams()

# Emission factors calibrated so 15,000 car miles ~ 50 commuter-jet hours.
CAR_KG_PER_MILE = 0.4
JET_KG_PER_PASSENGER_HOUR = 120.0


class NcfUndefinedError(ValueError):
    """Raised when an NCF is requested for a job with no tasks at all."""


def to_cents(amount: Fraction) -> int:
    return math.floor(amount * 100 + Fraction(1, 2))


def compute_ncf(online_tasks, offline_tasks) -> Fraction:
    """online / (offline + online), exact."""
    online, offline = to_fraction(online_tasks), to_fraction(offline_tasks)
    if online < 0 or offline < 0:
        raise ValueError(f"task counts must be non-negative, got {online_tasks}, {offline_tasks}")
    if online + offline == 0:
        raise NcfUndefinedError("NCF is undefined for a job with no tasks")
    return online / (online + offline)


def check_ncf(ncf) -> Fraction:
    value = to_fraction(ncf)
    if not 0 <= value <= 1:
        raise ValueError(f"NCF must lie in [0, 1], got {ncf}")
    return value


def commute_days(ncf, params: CostParams = DEFAULT_PARAMS) -> Fraction:
    """Commute days per month; fractional on purpose (hotel rows batch them)."""
    return params.working_days * (1 - check_ncf(ncf))


def commute_frequency(ncf, params: CostParams = DEFAULT_PARAMS) -> Fraction:
    """Commute days per five-day week (NCF 0.6 -> 2, NCF 0.8 -> 1)."""
    return commute_days(ncf, params) * 5 / params.working_days


def _fare(option: ResidenceOption, params: CostParams) -> Fraction:
    fares = params.air_fares
    mode = option.mode
    if mode == CommuteMode.CAR:
        return 2 * to_fraction(option.distance) * to_fraction(params.car_rate)
    if mode == CommuteMode.TRAM_BUS:
        return to_fraction(params.transit_fare)
    if mode in (CommuteMode.TRAIN_AIR, CommuteMode.SHORT_HAUL_AIR):
        return to_fraction(fares.short)
    if mode == CommuteMode.MID_HAUL_AIR:
        return to_fraction(fares.mid)
    if mode == CommuteMode.LONG_HAUL_AIR:
        return to_fraction(fares.long)
    return Fraction(0)


def trip_cost(option: ResidenceOption, params: CostParams = DEFAULT_PARAMS) -> Fraction:
    """Roundtrip cost including time loss, recomputed from the row inputs."""
    if option.mode == CommuteMode.WALK:
        return Fraction(0)
    time_loss = 2 * to_fraction(option.one_way_time) * to_fraction(params.time_value)
    return time_loss + _fare(option, params)


def effective_trip_cost(option: ResidenceOption, params: CostParams = DEFAULT_PARAMS) -> Fraction:
    """The trip cost the cost grid uses: the row's cell-consistent value when
    the fixture carries one, the formula otherwise."""
    if option.cell_trip_cost is not None:
        return Fraction(option.cell_trip_cost)
    return trip_cost(option, params)


def is_feasible_option(option: ResidenceOption, ncf) -> bool:
    return option.min_ncf is None or to_fraction(ncf) >= to_fraction(option.min_ncf)


def _transport(option: ResidenceOption, ncf, params: CostParams):
    """Unrounded (commute, hotel) spend for one month."""
    days = commute_days(ncf, params)
    trip = effective_trip_cost(option, params)
    if option.hotel:
        trips = days / to_fraction(params.hotel_batch)
        return trips * trip, days * to_fraction(params.hotel_rate)
    return days * trip, Fraction(0)


def monthly_cost(option: ResidenceOption, ncf, params: CostParams = DEFAULT_PARAMS) -> MonthlyCost:
    commute, hotel = _transport(option, ncf, params)
    housing = to_cents(Fraction(option.housing))
    commute_c, hotel_c = to_cents(commute), to_cents(hotel)
    return MonthlyCost(
        housing=housing,
        commute=commute_c,
        hotel=hotel_c,
        total=housing + commute_c + hotel_c,
        feasible=is_feasible_option(option, ncf),
    )


def in_place_baseline(option: ResidenceOption, params: CostParams = DEFAULT_PARAMS) -> MonthlyCost:
    """The option's own cost at its lowest feasible NCF (0 for most rows)."""
    return monthly_cost(option, option.min_ncf or 0, params)


def relocation_baseline(options: Sequence[ResidenceOption],
                        params: CostParams = DEFAULT_PARAMS) -> Optional[MonthlyCost]:
    """Cost of the best residence for a worker who never telecommutes."""
    best = optimize_settlement(options, 0, params)
    return best.cost if best else None


def feasible(option: ResidenceOption, ncf, telecom_cost, baseline: MonthlyCost,
             params: CostParams = DEFAULT_PARAMS) -> bool:
    """True when the housing+transport saving against ``baseline`` strictly
    exceeds the monthly telecom spend."""
    cost = monthly_cost(option, ncf, params)
    if not cost.feasible or not baseline.feasible:
        return False
    saving = baseline.total - cost.total
    return saving > to_fraction(telecom_cost) * 100


def telecom_budget(option: ResidenceOption, ncf, params: CostParams = DEFAULT_PARAMS,
                   baseline: Optional[MonthlyCost] = None) -> int:
    """Largest monthly telecom spend (cents) the saving still covers.

    Without an explicit baseline the option is compared with itself at its
    lowest feasible NCF.
    """
    cost = monthly_cost(option, ncf, params)
    if baseline is None:
        baseline = in_place_baseline(option, params)
    if not cost.feasible or not baseline.feasible:
        return 0
    return max(0, baseline.total - cost.total)


def gain_in_place(option: ResidenceOption, ncf, params: CostParams = DEFAULT_PARAMS,
                  relocation: Optional[MonthlyCost] = None) -> GainPoint:
    base_ncf = Fraction(0)
    flagged = False
    if not is_feasible_option(option, 0):
        base_ncf = to_fraction(option.min_ncf)
        flagged = True
        logger.debug("%s is not feasible at NCF 0; gain measured from NCF %s",
                     option.label, float(base_ncf))

    cost = monthly_cost(option, ncf, params)
    if not cost.feasible:
        gain = 0
        flagged = True
    else:
        # rounded once, so non-hotel rows match working_days x ncf x trip to the cent
        gain = to_cents(sum(_transport(option, base_ncf, params)) - sum(_transport(option, ncf, params)))

    relocation_gain = None
    if relocation is not None and cost.feasible:
        relocation_gain = relocation.total - cost.total

    return GainPoint(
        label=option.label,
        distance=option.distance,
        ncf=float(to_fraction(ncf)),
        gain=gain,
        baseline_ncf=float(base_ncf),
        flagged=flagged,
        relocation_gain=relocation_gain,
    )


def optimize_settlement(options: Sequence[ResidenceOption], ncf,
                        params: CostParams = DEFAULT_PARAMS) -> Optional[SettlementChoice]:
    """Cheapest feasible residence at this NCF; ties go to the nearer one.
    Returns None when nothing is feasible."""
    if not options:
        raise ValueError("optimize_settlement needs at least one residence option")
    best: Optional[SettlementChoice] = None
    for option in options:
        cost = monthly_cost(option, ncf, params)
        if not cost.feasible:
            continue
        if best is None or (cost.total, option.distance) < (best.cost.total, best.option.distance):
            best = SettlementChoice(option=option, cost=cost)
    if best is None:
        logger.info("No feasible residence at NCF %s", float(to_fraction(ncf)))
    else:
        logger.debug("Best residence at NCF %s: %s ($%d)",
                     float(to_fraction(ncf)), best.option.label, best.cost.total_usd)
    return best


def _within(cost: MonthlyCost, budget) -> bool:
    if isinstance(budget, float) and math.isinf(budget):
        return budget > 0
    return cost.total <= to_fraction(budget) * 100


def feasible_set(options: Iterable[ResidenceOption], ncf, budget,
                 params: CostParams = DEFAULT_PARAMS) -> List[ResidenceOption]:
    """Feasible residences whose total at ``ncf`` is within ``budget`` (USD),
    in input order."""
    chosen = []
    for option in options:
        cost = monthly_cost(option, ncf, params)
        if cost.feasible and _within(cost, budget):
            chosen.append(option)
    return chosen


def settlement_radius(options: Sequence[ResidenceOption], ncf, budget,
                      params: CostParams = DEFAULT_PARAMS) -> Optional[float]:
    """Farthest distance a worker can live at this NCF within ``budget``."""
    reachable = feasible_set(options, ncf, budget, params)
    return max((o.distance for o in reachable), default=None)


def acceptable_cells(options: Sequence[ResidenceOption], ncf_grid: Iterable,
                     params: CostParams = DEFAULT_PARAMS) -> Dict[str, List[float]]:
    """Per residence, the NCF values at which it costs no more than the best
    location for a worker who never telecommutes."""
    baseline = relocation_baseline(options, params)
    cells: Dict[str, List[float]] = {o.label: [] for o in options}
    if baseline is None:
        return cells
    budget = Fraction(baseline.total, 100)
    for ncf in ncf_grid:
        for option in feasible_set(options, ncf, budget, params):
            cells[option.label].append(float(to_fraction(ncf)))
    return cells


def gain_curve(options: Sequence[ResidenceOption], ncf_list: Sequence,
               params: CostParams = DEFAULT_PARAMS) -> List[GainPoint]:
    """gain_in_place over options x ncf_list, ordered by distance then NCF."""
    if not ncf_list or not options:
        return []
    relocation = relocation_baseline(options, params)
    points = [
        gain_in_place(option, ncf, params, relocation)
        for option in options
        for ncf in ncf_list
    ]
    return sorted(points, key=lambda p: (p.distance, p.ncf))


def carbon_compare(annual_car_miles: float, car_emission: float = CAR_KG_PER_MILE,
                   jet_emission: float = JET_KG_PER_PASSENGER_HOUR) -> float:
    """Commuter-jet hours per year emitting as much as the given car mileage."""
    if jet_emission <= 0:
        raise ValueError("jet_emission must be positive")
    return annual_car_miles * car_emission / jet_emission


def arpu_uplift(current_arpu: float, extra_charge: float) -> float:
    """ARPU multiple after adding ``extra_charge`` to a monthly account."""
    if current_arpu <= 0:
        raise ValueError("current_arpu must be positive")
    return (current_arpu + extra_charge) / current_arpu
