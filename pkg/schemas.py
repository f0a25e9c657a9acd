"""Domain types shared by the economics core, the media catalog, the QoS
simulator and the scenario/CLI layer."""
from __future__ import annotations

from decimal import Decimal
from enum import Enum, IntEnum
from fractions import Fraction
from typing import Dict, List, Optional, Tuple

from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

import config


def to_fraction(value) -> Fraction:
    """Exact rational for a float/str/Decimal/int input (0.95 -> 19/20)."""
    if isinstance(value, Fraction):
        return value
    if isinstance(value, float):
        return Fraction(str(value))
    return Fraction(value)


def cents_to_dollars(cents: int) -> int:
    """Whole dollars, half away from zero (the granularity of the printed grid)."""
    sign = -1 if cents < 0 else 1
    return sign * ((abs(cents) + 50) // 100)


# ---------------------------------------------------------------- economics

class CommuteMode(str, Enum):
    WALK = "Walk"
    TRAM_BUS = "TramBus"
    CAR = "Car"
    TRAIN_AIR = "TrainAir"
    SHORT_HAUL_AIR = "ShortHaulAir"
    MID_HAUL_AIR = "MidHaulAir"
    LONG_HAUL_AIR = "LongHaulAir"

    @property
    def is_air(self) -> bool:
        return self in AIR_MODES


AIR_MODES = frozenset({
    CommuteMode.TRAIN_AIR,
    CommuteMode.SHORT_HAUL_AIR,
    CommuteMode.MID_HAUL_AIR,
    CommuteMode.LONG_HAUL_AIR,
})


class AirFares(BaseModel):
    model_config = ConfigDict(frozen=True)

    short: float = Field(200, gt=0)
    mid: float = Field(600, gt=0)
    long: float = Field(1500, gt=0)


class CostParams(BaseModel):
    model_config = ConfigDict(frozen=True)

    time_value: float = Field(0.5, gt=0)      # USD/minute
    car_rate: float = Field(0.5, gt=0)        # USD/mile
    air_fares: AirFares = Field(default_factory=AirFares)
    hotel_rate: float = Field(200, gt=0)      # USD/night
    working_days: int = Field(20, ge=1, le=31)
    hotel_batch: float = Field(4, gt=0)       # commute days per trip on hotel rows
    transit_fare: float = Field(5, gt=0)      # USD/roundtrip on top of time loss


class ResidenceOption(BaseModel):
    model_config = ConfigDict(frozen=True)

    label: str
    distance: float = Field(ge=0)             # miles
    one_way_time: float = Field(ge=0)         # minutes
    housing: int = Field(gt=0)                # USD/month
    mode: CommuteMode
    hotel: bool = False
    min_ncf: Optional[float] = Field(None, ge=0, le=1)
    # Printed "Cost*" column, and the value the printed cells were computed
    # with when the two disagree.
    printed_trip_cost: Optional[int] = None
    cell_trip_cost: Optional[int] = None

    @model_validator(mode="after")
    def _hotel_needs_air(self):
        if self.hotel and not self.mode.is_air:
            raise ValueError(f"residence {self.label!r}: hotel requires an air mode, got {self.mode.value}")
        return self


class MonthlyCost(BaseModel):
    """Monthly housing + transport, all amounts in integer cents."""
    model_config = ConfigDict(frozen=True)

    housing: int
    commute: int
    hotel: int
    total: int
    feasible: bool = True

    @property
    def total_usd(self) -> int:
        return cents_to_dollars(self.total)


class GainPoint(BaseModel):
    model_config = ConfigDict(frozen=True)

    label: str
    distance: float
    ncf: float
    gain: int                                  # cents/month, in place
    baseline_ncf: float = 0.0
    flagged: bool = False                      # baseline moved to the row's min feasible NCF
    relocation_gain: Optional[int] = None      # S_v against the best NCF-0 residence

    @property
    def gain_usd(self) -> int:
        return cents_to_dollars(self.gain)


class SettlementChoice(BaseModel):
    model_config = ConfigDict(frozen=True)

    option: ResidenceOption
    cost: MonthlyCost


# -------------------------------------------------------------------- media

class MediaClass(str, Enum):
    MESSAGE = "Message"
    VERBAL = "Verbal"
    VISUAL = "Visual"
    TELEPRESENCE = "Telepresence"
    RICH_MULTIMODAL = "RichMultimodal"


class QosTier(IntEnum):
    LOW = 1
    MEDIUM = 2
    HIGH = 3
    VERY_HIGH = 4


class Reliability(str, Enum):
    LOW = "Low"
    MEDIUM = "Medium"
    HIGH = "High"


class Bound(str, Enum):
    LOW_END = "LowEnd"
    HIGH_END = "HighEnd"


class MediaProfile(BaseModel):
    model_config = ConfigDict(frozen=True)

    media: MediaClass
    application: str
    min_mbps: Tuple[float, float]
    payload_bytes: Optional[int] = None        # Message only
    qos_tier: QosTier
    reliability: Reliability

    @field_validator("min_mbps")
    @classmethod
    def _ordered(cls, value):
        low, high = value
        if low < 0 or low > high:
            raise ValueError(f"bandwidth range must satisfy 0 <= low <= high, got {value}")
        return value

    def bandwidth(self, bound: Bound) -> float:
        return self.min_mbps[0] if bound == Bound.LOW_END else self.min_mbps[1]


class ProximityTier(str, Enum):
    LOCAL_LAN = "LocalLan"
    METRO_DSL = "MetroDsl"
    NATIONAL_MOBILE = "NationalMobile"
    INTERNATIONAL_MOBILE = "InternationalMobile"

    @property
    def is_mobile(self) -> bool:
        return self in (ProximityTier.NATIONAL_MOBILE, ProximityTier.INTERNATIONAL_MOBILE)


class Pricing(str, Enum):
    FREE = "Free"
    PER_MESSAGE = "FlatPerMessage"
    PER_MINUTE = "PerMinute"
    NOT_SUPPORTED = "NotSupported"


class TariffEntry(BaseModel):
    model_config = ConfigDict(frozen=True)

    media: MediaClass
    proximity: ProximityTier
    pricing: Pricing
    price: Decimal = Decimal("0")              # USD per message or per minute

    @model_validator(mode="after")
    def _price_matches_pricing(self):
        if self.price < 0:
            raise ValueError("tariff price must be >= 0")
        if self.pricing in (Pricing.FREE, Pricing.NOT_SUPPORTED) and self.price != 0:
            raise ValueError(f"{self.pricing.value} tariff cannot carry a price")
        if self.proximity == ProximityTier.LOCAL_LAN and self.pricing != Pricing.FREE:
            raise ValueError("LocalLan tariffs are always Free")
        if (self.proximity.is_mobile
                and self.media in (MediaClass.TELEPRESENCE, MediaClass.RICH_MULTIMODAL)
                and self.pricing != Pricing.NOT_SUPPORTED):
            raise ValueError(f"{self.media.value} is not supported on mobile tiers")
        return self


class InPersonExchange(BaseModel):
    model_config = ConfigDict(frozen=True)

    media: MediaClass
    setting: str
    per_letter: Decimal = Decimal("0")
    per_mile: Decimal = Decimal("0")


class ConnectionProfile(BaseModel):
    model_config = ConfigDict(frozen=True)

    down: float = Field(ge=0)                  # Mbps
    up: float = Field(0, ge=0)
    loss: float = Field(0, ge=0, le=100)       # percent
    jitter: float = Field(0, ge=0)             # ms
    delay: float = Field(0, ge=0)              # ms, one-way or RTT per settings.delay_metric
    price_per_mbps: float = Field(0, ge=0)     # USD/month


class SlaSpec(BaseModel):
    model_config = ConfigDict(frozen=True)

    max_loss: float = Field(0.2, gt=0)         # percent
    max_jitter: float = Field(10, gt=0)        # ms
    max_delay: float = Field(200, gt=0)        # ms


class TierThresholds(BaseModel):
    model_config = ConfigDict(frozen=True)

    medium_max_loss_pct: float = Field(1.0, gt=0)
    very_high_max_jitter_ms: float = Field(5.0, gt=0)


class MediaCost(BaseModel):
    model_config = ConfigDict(frozen=True)

    total: Decimal = Decimal("0")              # USD/month
    feasible: bool = True
    unsupported: List[Tuple[MediaClass, ProximityTier]] = Field(default_factory=list)


# -------------------------------------------------------------- simulation

class ProviderRole(str, Enum):
    LAST_MILE_ISP = "LastMileIsp"
    TRANSIT_ISP = "TransitIsp"
    CDN_OPERATOR = "CdnOperator"
    CONTENT_PLATFORM = "ContentPlatform"
    CORPORATION = "Corporation"


class Architecture(str, Enum):
    CDN_BASED = "CdnBased"
    WALLED_GARDEN = "WalledGarden"
    GENERAL_CHAIN = "GeneralChain"


class ProviderNode(BaseModel):
    model_config = ConfigDict(frozen=True)

    id: str
    role: ProviderRole
    transit_price: Decimal = Field(Decimal("0"), ge=0)   # USD per Mbps-minute
    margin: Decimal = Field(Decimal("0"), ge=0, lt=1)


class Link(BaseModel):
    model_config = ConfigDict(frozen=True)

    endpoints: Tuple[str, str]
    capacity: float = Field(gt=0)              # Mbps
    base_latency: float = Field(0, ge=0)       # ms one-way

    @property
    def id(self) -> str:
        return f"{self.endpoints[0]}--{self.endpoints[1]}"


class TopologySpec(BaseModel):
    """Topology section of a scenario; links missing from the section are
    generated with the default capacity and latency."""
    model_config = ConfigDict(frozen=True)

    architecture: Architecture
    nodes: List[ProviderNode]
    links: List[Link] = Field(default_factory=list)
    default_capacity: float = Field(100.0, gt=0)
    default_latency_ms: float = Field(10.0, ge=0)
    platform_margin: Decimal = Field(Decimal("0"), ge=0, lt=1)


class SessionRequest(BaseModel):
    model_config = ConfigDict(frozen=True)

    id: int
    user: str
    isp: str
    media: MediaClass
    demand: float = Field(ge=0)                # Mbps
    arrival: int = Field(ge=0)                 # minutes
    duration: int = Field(gt=0)                # minutes


class AdmissionDecision(BaseModel):
    model_config = ConfigDict(frozen=True)

    accepted: bool
    effective_demand: float
    path: List[str] = Field(default_factory=list)
    blocked_by: Optional[str] = None


class ReservationState(str, Enum):
    ACTIVE = "Active"
    COMPLETED = "Completed"
    REJECTED = "Rejected"
    SLA_VIOLATED = "SlaViolated"


class Reservation(BaseModel):
    session_id: int
    isp: str
    path: List[str]
    reserved: float
    start: int
    end: int
    guaranteed: bool
    state: ReservationState = ReservationState.ACTIVE
    peak_utilization: float = 0.0
    truncated: bool = False                    # force-completed at the horizon

    @property
    def duration(self) -> int:
        return self.end - self.start


class SlaVerdict(BaseModel):
    model_config = ConfigDict(frozen=True)

    passed: bool
    reasons: List[str] = Field(default_factory=list)
    delay_ms: float = 0.0
    loss_pct: float = 0.0
    jitter_ms: float = 0.0

    @property
    def reason(self) -> Optional[str]:
        return self.reasons[0] if self.reasons else None


class BillingCycle(str, Enum):
    ISP_TO_CDN = "IspToCdn"
    CDN_TO_CORP = "CdnToCorp"
    ISP_TO_CORP = "IspToCorp"


class BillingRecord(BaseModel):
    model_config = ConfigDict(frozen=True)

    payer: str
    payee: str
    amount: Decimal = Field(ge=0)
    cycle: BillingCycle
    session_id: int
    sla_violated: bool = False


class DegradationModel(BaseModel):
    model_config = ConfigDict(frozen=True)

    loss_knee: float = 0.7
    loss_span: float = Field(0.3, gt=0)
    loss_peak_pct: float = 2.0
    jitter_base_ms: float = 5.0
    jitter_gain_ms: float = 50.0


class DurationKind(str, Enum):
    FIXED = "Fixed"
    EXPONENTIAL = "Exponential"


class DurationModel(BaseModel):
    model_config = ConfigDict(frozen=True)

    kind: DurationKind = DurationKind.FIXED
    minutes: float = Field(30, gt=0)           # fixed length or exponential mean


class SimConfig(BaseModel):
    model_config = ConfigDict(frozen=True)

    topology: TopologySpec
    arrival_rate: float = Field(ge=0)          # sessions/hour
    duration_model: DurationModel = Field(default_factory=DurationModel)
    media_mix: Dict[MediaClass, float] = Field(default_factory=lambda: {MediaClass.VISUAL: 1.0})
    guaranteed: bool = True
    overprovision: float = Field(1.0, ge=1)
    sla: SlaSpec = Field(default_factory=SlaSpec)
    horizon: int = Field(gt=0)                 # minutes
    # unset fields follow the process settings at construction time
    seed: int = Field(default_factory=lambda: config.settings.default_seed)
    degradation: DegradationModel = Field(default_factory=lambda: config.settings.degradation)
    sla_rebate: float = Field(default_factory=lambda: config.settings.sla_rebate, ge=0, le=1,
                              validate_default=True)

    @field_validator("media_mix")
    @classmethod
    def _positive_mix(cls, value):
        if not value or any(w < 0 for w in value.values()) or sum(value.values()) <= 0:
            raise ValueError("media_mix needs non-negative weights with a positive sum")
        return value


class SimReport(BaseModel):
    architecture: Architecture
    seed: int
    offered: int
    admitted: int
    rejected: int
    acceptance_ratio: float
    sla_violations: int
    sla_violation_rate: float
    forced_completions: int
    platform_count: int
    revenue: Dict[str, Decimal]                # net per party (inflow - outflow)
    peak_utilization: Dict[str, float]
    mean_utilization: Dict[str, float]
    ledger: List[BillingRecord] = Field(default_factory=list)
    arrivals: List[Tuple[int, int, str]] = Field(default_factory=list)  # (session, minute, isp)


class ArchitectureComparison(BaseModel):
    cdn_based: SimReport
    walled_garden: SimReport

    @property
    def platform_counts(self) -> Tuple[int, int]:
        return self.walled_garden.platform_count, self.cdn_based.platform_count


# ------------------------------------------------------------- scenario/cli

class DeviationEntry(BaseModel):
    model_config = ConfigDict(frozen=True)

    reference: str                             # "<row label> / <column>"
    paper_value: str
    recomputed_value: str
    note: str


class Scenario(BaseModel):
    cost_params: CostParams = Field(default_factory=CostParams)
    residences: List[ResidenceOption]
    ncf_grid: List[float]
    tariff_overrides: List[TariffEntry] = Field(default_factory=list)
    connection: Optional[ConnectionProfile] = None
    sim: Optional[SimConfig] = None
    printed_cells: Dict[str, Dict[str, str]] = Field(default_factory=dict)  # label -> column -> printed

    @field_validator("residences")
    @classmethod
    def _at_least_one(cls, value):
        if not value:
            raise ValueError("scenario needs at least one residence")
        return value

    @field_validator("ncf_grid")
    @classmethod
    def _strictly_increasing(cls, value):
        if not value:
            raise ValueError("ncf_grid must not be empty")
        for v in value:
            if not 0 <= v <= 1:
                raise ValueError(f"ncf_grid value {v} outside [0, 1]")
        for a, b in zip(value, value[1:]):
            if b <= a:
                raise ValueError(f"ncf_grid must be strictly increasing ({a} then {b})")
        return value
