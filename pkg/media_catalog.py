"""Media classes, bandwidth floors and proximity tariffs for network-based
exchanges, plus the in-person costs they replace.

The bundled tables are immutable; ``load_tariffs`` layers an override file on
top of a copy for experiments.
"""
import logging
from decimal import Decimal
from types import MappingProxyType
from typing import Dict, Iterable, List, Optional, Set, Tuple

from config import settings
from schemas import (
    Bound,
    ConnectionProfile,
    InPersonExchange,
    MediaClass,
    MediaCost,
    MediaProfile,
    Pricing,
    ProximityTier,
    QosTier,
    Reliability,
    SlaSpec,
    TariffEntry,
    TierThresholds,
)

logger = logging.getLogger(__name__)

PROFILES = MappingProxyType({
    MediaClass.MESSAGE: MediaProfile(
        media=MediaClass.MESSAGE, application="IM/SMS", min_mbps=(0.0, 0.0),
        payload_bytes=160, qos_tier=QosTier.LOW, reliability=Reliability.MEDIUM),
    MediaClass.VERBAL: MediaProfile(
        media=MediaClass.VERBAL, application="Phone", min_mbps=(0.009, 0.009),
        qos_tier=QosTier.HIGH, reliability=Reliability.HIGH),
    MediaClass.VISUAL: MediaProfile(
        media=MediaClass.VISUAL, application="Video Stream", min_mbps=(0.2, 2.0),
        qos_tier=QosTier.MEDIUM, reliability=Reliability.LOW),
    MediaClass.TELEPRESENCE: MediaProfile(
        media=MediaClass.TELEPRESENCE, application="Telepresence", min_mbps=(2.0, 4.0),
        qos_tier=QosTier.HIGH, reliability=Reliability.HIGH),
    MediaClass.RICH_MULTIMODAL: MediaProfile(
        media=MediaClass.RICH_MULTIMODAL, application="Virtual Reality, 3D Video",
        min_mbps=(5.0, 20.0), qos_tier=QosTier.VERY_HIGH, reliability=Reliability.HIGH),
})


def _t(media, proximity, pricing, price="0"):
    return TariffEntry(media=media, proximity=proximity, pricing=pricing, price=Decimal(price))


_M, _V, _VI, _T, _R = (MediaClass.MESSAGE, MediaClass.VERBAL, MediaClass.VISUAL,
                       MediaClass.TELEPRESENCE, MediaClass.RICH_MULTIMODAL)
_LAN, _METRO, _NAT, _INTL = (ProximityTier.LOCAL_LAN, ProximityTier.METRO_DSL,
                             ProximityTier.NATIONAL_MOBILE, ProximityTier.INTERNATIONAL_MOBILE)

# "~$0" metro entries are Free; leased-line prices stay per minute as printed.
_TABLE_II = (
    [_t(m, _LAN, Pricing.FREE) for m in MediaClass]
    + [
        _t(_M, _METRO, Pricing.FREE),
        _t(_V, _METRO, Pricing.FREE),
        _t(_VI, _METRO, Pricing.FREE),
        _t(_T, _METRO, Pricing.PER_MINUTE, "0.5"),
        _t(_R, _METRO, Pricing.PER_MINUTE, "10"),
        _t(_M, _NAT, Pricing.PER_MESSAGE, "0.1"),
        _t(_V, _NAT, Pricing.PER_MINUTE, "0.25"),
        _t(_VI, _NAT, Pricing.PER_MINUTE, "0.05"),
        _t(_T, _NAT, Pricing.NOT_SUPPORTED),
        _t(_R, _NAT, Pricing.NOT_SUPPORTED),
        _t(_M, _INTL, Pricing.PER_MESSAGE, "0.5"),
        _t(_V, _INTL, Pricing.PER_MINUTE, "4"),
        _t(_VI, _INTL, Pricing.PER_MINUTE, "10"),
        _t(_T, _INTL, Pricing.NOT_SUPPORTED),
        _t(_R, _INTL, Pricing.NOT_SUPPORTED),
    ]
)

IN_PERSON = MappingProxyType({
    _M: InPersonExchange(media=_M, setting="Written memo or note", per_letter=Decimal("0.44")),
    _V: InPersonExchange(media=_V, setting="Conversation", per_mile=Decimal("0.5")),
    _VI: InPersonExchange(media=_VI, setting="Face-to-face meeting", per_mile=Decimal("0.5")),
    _T: InPersonExchange(media=_T, setting="Lunch, hallway talk, brainstorm session",
                         per_mile=Decimal("0.5")),
    _R: InPersonExchange(media=_R, setting="Lunch, hallway talk, brainstorm session",
                         per_mile=Decimal("0.5")),
})


class TariffBook:
    """Total (media, proximity) -> TariffEntry lookup."""

    def __init__(self, entries: Iterable[TariffEntry]):
        table: Dict[Tuple[MediaClass, ProximityTier], TariffEntry] = {}
        for entry in entries:
            table[(entry.media, entry.proximity)] = entry
        missing = [(m.value, p.value) for m in MediaClass for p in ProximityTier
                   if (m, p) not in table]
        if missing:
            raise ValueError(f"tariff table is missing entries for {missing}")
        self._table = MappingProxyType(table)

    def tariff(self, media: MediaClass, proximity: ProximityTier) -> TariffEntry:
        return self._table[(media, proximity)]

    def entries(self) -> List[TariffEntry]:
        return list(self._table.values())

    def with_overrides(self, overrides: Iterable[TariffEntry]) -> "TariffBook":
        overrides = list(overrides)
        if overrides:
            logger.info("Applying %d tariff override(s)", len(overrides))
        return TariffBook(self.entries() + overrides)


DEFAULT_TARIFFS = TariffBook(_TABLE_II)


def load_tariffs(override_path: Optional[str] = None) -> TariffBook:
    """Bundled tariffs, with the override file's [tariff] sections on top."""
    path = override_path if override_path is not None else settings.tariff_override_path
    if not path:
        return DEFAULT_TARIFFS
    from scenario import parse_tariff_file
    return DEFAULT_TARIFFS.with_overrides(parse_tariff_file(path))


def profile(media: MediaClass) -> MediaProfile:
    return PROFILES[media]


def tariff(media: MediaClass, proximity: ProximityTier,
           book: TariffBook = DEFAULT_TARIFFS) -> TariffEntry:
    return book.tariff(media, proximity)


def _floor_mbps(media: MediaClass, bound: Bound) -> float:
    p = PROFILES[media]
    if p.payload_bytes is not None:
        return settings.message_rate_mbps
    return p.bandwidth(bound)


def required_access(media: MediaClass, overprovision: float = 1.0,
                    bound: Bound = Bound.HIGH_END) -> float:
    """Access speed (Mbps) needed to carry ``media`` with the given factor."""
    if overprovision < 1:
        raise ValueError(f"overprovision must be >= 1, got {overprovision}")
    return _floor_mbps(media, bound) * overprovision


def _rtt(conn: ConnectionProfile) -> float:
    return conn.delay * 2 if settings.delay_metric == "one_way" else conn.delay


def qos_tier_satisfied(conn: ConnectionProfile, sla: SlaSpec = SlaSpec(),
                       thresholds: Optional[TierThresholds] = None) -> QosTier:
    """Highest QoS tier a best-effort connection sustains."""
    thresholds = thresholds or settings.tier_thresholds
    meets_sla = (conn.loss <= sla.max_loss
                 and conn.jitter <= sla.max_jitter
                 and _rtt(conn) <= sla.max_delay)
    if meets_sla and conn.jitter <= thresholds.very_high_max_jitter_ms:
        return QosTier.VERY_HIGH
    if meets_sla:
        return QosTier.HIGH
    if conn.loss <= thresholds.medium_max_loss_pct:
        return QosTier.MEDIUM
    return QosTier.LOW


def feasible_media(conn: ConnectionProfile, overprovision: float = 1.0,
                   sla: SlaSpec = SlaSpec(), guaranteed: bool = False,
                   thresholds: Optional[TierThresholds] = None) -> Set[MediaClass]:
    factor = 1.0 if guaranteed else overprovision
    tier = QosTier.VERY_HIGH if guaranteed else qos_tier_satisfied(conn, sla, thresholds)
    result = set()
    for media in MediaClass:
        if media == MediaClass.MESSAGE:
            # no over-provisioning: any nonzero link carries messages
            if conn.down > 0 or not settings.message_needs_link:
                result.add(media)
            continue
        if conn.down < required_access(media, factor, Bound.HIGH_END):
            continue
        if PROFILES[media].qos_tier <= tier:
            result.add(media)
    logger.debug("Feasible media at %.3g Mbps (guaranteed=%s, x%s): %s",
                 conn.down, guaranteed, factor, sorted(m.value for m in result))
    return result


def monthly_media_cost(mix: Iterable[Tuple[MediaClass, ProximityTier, float]],
                       book: TariffBook = DEFAULT_TARIFFS) -> MediaCost:
    """Monthly telecom spend for a usage mix (minutes or messages per month)."""
    total = Decimal("0")
    unsupported = []
    for media, proximity, usage in mix:
        if usage < 0:
            raise ValueError(f"usage must be >= 0, got {usage} for {media.value}")
        entry = book.tariff(media, proximity)
        if entry.pricing == Pricing.NOT_SUPPORTED:
            unsupported.append((media, proximity))
            continue
        total += entry.price * Decimal(str(usage))
    if unsupported:
        logger.info("Media mix includes unsupported entries: %s", unsupported)
    return MediaCost(total=total, feasible=not unsupported, unsupported=unsupported)


def in_person_cost(media: MediaClass, miles: float = 0, letters: int = 0) -> Decimal:
    """Delivery cost of the face-to-face (or paper) version of an exchange."""
    exchange = IN_PERSON[media]
    return exchange.per_letter * letters + exchange.per_mile * Decimal(str(miles))


def access_cost(conn: ConnectionProfile) -> Decimal:
    """Monthly access charge: purchased downstream speed x price per Mbps."""
    return Decimal(str(conn.down)) * Decimal(str(conn.price_per_mbps))


def required_access_cost(media: MediaClass, overprovision: float, price_per_mbps: float,
                         bound: Bound = Bound.HIGH_END) -> Decimal:
    speed = required_access(media, overprovision, bound)
    return Decimal(str(speed)) * Decimal(str(price_per_mbps))
