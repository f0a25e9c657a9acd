"""Discrete-event simulator for inter-provider QoS sessions.

Two architectures carry interactive corporate content to remote workers:
content hosted on a CDN that peers with every last-mile ISP (two billing
cycles), or one content platform inside each ISP's walled garden (one cycle).
A general N-provider chain is supported for comparison.

Timestamps are integer minutes. Arrivals come from numpy's PCG64 generator:
only its uniform doubles are used, turned into exponential variates by
inverse transform, so a seed reproduces the same stream everywhere.
"""
import heapq
import logging
import math
from collections import deque
from decimal import ROUND_HALF_UP, Decimal
from typing import Dict, List, Optional, Tuple

import numpy as np
from pydantic import BaseModel

from config import settings
from media_catalog import PROFILES
from schemas import (
    AdmissionDecision,
    Architecture,
    ArchitectureComparison,
    BillingCycle,
    BillingRecord,
    DegradationModel,
    DurationKind,
    Link,
    MediaClass,
    ProviderNode,
    ProviderRole,
    Reservation,
    ReservationState,
    SessionRequest,
    SimConfig,
    SimReport,
    SlaSpec,
    SlaVerdict,
    TopologySpec,
)

logger = logging.getLogger(__name__)

CENT = Decimal("0.01")
EPS = 1e-9

# Same-minute ordering: releases free capacity before new arrivals are admitted.
_DEPART, _ARRIVE = 0, 1


class TopologyError(ValueError):
    """Invalid provider topology (roles, ids or connectivity)."""


class Topology(BaseModel):
    architecture: Architecture
    nodes: Dict[str, ProviderNode]
    links: Dict[str, Link]
    paths: Dict[str, List[str]]               # last-mile ISP id -> ordered link ids
    targets: Dict[str, str]                   # last-mile ISP id -> content host id
    corporation: str

    @property
    def isps(self) -> List[str]:
        return sorted(n.id for n in self.nodes.values() if n.role == ProviderRole.LAST_MILE_ISP)

    def role_ids(self, role: ProviderRole) -> List[str]:
        return sorted(n.id for n in self.nodes.values() if n.role == role)

    @property
    def platform_count(self) -> int:
        if self.architecture == Architecture.WALLED_GARDEN:
            return len(self.role_ids(ProviderRole.CONTENT_PLATFORM))
        if self.architecture == Architecture.CDN_BASED:
            return len(self.role_ids(ProviderRole.CDN_OPERATOR))
        return 1

    def path_nodes(self, isp: str) -> List[str]:
        """Node ids along an ISP's path, ISP first."""
        nodes = [isp]
        for link_id in self.paths[isp]:
            a, b = self.links[link_id].endpoints
            nodes.append(b if a == nodes[-1] else a)
        return nodes


# ----------------------------------------------------------------- topology

def _link_between(links: List[Link], a: str, b: str) -> Optional[Link]:
    for link in links:
        if set(link.endpoints) == {a, b}:
            return link
    return None


def _shortest_path(start: str, goal: str, links: Dict[str, Link]) -> Optional[List[str]]:
    adjacency: Dict[str, List[Tuple[str, str]]] = {}
    for link_id, link in links.items():
        a, b = link.endpoints
        adjacency.setdefault(a, []).append((b, link_id))
        adjacency.setdefault(b, []).append((a, link_id))
    for neighbours in adjacency.values():
        neighbours.sort()

    previous: Dict[str, Tuple[str, str]] = {}
    seen = {start}
    queue = deque([start])
    while queue:
        node = queue.popleft()
        if node == goal:
            break
        for neighbour, link_id in adjacency.get(node, []):
            if neighbour not in seen:
                seen.add(neighbour)
                previous[neighbour] = (node, link_id)
                queue.append(neighbour)
    if goal not in seen:
        return None
    path = []
    node = goal
    while node != start:
        node, link_id = previous[node]
        path.append(link_id)
    return list(reversed(path))


def build_topology(spec: TopologySpec) -> Topology:
    nodes: Dict[str, ProviderNode] = {}
    for node in spec.nodes:
        if node.id in nodes:
            raise TopologyError(f"duplicate node id {node.id!r}")
        nodes[node.id] = node

    def ids(role):
        return sorted(n.id for n in nodes.values() if n.role == role)

    isps = ids(ProviderRole.LAST_MILE_ISP)
    corps = ids(ProviderRole.CORPORATION)
    if not isps:
        raise TopologyError("topology needs at least one LastMileIsp")
    if len(corps) != 1:
        raise TopologyError(f"topology needs exactly one Corporation, found {len(corps)}")

    links = list(spec.links)
    for link in links:
        for end in link.endpoints:
            if end not in nodes:
                raise TopologyError(f"link {link.id} references unknown node {end!r}")

    def auto_link(a, b):
        links.append(Link(endpoints=(a, b), capacity=spec.default_capacity,
                          base_latency=spec.default_latency_ms))

    targets: Dict[str, str] = {}
    if spec.architecture == Architecture.CDN_BASED:
        cdns = ids(ProviderRole.CDN_OPERATOR)
        if len(cdns) != 1:
            raise TopologyError(f"CdnBased needs exactly one CdnOperator, found {len(cdns)}")
        cdn = cdns[0]
        for isp in isps:
            # CDNs peer directly with every last-mile ISP.
            if _link_between(links, isp, cdn) is None:
                auto_link(isp, cdn)
            targets[isp] = cdn
    elif spec.architecture == Architecture.WALLED_GARDEN:
        platforms = set(ids(ProviderRole.CONTENT_PLATFORM))
        owner: Dict[str, str] = {}
        for isp in isps:
            hosted = sorted(p for p in platforms if _link_between(links, isp, p) is not None)
            if len(hosted) > 1:
                raise TopologyError(f"ISP {isp!r} has {len(hosted)} content platforms; expected one")
            if hosted:
                platform = hosted[0]
                if platform in owner:
                    raise TopologyError(
                        f"platform {platform!r} serves both {owner[platform]!r} and {isp!r}")
            else:
                platform = f"{isp}-platform"
                if platform in nodes:
                    raise TopologyError(f"duplicate node id {platform!r}")
                nodes[platform] = ProviderNode(id=platform, role=ProviderRole.CONTENT_PLATFORM,
                                               margin=spec.platform_margin)
                auto_link(isp, platform)
            owner[platform] = isp
            targets[isp] = platform
    else:
        for isp in isps:
            targets[isp] = corps[0]

    link_map: Dict[str, Link] = {}
    for link in links:
        if link.id in link_map or _link_between(list(link_map.values()), *link.endpoints):
            raise TopologyError(f"duplicate link {link.id}")
        link_map[link.id] = link

    paths: Dict[str, List[str]] = {}
    for isp in isps:
        path = _shortest_path(isp, targets[isp], link_map)
        if not path:
            raise TopologyError(f"no path from {isp!r} to {targets[isp]!r}")
        paths[isp] = path

    topo = Topology(architecture=spec.architecture, nodes=nodes, links=link_map,
                    paths=paths, targets=targets, corporation=corps[0])
    logger.debug("Built %s topology: %d nodes, %d links",
                 spec.architecture.value, len(nodes), len(link_map))
    return topo


def respec(spec: TopologySpec, architecture: Architecture) -> TopologySpec:
    """The same ISPs and corporation, re-hosted under ``architecture``.

    Each ISP keeps the capacity and latency of its link to the content host.
    """
    if spec.architecture == architecture:
        return spec
    pair = {spec.architecture, architecture}
    if pair != {Architecture.CDN_BASED, Architecture.WALLED_GARDEN}:
        raise TopologyError("architectures can only be swapped between CdnBased and WalledGarden")

    hosts = [n for n in spec.nodes
             if n.role in (ProviderRole.CDN_OPERATOR, ProviderRole.CONTENT_PLATFORM)]
    host_ids = {n.id for n in hosts}
    isps = sorted(n.id for n in spec.nodes if n.role == ProviderRole.LAST_MILE_ISP)
    kept_nodes = [n for n in spec.nodes if n.id not in host_ids]
    kept_links = [link for link in spec.links if not host_ids & set(link.endpoints)]

    def host_link(isp):
        for link in spec.links:
            if isp in link.endpoints and host_ids & set(link.endpoints):
                return link.capacity, link.base_latency
        return spec.default_capacity, spec.default_latency_ms

    margin = hosts[0].margin if hosts else spec.platform_margin
    new_nodes, new_links = [], []
    if architecture == Architecture.WALLED_GARDEN:
        for isp in isps:
            capacity, latency = host_link(isp)
            platform = f"{isp}-platform"
            new_nodes.append(ProviderNode(id=platform, role=ProviderRole.CONTENT_PLATFORM,
                                          margin=margin))
            new_links.append(Link(endpoints=(isp, platform), capacity=capacity,
                                  base_latency=latency))
    else:
        new_nodes.append(ProviderNode(id="cdn", role=ProviderRole.CDN_OPERATOR, margin=margin))
        for isp in isps:
            capacity, latency = host_link(isp)
            new_links.append(Link(endpoints=(isp, "cdn"), capacity=capacity, base_latency=latency))

    return spec.model_copy(update={
        "architecture": architecture,
        "nodes": kept_nodes + new_nodes,
        "links": kept_links + new_links,
        "platform_margin": margin,
    })


# ---------------------------------------------------------------- network

class NetworkState:
    """Reserved bandwidth per link and the sessions holding it."""

    def __init__(self, topo: Topology, guaranteed: bool = True, overprovision: float = 1.0):
        if overprovision < 1:
            raise ValueError(f"overprovision must be >= 1, got {overprovision}")
        self.topo = topo
        self.guaranteed = guaranteed
        self.overprovision = overprovision
        self.reserved: Dict[str, float] = {link_id: 0.0 for link_id in topo.links}
        self.holders: Dict[str, set] = {link_id: set() for link_id in topo.links}
        self.active: Dict[int, Reservation] = {}

    def effective_demand(self, demand: float) -> float:
        return demand if self.guaranteed else demand * self.overprovision

    def utilization(self, link_id: str) -> float:
        return self.reserved[link_id] / self.topo.links[link_id].capacity

    def path_utilization(self, path: List[str]) -> float:
        return max((self.utilization(link_id) for link_id in path), default=0.0)

    def reserve(self, resv: Reservation):
        for link_id in resv.path:
            self.reserved[link_id] += resv.reserved
            self.holders[link_id].add(resv.session_id)
        self.active[resv.session_id] = resv
        # Utilization only rises on admission, so peaks are tracked here.
        for link_id in resv.path:
            u = self.utilization(link_id)
            for sid in self.holders[link_id]:
                holder = self.active[sid]
                if u > holder.peak_utilization:
                    holder.peak_utilization = u

    def release(self, resv: Reservation):
        for link_id in resv.path:
            self.reserved[link_id] = max(0.0, self.reserved[link_id] - resv.reserved)
            self.holders[link_id].discard(resv.session_id)
        self.active.pop(resv.session_id, None)


def admit(req: SessionRequest, topo: Topology, state: NetworkState) -> AdmissionDecision:
    """Single admission check at the customer interface: every link on the
    user's path must have room for the effective demand."""
    path = topo.paths.get(req.isp)
    if path is None:
        raise TopologyError(f"session {req.id} arrives at unknown ISP {req.isp!r}")
    demand = state.effective_demand(req.demand)
    for link_id in path:
        free = topo.links[link_id].capacity - state.reserved[link_id]
        if free + EPS < demand:
            return AdmissionDecision(accepted=False, effective_demand=demand,
                                     path=path, blocked_by=link_id)
    return AdmissionDecision(accepted=True, effective_demand=demand, path=path)


def degrade(u: float, model: DegradationModel) -> Tuple[float, float]:
    """(loss %, jitter ms) of a best-effort path at peak utilization ``u``."""
    loss = max(0.0, (u - model.loss_knee) / model.loss_span * model.loss_peak_pct)
    jitter = model.jitter_base_ms + model.jitter_gain_ms * u * u
    return loss, jitter


def path_delay(path: List[str], topo: Topology, delay_metric: Optional[str] = None) -> float:
    one_way = sum(topo.links[link_id].base_latency for link_id in path)
    metric = delay_metric or settings.delay_metric
    return one_way * 2 if metric == "rtt" else one_way


def verify_sla(resv: Reservation, topo: Topology, state: NetworkState,
               sla: SlaSpec = SlaSpec(), model: Optional[DegradationModel] = None,
               delay_metric: Optional[str] = None) -> SlaVerdict:
    model = model or settings.degradation
    delay = path_delay(resv.path, topo, delay_metric)
    if resv.guaranteed:
        loss, jitter = 0.0, 0.0
    else:
        u = max(resv.peak_utilization, state.path_utilization(resv.path))
        loss, jitter = degrade(u, model)

    reasons = []
    if delay > sla.max_delay:
        reasons.append("delay")
    if loss > sla.max_loss:
        reasons.append("loss")
    if jitter > sla.max_jitter:
        reasons.append("jitter")
    return SlaVerdict(passed=not reasons, reasons=reasons, delay_ms=delay,
                      loss_pct=loss, jitter_ms=jitter)


def _money(value: Decimal) -> Decimal:
    return value.quantize(CENT, rounding=ROUND_HALF_UP)


def bill(resv: Reservation, topo: Topology, rebate: float = 1.0) -> List[BillingRecord]:
    """Settlement records for a finished session."""
    if resv.state not in (ReservationState.COMPLETED, ReservationState.SLA_VIOLATED):
        raise ValueError(f"session {resv.session_id} is {resv.state.value}; only finished sessions are billed")
    violated = resv.state == ReservationState.SLA_VIOLATED
    usage = Decimal(str(resv.reserved)) * resv.duration
    if violated:
        usage *= Decimal(1) - Decimal(str(rebate))
    isp = topo.nodes[resv.isp]
    corp = topo.corporation
    target = topo.nodes[topo.targets[resv.isp]]

    def record(payer, payee, amount, cycle):
        return BillingRecord(payer=payer, payee=payee, amount=amount, cycle=cycle,
                             session_id=resv.session_id, sla_violated=violated)

    if topo.architecture == Architecture.CDN_BASED:
        transport = _money(usage * isp.transit_price)
        content = _money(transport * (1 + target.margin))
        return [
            record(target.id, isp.id, transport, BillingCycle.ISP_TO_CDN),
            record(corp, target.id, content, BillingCycle.CDN_TO_CORP),
        ]
    if topo.architecture == Architecture.WALLED_GARDEN:
        amount = _money(usage * isp.transit_price * (1 + target.margin))
        return [record(corp, isp.id, amount, BillingCycle.ISP_TO_CORP)]

    # General chain: each provider bills the corporation for its own leg.
    return [
        record(corp, node_id, _money(usage * topo.nodes[node_id].transit_price),
               BillingCycle.ISP_TO_CORP)
        for node_id in topo.path_nodes(resv.isp)
        if node_id != corp
    ]


# --------------------------------------------------------------- workload

def _demand(media: MediaClass) -> float:
    p = PROFILES[media]
    return settings.message_rate_mbps if p.payload_bytes is not None else p.min_mbps[1]


def generate_requests(config: SimConfig, isps: List[str]) -> List[SessionRequest]:
    """Poisson arrivals over [0, horizon) with per-session media, ISP and
    duration, drawn in that order from one PCG64 stream."""
    if config.arrival_rate <= 0:
        return []
    rng = np.random.Generator(np.random.PCG64(config.seed))
    per_minute = config.arrival_rate / 60.0
    media_order = [m for m in MediaClass if config.media_mix.get(m, 0) > 0]
    weights = np.array([config.media_mix[m] for m in media_order], dtype=float)
    cumulative = np.cumsum(weights / weights.sum())
    isps = sorted(isps)

    requests = []
    t = 0.0
    while True:
        t += -math.log1p(-rng.random()) / per_minute
        if t >= config.horizon:
            break
        pick = int(np.searchsorted(cumulative, rng.random(), side="right"))
        media = media_order[min(pick, len(media_order) - 1)]
        isp = isps[min(int(rng.random() * len(isps)), len(isps) - 1)]
        draw = rng.random()
        if config.duration_model.kind == DurationKind.EXPONENTIAL:
            minutes = -math.log1p(-draw) * config.duration_model.minutes
        else:
            minutes = config.duration_model.minutes
        sid = len(requests)
        requests.append(SessionRequest(
            id=sid, user=f"user-{sid}", isp=isp, media=media, demand=_demand(media),
            arrival=int(t), duration=max(1, math.ceil(minutes)),
        ))
    return requests


# --------------------------------------------------------------------- run

def run(config: SimConfig, trace: Optional[list] = None) -> SimReport:
    """Simulate ``config``; a pure function of the config, seed included.

    When ``trace`` is a list, one record per event is appended to it.
    """
    topo = build_topology(config.topology)
    state = NetworkState(topo, config.guaranteed, config.overprovision)
    requests = generate_requests(config, topo.isps)

    events: list = []
    for req in requests:
        heapq.heappush(events, (req.arrival, _ARRIVE, req.id))
    by_id = {req.id: req for req in requests}

    ledger: List[BillingRecord] = []
    admitted = rejected = violations = forced = 0
    peak = {link_id: 0.0 for link_id in topo.links}
    area = {link_id: 0.0 for link_id in topo.links}
    last_t = 0

    def record(t, kind, sid):
        if trace is not None:
            trace.append({
                "t": t, "event": kind, "session": sid,
                "utilization": {lid: round(state.utilization(lid), 6) for lid in sorted(topo.links)},
            })

    def advance(t):
        nonlocal last_t
        if t > last_t:
            for link_id in topo.links:
                area[link_id] += state.reserved[link_id] * (t - last_t)
            last_t = t

    def finish(resv: Reservation, t: int):
        nonlocal violations
        verdict = verify_sla(resv, topo, state, config.sla, config.degradation)
        if verdict.passed:
            resv.state = ReservationState.COMPLETED
        else:
            resv.state = ReservationState.SLA_VIOLATED
            violations += 1
            logger.debug("t=%d session %d violated SLA: %s", t, resv.session_id, verdict.reasons)
        ledger.extend(bill(resv, topo, config.sla_rebate))
        state.release(resv)
        record(t, "depart", resv.session_id)

    while events:
        t, kind, sid = heapq.heappop(events)
        advance(t)
        if kind == _DEPART:
            finish(state.active[sid], t)
            continue

        req = by_id[sid]
        decision = admit(req, topo, state)
        if not decision.accepted:
            rejected += 1
            logger.debug("t=%d session %d rejected at %s", t, sid, decision.blocked_by)
            record(t, "reject", sid)
            continue

        admitted += 1
        end = req.arrival + req.duration
        truncated = end > config.horizon
        if truncated:
            end = config.horizon
            forced += 1
        resv = Reservation(session_id=sid, isp=req.isp, path=decision.path,
                           reserved=decision.effective_demand, start=req.arrival, end=end,
                           guaranteed=config.guaranteed, truncated=truncated)
        state.reserve(resv)
        for link_id in resv.path:
            peak[link_id] = max(peak[link_id], state.utilization(link_id))
        heapq.heappush(events, (end, _DEPART, sid))
        record(t, "admit", sid)

    advance(config.horizon)
    offered = len(requests)
    report = SimReport(
        architecture=topo.architecture,
        seed=config.seed,
        offered=offered,
        admitted=admitted,
        rejected=rejected,
        acceptance_ratio=admitted / offered if offered else 1.0,
        sla_violations=violations,
        sla_violation_rate=violations / admitted if admitted else 0.0,
        forced_completions=forced,
        platform_count=topo.platform_count,
        revenue=_net_revenue(ledger, topo),
        peak_utilization=dict(sorted(peak.items())),
        mean_utilization={
            lid: area[lid] / (topo.links[lid].capacity * config.horizon) for lid in sorted(area)
        },
        ledger=ledger,
        arrivals=[(req.id, req.arrival, req.isp) for req in requests],
    )
    logger.info("%s run (seed %d): offered=%d admitted=%d rejected=%d sla_violations=%d",
                topo.architecture.value, config.seed, offered, admitted, rejected, violations)
    return report


def _net_revenue(ledger: List[BillingRecord], topo: Topology) -> Dict[str, Decimal]:
    net = {node_id: Decimal("0.00") for node_id in topo.nodes}
    for rec in ledger:
        net[rec.payee] += rec.amount
        net[rec.payer] -= rec.amount
    return dict(sorted(net.items()))


def compare_architectures(config: SimConfig) -> ArchitectureComparison:
    """Run the CDN and walled-garden variants of ``config`` on one seed."""
    reports = {}
    for architecture in (Architecture.CDN_BASED, Architecture.WALLED_GARDEN):
        spec = respec(config.topology, architecture)
        reports[architecture] = run(config.model_copy(update={"topology": spec}))
    return ArchitectureComparison(cdn_based=reports[Architecture.CDN_BASED],
                                  walled_garden=reports[Architecture.WALLED_GARDEN])
