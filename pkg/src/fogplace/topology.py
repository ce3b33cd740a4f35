"""Layered access/metro/core topology, route composition and capacity counting."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Tuple

from .catalog import (
    CORE_PORT,
    IOT_RADIO,
    METRO_ROUTER_PORT,
    METRO_SWITCH,
    ONU,
    DeviceCatalog,
    Layer,
    NetworkDeviceProfile,
    ServerProfile,
)

ERROR = "error"
REPLICATE = "replicate"
OVERLOAD_POLICIES = (ERROR, REPLICATE)

# Hop scopes: who shares a physical device.
PER_DEVICE = "device"  # one per IoT device (its radio)
PER_ACCESS = "access"  # one per access network (ONU group)
SHARED = "shared"  # one for the whole scenario


@dataclass(frozen=True)
class Topology:
    """Shape of the access/metro/core path.

    ``devices_per_onu`` IoT devices share one ONU; 0 means a single ONU
    serves every device.
    """

    devices_per_onu: int = 5
    metro_router_ports_metro_placement: int = 1
    metro_router_ports_core_transit: int = 1
    core_hops: int = 3
    onu_overload_policy: str = ERROR

    def __post_init__(self):
        for name in (
            "devices_per_onu",
            "metro_router_ports_metro_placement",
            "metro_router_ports_core_transit",
            "core_hops",
        ):
            value = getattr(self, name)
            if isinstance(value, bool) or not isinstance(value, int) or value < 0:
                raise ValueError(f"topology.{name}: must be an integer >= 0 (got {value!r})")
        if self.onu_overload_policy not in OVERLOAD_POLICIES:
            raise ValueError(
                f"topology.onu_overload_policy: must be one of {OVERLOAD_POLICIES} "
                f"(got {self.onu_overload_policy!r})"
            )


@dataclass(frozen=True)
class Hop:
    """One network device on a route, traversed ``multiplicity`` times in series."""

    profile: NetworkDeviceProfile
    multiplicity: int
    scope: str


Route = Tuple[Hop, ...]


def route_for(placement: Layer, topology: Topology, catalog: DeviceCatalog) -> Route:
    """Network devices a demand crosses to reach a server at ``placement``.

    Routes nest: each layer's route extends the one below it, except that
    cloud-bound traffic uses the core-transit metro port count.
    """
    placement = Layer(placement)
    if placement == Layer.IOT:
        return ()
    net = catalog.network_profile
    route = [Hop(net(IOT_RADIO), 1, PER_DEVICE), Hop(net(ONU), 1, PER_ACCESS)]
    if placement == Layer.ACCESS:
        return tuple(route)
    ports = (
        topology.metro_router_ports_metro_placement
        if placement == Layer.METRO
        else topology.metro_router_ports_core_transit
    )
    route.append(Hop(net(METRO_SWITCH), 1, SHARED))
    route.append(Hop(net(METRO_ROUTER_PORT), ports, SHARED))
    if placement == Layer.METRO:
        return tuple(route)
    if topology.core_hops < 1:
        raise ValueError("topology.core_hops: must be >= 1 when CloudDC placement is evaluated")
    route.append(Hop(net(CORE_PORT), topology.core_hops, SHARED))
    return tuple(route)


def replicas_needed(total_demand: float, server: ServerProfile) -> int:
    """Smallest number of ``server`` instances whose capacity covers the demand."""
    if total_demand < 0:
        raise ValueError(f"demand must be >= 0 (got {total_demand!r})")
    if total_demand == 0:
        return 0
    return math.ceil(total_demand / server.mips)


def instances_for_load(load: float, capacity: float, policy: str) -> Optional[int]:
    """Device copies needed to carry ``load``; None if saturated under ``error`` policy."""
    if load <= capacity:
        return 1
    if policy == REPLICATE:
        return math.ceil(load / capacity)
    return None


@dataclass(frozen=True)
class LoadCheck:
    """Outcome of checking one aggregate rate against a route.

    ``instances`` has one entry per hop: the copies needed at each
    traversal of that hop. ``overload`` is set when the policy forbids
    replication and some device is saturated.
    """

    instances: Tuple[int, ...]
    overload: Optional[Tuple[str, float, float]] = None

    @property
    def ok(self) -> bool:
        return self.overload is None


def network_load_check(aggregate_rate: float, route: Route, policy: str = ERROR) -> LoadCheck:
    counts = []
    for hop in route:
        # each traversal is a separate device carrying the full rate
        capacity = hop.profile.bitrate_mbps
        n = instances_for_load(aggregate_rate, capacity, policy)
        if n is None:
            return LoadCheck(tuple(counts), (hop.profile.name, aggregate_rate, capacity))
        counts.append(n)
    return LoadCheck(tuple(counts))
