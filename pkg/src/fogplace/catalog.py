"""Device parameter tables for the IoT / fog / cloud layers."""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Dict, List, Mapping


class Layer(enum.IntEnum):
    """Computing layers, ordered by distance from the data source."""

    IOT = 0
    ACCESS = 1
    METRO = 2
    CLOUD = 3

    @property
    def label(self) -> str:
        return _LABELS[self]

    @property
    def short(self) -> str:
        return _SHORT[self]

    @classmethod
    def parse(cls, name: str) -> "Layer":
        key = str(name).strip().lower()
        try:
            return _BY_NAME[key]
        except KeyError:
            valid = ", ".join(_LABELS[l] for l in cls)
            raise ValueError(f"unknown layer {name!r} (expected one of {valid})") from None


_LABELS = {
    Layer.IOT: "IoTDevice",
    Layer.ACCESS: "AccessFog",
    Layer.METRO: "MetroFog",
    Layer.CLOUD: "CloudDC",
}
_SHORT = {Layer.IOT: "iot", Layer.ACCESS: "access", Layer.METRO: "metro", Layer.CLOUD: "cloud"}
_BY_NAME = {}
for _layer in Layer:
    _BY_NAME[_LABELS[_layer].lower()] = _layer
    _BY_NAME[_SHORT[_layer]] = _layer


# Profile names referenced by route composition.
IOT_RADIO = "IoT (Wi-Fi)"
ONU = "ONU (Wi-Fi)"
METRO_ROUTER_PORT = "Metro Router Port"
METRO_SWITCH = "Metro Ethernet Switch"
CORE_PORT = "IP/WDM"


@dataclass(frozen=True)
class NetworkDeviceProfile:
    """A network device with an affine power profile.

    ``bitrate_gbps`` is the configured line rate; arithmetic uses
    :attr:`bitrate_mbps`.
    """

    name: str
    bitrate_gbps: float
    p_max: float
    p_idle: float
    layer: Layer

    @property
    def bitrate_mbps(self) -> float:
        return self.bitrate_gbps * 1000.0


@dataclass(frozen=True)
class ServerProfile:
    name: str
    p_max: float
    p_idle: float
    clock_ghz: float
    mips: float
    layer: Layer


@dataclass(frozen=True)
class DeviceCatalog:
    network: Dict[str, NetworkDeviceProfile] = field(default_factory=dict)
    servers: Dict[Layer, ServerProfile] = field(default_factory=dict)

    def network_profile(self, name: str) -> NetworkDeviceProfile:
        try:
            return self.network[name]
        except KeyError:
            raise KeyError(f"no network profile named {name!r} in catalog") from None

    def server_for(self, layer: Layer) -> ServerProfile:
        try:
            return self.servers[layer]
        except KeyError:
            raise KeyError(f"no server profile for layer {layer.label}") from None


_NETWORK_ROWS = [
    # name, bitrate (Gbps), p_max (W), p_idle (W), layer
    (IOT_RADIO, 0.15, 0.56, 0.34, Layer.IOT),
    (ONU, 0.3, 15.0, 9.0, Layer.ACCESS),
    (METRO_ROUTER_PORT, 40.0, 30.0, 27.0, Layer.METRO),
    (METRO_SWITCH, 600.0, 470.0, 423.0, Layer.METRO),
    # core network router port; 1.15 kW / 1 kW
    (CORE_PORT, 40.0, 1150.0, 1000.0, Layer.CLOUD),
]

_SERVER_ROWS = [
    # name, p_max (W), p_idle (W), clock (GHz), MIPS, layer
    ("RPi Zero W", 3.96, 0.5, 1.0, 1000.0, Layer.IOT),
    ("RPi 3", 12.5, 2.0, 1.2, 2400.0, Layer.ACCESS),
    ("Intel X5675", 95.0, 57.0, 3.06, 73440.0, Layer.METRO),
    ("Intel Xeon E5-2680", 130.0, 78.0, 2.7, 108000.0, Layer.CLOUD),
]


def default_catalog() -> DeviceCatalog:
    """Return the built-in catalog of network devices and servers."""
    network = {row[0]: NetworkDeviceProfile(*row) for row in _NETWORK_ROWS}
    servers = {row[5]: ServerProfile(*row) for row in _SERVER_ROWS}
    return DeviceCatalog(network=network, servers=servers)


def _power_violations(name: str, p_max: float, p_idle: float) -> List[str]:
    out = []
    if not p_idle >= 0:
        out.append(f"{name}.p_idle: must be >= 0 (got {p_idle!r})")
    if not p_max >= 0:
        out.append(f"{name}.p_max: must be >= 0 (got {p_max!r})")
    if p_idle > p_max:
        out.append(f"{name}.p_idle: p_idle exceeds p_max ({p_idle!r} > {p_max!r})")
    return out


def validate_catalog(catalog: DeviceCatalog) -> List[str]:
    """Return a description of every violated catalog invariant.

    An empty list means the catalog is valid. Each entry names the
    offending profile and field.
    """
    problems: List[str] = []
    for key, prof in catalog.network.items():
        if key != prof.name:
            problems.append(f"{key}.name: keyed as {key!r} but named {prof.name!r}")
        if not prof.bitrate_gbps > 0:
            problems.append(f"{prof.name}.bitrate: must be > 0 (got {prof.bitrate_gbps!r})")
        problems.extend(_power_violations(prof.name, prof.p_max, prof.p_idle))
    for layer in Layer:
        prof = catalog.servers.get(layer)
        if prof is None:
            problems.append(f"no server profile for layer {layer.label}")
            continue
        if prof.layer != layer:
            problems.append(f"{prof.name}.layer: keyed under {layer.label} but declares {prof.layer.label}")
        if not prof.mips > 0:
            problems.append(f"{prof.name}.mips: must be > 0 (got {prof.mips!r})")
        problems.extend(_power_violations(prof.name, prof.p_max, prof.p_idle))
    return problems


def catalog_rows(catalog: DeviceCatalog) -> Mapping[str, object]:
    """All profiles keyed by name, network devices first."""
    rows: Dict[str, object] = dict(catalog.network)
    for layer in sorted(catalog.servers):
        prof = catalog.servers[layer]
        rows[prof.name] = prof
    return rows
