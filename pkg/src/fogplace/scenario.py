"""Scenario container plus JSON config loading and emission."""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field, replace
from typing import Any, Dict, List, Optional, Sequence, Tuple, Union

from .catalog import (
    DeviceCatalog,
    Layer,
    NetworkDeviceProfile,
    ServerProfile,
    catalog_rows,
    default_catalog,
    validate_catalog,
)
from .energy import WorkloadModel, traffic_to_mips
from .errors import ConfigError
from .topology import Topology

FULL = "full"
PROPORTIONAL = "proportional"
IDLE_ATTRIBUTIONS = (FULL, PROPORTIONAL)


@dataclass(frozen=True)
class Demand:
    """One IoT service request; served entirely by a single layer."""

    id: str
    rate: float
    mips: float

    def __post_init__(self):
        if not self.rate >= 0:
            raise ValueError(f"demand {self.id}.rate_mbps: must be >= 0 (got {self.rate!r})")
        if not self.mips >= 0:
            raise ValueError(f"demand {self.id}.mips: must be >= 0 (got {self.mips!r})")


@dataclass(frozen=True)
class Scenario:
    catalog: DeviceCatalog = field(default_factory=default_catalog)
    topology: Topology = field(default_factory=Topology)
    workload: WorkloadModel = field(default_factory=WorkloadModel)
    demands: Tuple[Demand, ...] = ()
    idle_attribution: str = FULL
    allow_iot_layer: bool = False

    def __post_init__(self):
        object.__setattr__(self, "demands", tuple(self.demands))
        if self.idle_attribution not in IDLE_ATTRIBUTIONS:
            raise ValueError(
                f"idle_attribution: must be one of {IDLE_ATTRIBUTIONS} (got {self.idle_attribution!r})"
            )
        ids = [d.id for d in self.demands]
        if len(set(ids)) != len(ids):
            raise ValueError("demands: duplicate demand id")

    @property
    def layers(self) -> Tuple[Layer, ...]:
        """Layers a demand may be placed on, nearest first."""
        if self.allow_iot_layer:
            return tuple(Layer)
        return (Layer.ACCESS, Layer.METRO, Layer.CLOUD)

    def demand(self, rate: float, id: Optional[str] = None) -> Demand:
        """A demand at ``rate`` whose MIPS follow this scenario's workload model."""
        return Demand(id or f"d{len(self.demands) + 1}", rate, traffic_to_mips(self.workload, rate))

    def with_rates(self, rate: float) -> "Scenario":
        """Copy with every demand re-rated to ``rate`` (MIPS re-derived)."""
        demands = tuple(
            Demand(d.id, rate, traffic_to_mips(self.workload, rate)) for d in self.demands
        )
        return replace(self, demands=demands)


def uniform_demands(count: int, rate: float, workload: Optional[WorkloadModel] = None) -> Tuple[Demand, ...]:
    workload = workload or WorkloadModel()
    mips = traffic_to_mips(workload, rate)
    return tuple(Demand(f"d{i + 1}", rate, mips) for i in range(count))


# --- config documents -------------------------------------------------------

_NETWORK_FIELDS = {"kind", "bitrate_gbps", "p_max_w", "p_idle_w", "layer"}
_SERVER_FIELDS = {"kind", "p_max_w", "p_idle_w", "clock_ghz", "mips", "layer"}
_TOPOLOGY_FIELDS = set(Topology.__dataclass_fields__)
_WORKLOAD_FIELDS = set(WorkloadModel.__dataclass_fields__)
_TOP_FIELDS = {"catalog", "topology", "workload", "demands", "idle_attribution", "allow_iot_layer"}


def _number(where: str, value: Any) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ConfigError(f"{where}: expected a number (got {value!r})")
    if not math.isfinite(value):
        raise ConfigError(f"{where}: must be finite (got {value!r})")
    return float(value)


def _object(where: str, value: Any) -> Dict[str, Any]:
    if not isinstance(value, dict):
        raise ConfigError(f"{where}: expected an object (got {type(value).__name__})")
    return value


def _check_keys(where: str, doc: Dict[str, Any], allowed) -> None:
    extra = sorted(set(doc) - set(allowed))
    if extra:
        raise ConfigError(f"{where}: unknown field(s) {', '.join(extra)}")


def _layer(where: str, value: Any) -> Layer:
    try:
        return Layer.parse(value)
    except ValueError as exc:
        raise ConfigError(f"{where}: {exc}") from None


def _network_from(name: str, doc: Dict[str, Any], base: Optional[NetworkDeviceProfile]) -> NetworkDeviceProfile:
    _check_keys(name, doc, _NETWORK_FIELDS)

    def get(key, attr):
        if key in doc:
            return _number(f"{name}.{key}", doc[key])
        if base is None:
            raise ConfigError(f"{name}.{key}: required for a new network profile")
        return getattr(base, attr)

    if "layer" in doc:
        layer = _layer(f"{name}.layer", doc["layer"])
    elif base is not None:
        layer = base.layer
    else:
        raise ConfigError(f"{name}.layer: required for a new network profile")
    return NetworkDeviceProfile(
        name=name,
        bitrate_gbps=get("bitrate_gbps", "bitrate_gbps"),
        p_max=get("p_max_w", "p_max"),
        p_idle=get("p_idle_w", "p_idle"),
        layer=layer,
    )


def _server_from(name: str, doc: Dict[str, Any], base: Optional[ServerProfile]) -> ServerProfile:
    _check_keys(name, doc, _SERVER_FIELDS)

    def get(key, attr):
        if key in doc:
            return _number(f"{name}.{key}", doc[key])
        if base is None:
            if key == "clock_ghz":
                return 0.0
            raise ConfigError(f"{name}.{key}: required for a new server profile")
        return getattr(base, attr)

    if "layer" in doc:
        layer = _layer(f"{name}.layer", doc["layer"])
    elif base is not None:
        layer = base.layer
    else:
        raise ConfigError(f"{name}.layer: required for a new server profile")
    return ServerProfile(
        name=name,
        p_max=get("p_max_w", "p_max"),
        p_idle=get("p_idle_w", "p_idle"),
        clock_ghz=get("clock_ghz", "clock_ghz"),
        mips=get("mips", "mips"),
        layer=layer,
    )


def _catalog_from(doc: Any) -> DeviceCatalog:
    defaults = default_catalog()
    overrides = _object("catalog", doc)
    network = dict(defaults.network)
    default_servers = {p.name: p for p in defaults.servers.values()}
    given_servers: Dict[Layer, ServerProfile] = {}

    for name, entry in overrides.items():
        entry = _object(f"catalog.{name}", entry)
        kind = entry.get("kind")
        if kind is None:
            if name in network:
                kind = "network"
            elif name in default_servers:
                kind = "server"
            elif "bitrate_gbps" in entry:
                kind = "network"
            elif "mips" in entry:
                kind = "server"
            else:
                raise ConfigError(f"{name}.kind: cannot tell whether this is a network device or a server")
        if kind == "network":
            network[name] = _network_from(name, entry, network.get(name))
        elif kind == "server":
            prof = _server_from(name, entry, default_servers.get(name))
            if prof.layer in given_servers:
                other = given_servers[prof.layer].name
                raise ConfigError(f"{name}.layer: {other} is already the server for {prof.layer.label}")
            given_servers[prof.layer] = prof
        else:
            raise ConfigError(f"{name}.kind: must be 'network' or 'server' (got {kind!r})")

    servers = dict(defaults.servers)
    for prof in default_servers.values():
        # a default moved to another layer no longer serves its own
        if any(g.name == prof.name for g in given_servers.values()) and servers.get(prof.layer) is prof:
            del servers[prof.layer]
    servers.update(given_servers)
    catalog = DeviceCatalog(network=network, servers={l: servers[l] for l in sorted(servers)})
    problems = validate_catalog(catalog)
    if problems:
        raise ConfigError("; ".join(problems))
    return catalog


def _topology_from(doc: Any) -> Topology:
    doc = _object("topology", doc)
    _check_keys("topology", doc, _TOPOLOGY_FIELDS)
    try:
        return Topology(**doc)
    except ValueError as exc:
        raise ConfigError(str(exc)) from None


def _workload_from(doc: Any) -> WorkloadModel:
    doc = _object("workload", doc)
    _check_keys("workload", doc, _WORKLOAD_FIELDS)
    kwargs = {k: (v if k == "mode" else _number(f"workload.{k}", v)) for k, v in doc.items()}
    try:
        return WorkloadModel(**kwargs)
    except ValueError as exc:
        raise ConfigError(str(exc)) from None


def _demands_from(doc: Any, workload: WorkloadModel) -> Tuple[Demand, ...]:
    if not isinstance(doc, list):
        raise ConfigError("demands: expected a list")
    if not doc:
        raise ConfigError("demands: at least one demand is required")
    out = []
    for i, entry in enumerate(doc):
        where = f"demands[{i}]"
        entry = _object(where, entry)
        _check_keys(where, entry, {"id", "rate_mbps", "mips"})
        if "rate_mbps" not in entry:
            raise ConfigError(f"{where}.rate_mbps: required")
        rate = _number(f"{where}.rate_mbps", entry["rate_mbps"])
        if not rate >= 0:
            raise ConfigError(f"{where}.rate_mbps: must be >= 0 (got {rate!r})")
        if "mips" in entry:
            mips = _number(f"{where}.mips", entry["mips"])
            if not mips >= 0:
                raise ConfigError(f"{where}.mips: must be >= 0 (got {mips!r})")
        else:
            mips = traffic_to_mips(workload, rate)
        demand_id = str(entry.get("id", f"d{i + 1}"))
        out.append(Demand(demand_id, rate, mips))
    ids = [d.id for d in out]
    if len(set(ids)) != len(ids):
        raise ConfigError("demands: duplicate demand id")
    return tuple(out)


def scenario_from_dict(doc: Any) -> Scenario:
    doc = _object("config", doc)
    _check_keys("config", doc, _TOP_FIELDS)
    if "demands" not in doc:
        raise ConfigError("demands: required")
    catalog = _catalog_from(doc.get("catalog", {}))
    topology = _topology_from(doc.get("topology", {}))
    workload = _workload_from(doc.get("workload", {}))
    demands = _demands_from(doc["demands"], workload)
    idle = doc.get("idle_attribution", FULL)
    if idle not in IDLE_ATTRIBUTIONS:
        raise ConfigError(f"idle_attribution: must be one of {IDLE_ATTRIBUTIONS} (got {idle!r})")
    allow_iot = doc.get("allow_iot_layer", False)
    if not isinstance(allow_iot, bool):
        raise ConfigError(f"allow_iot_layer: expected true or false (got {allow_iot!r})")
    return Scenario(
        catalog=catalog,
        topology=topology,
        workload=workload,
        demands=demands,
        idle_attribution=idle,
        allow_iot_layer=allow_iot,
    )


def load_scenario(config: Union[bytes, str]) -> Scenario:
    """Parse and validate a JSON scenario document.

    Omitted catalog entries, topology fields and workload fields take
    their defaults. Raises :class:`ConfigError` on malformed JSON or any
    invalid value.
    """
    try:
        doc = json.loads(config)
    except (ValueError, UnicodeDecodeError) as exc:
        raise ConfigError(f"config: malformed JSON ({exc})") from None
    return scenario_from_dict(doc)


def catalog_to_dict(catalog: DeviceCatalog) -> Dict[str, Any]:
    out: Dict[str, Any] = {}
    for name, prof in catalog_rows(catalog).items():
        if isinstance(prof, NetworkDeviceProfile):
            out[name] = {
                "kind": "network",
                "bitrate_gbps": prof.bitrate_gbps,
                "p_max_w": prof.p_max,
                "p_idle_w": prof.p_idle,
                "layer": prof.layer.label,
            }
        else:
            out[name] = {
                "kind": "server",
                "p_max_w": prof.p_max,
                "p_idle_w": prof.p_idle,
                "clock_ghz": prof.clock_ghz,
                "mips": prof.mips,
                "layer": prof.layer.label,
            }
    return out


def scenario_to_dict(scenario: Scenario) -> Dict[str, Any]:
    topo = scenario.topology
    wl = scenario.workload
    return {
        "catalog": catalog_to_dict(scenario.catalog),
        "topology": {name: getattr(topo, name) for name in Topology.__dataclass_fields__},
        "workload": {name: getattr(wl, name) for name in WorkloadModel.__dataclass_fields__},
        "demands": [{"id": d.id, "rate_mbps": d.rate, "mips": d.mips} for d in scenario.demands],
        "idle_attribution": scenario.idle_attribution,
        "allow_iot_layer": scenario.allow_iot_layer,
    }


def emit_config(scenario: Scenario) -> bytes:
    """Serialize a scenario so that :func:`load_scenario` reproduces it exactly."""
    return (json.dumps(scenario_to_dict(scenario), indent=2) + "\n").encode("utf-8")


def default_scenario(rates: Sequence[float] = (1.0,)) -> Scenario:
    workload = WorkloadModel()
    demands: List[Demand] = [
        Demand(f"d{i + 1}", r, traffic_to_mips(workload, r)) for i, r in enumerate(rates)
    ]
    return Scenario(workload=workload, demands=tuple(demands))
