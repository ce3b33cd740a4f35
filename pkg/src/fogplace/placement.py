"""System power of demand placements and minimum-energy placement search.

Every device instance touched by a placement contributes its idle power
(``full`` attribution) or its idle power scaled by utilisation for shared
network devices (``proportional``). Load power follows the affine model,
so it does not depend on how many replicas share the load; only the idle
part steps when a new replica is needed.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from typing import Dict, List, Mapping, Optional, Sequence, Tuple

from .catalog import Layer
from .energy import device_power
from .errors import ConfigError, InfeasibleError, OverloadError
from .scenario import PROPORTIONAL, Scenario
from .topology import PER_ACCESS, PER_DEVICE, instances_for_load, replicas_needed, route_for

NETWORK = "network"
PROCESSING = "processing"

EXHAUSTIVE_LIMIT = 8

# relative gap below which two totals count as a tie
_TIE_RTOL = 1e-12


@dataclass(frozen=True)
class PowerEntry:
    """Power of all instances of one device profile."""

    name: str
    layer: Layer
    kind: str
    instances: int
    idle: float
    load: float

    @property
    def total(self) -> float:
        return self.idle + self.load


@dataclass(frozen=True)
class PowerBreakdown:
    entries: Tuple[PowerEntry, ...]

    @property
    def network(self) -> float:
        return math.fsum(e.total for e in self.entries if e.kind == NETWORK)

    @property
    def processing(self) -> float:
        return math.fsum(e.total for e in self.entries if e.kind == PROCESSING)

    @property
    def idle(self) -> float:
        return math.fsum(e.idle for e in self.entries)

    @property
    def load(self) -> float:
        return math.fsum(e.load for e in self.entries)

    @property
    def total(self) -> float:
        return math.fsum(x for e in self.entries for x in (e.idle, e.load))

    def entry(self, name: str) -> Optional[PowerEntry]:
        for e in self.entries:
            if e.name == name:
                return e
        return None

    def to_dict(self) -> dict:
        return {
            "entries": [
                {
                    "name": e.name,
                    "layer": e.layer.label,
                    "kind": e.kind,
                    "instances": e.instances,
                    "idle_w": e.idle,
                    "load_w": e.load,
                    "total_w": e.total,
                }
                for e in self.entries
            ],
            "network_w": self.network,
            "processing_w": self.processing,
            "idle_w": self.idle,
            "load_w": self.load,
            "total_w": self.total,
        }


@dataclass(frozen=True)
class Placement:
    """Result of a placement search.

    ``skipped`` maps layers that could not host the uniform placement to
    the reason (uniform search only).
    """

    assignment: Dict[str, Layer]
    breakdown: PowerBreakdown
    heuristic: bool = False
    skipped: Dict[Layer, str] = field(default_factory=dict)

    @property
    def layer(self) -> Optional[Layer]:
        """The common layer when every demand sits on one layer."""
        layers = set(self.assignment.values())
        return layers.pop() if len(layers) == 1 else None

    @property
    def total(self) -> float:
        return self.breakdown.total


class _Evaluator:
    """Precomputed routes for one scenario; evaluates many assignments."""

    def __init__(self, scenario: Scenario):
        if not scenario.demands:
            raise ConfigError("demands: at least one demand is required")
        self.scenario = scenario
        topo = scenario.topology
        self.routes = {layer: route_for(layer, topo, scenario.catalog) for layer in scenario.layers}
        per_onu = topo.devices_per_onu
        self.access_group = [i // per_onu if per_onu else 0 for i in range(len(scenario.demands))]
        self.proportional = scenario.idle_attribution == PROPORTIONAL
        self.policy = topo.onu_overload_policy

    def run(self, layers: Sequence[Optional[Layer]]) -> PowerBreakdown:
        """Breakdown for demands placed on ``layers`` (``None`` = not placed)."""
        scenario = self.scenario
        catalog = scenario.catalog
        # (hop position, name, scope key) -> per-traversal aggregate rate
        links: Dict[tuple, List[float]] = {}
        hop_of: Dict[tuple, object] = {}
        # (layer, server group) -> aggregate MIPS
        work: Dict[tuple, float] = {}

        for i, (demand, layer) in enumerate(zip(scenario.demands, layers)):
            if layer is None:
                continue
            for pos, hop in enumerate(self.routes[layer]):
                if hop.scope == PER_DEVICE:
                    scope = i
                elif hop.scope == PER_ACCESS:
                    scope = self.access_group[i]
                else:
                    scope = None
                key = (pos, hop.profile.name, scope)
                loads = links.get(key)
                if loads is None:
                    loads = links[key] = []
                    hop_of[key] = hop
                while len(loads) < hop.multiplicity:
                    loads.append(0.0)
                for j in range(hop.multiplicity):
                    loads[j] += demand.rate
            if layer == Layer.IOT:
                group = i
            elif layer == Layer.ACCESS:
                group = self.access_group[i]
            else:
                group = None
            work[(layer, group)] = work.get((layer, group), 0.0) + demand.mips

        acc: Dict[tuple, list] = {}
        for key in sorted(links, key=lambda k: (k[0], k[1])):
            hop = hop_of[key]
            prof = hop.profile
            cap = prof.bitrate_mbps
            for rate in links[key]:
                copies = instances_for_load(rate, cap, self.policy)
                if copies is None:
                    raise OverloadError(prof.name, rate, cap, "Mbps")
                fig = device_power(prof.p_idle * copies, prof.p_max * copies, rate, cap * copies)
                idle = fig.idle
                if self.proportional and hop.scope != PER_DEVICE:
                    idle *= rate / (cap * copies)
                slot = acc.setdefault((0, key[0], prof.name), [prof.name, prof.layer, NETWORK, 0, 0.0, 0.0])
                slot[3] += copies
                slot[4] += idle
                slot[5] += fig.load_dependent

        for (layer, group), mips in sorted(work.items(), key=lambda kv: (kv[0][0], -1 if kv[0][1] is None else kv[0][1])):
            server = catalog.server_for(layer)
            if layer == Layer.IOT and mips > server.mips:
                # on-device processing cannot be replicated
                raise OverloadError(server.name, mips, server.mips, "MIPS")
            count = replicas_needed(mips, server)
            while count and mips > count * server.mips:
                count += 1
            if count == 0:
                continue
            fig = device_power(server.p_idle * count, server.p_max * count, mips, server.mips * count)
            slot = acc.setdefault((1, int(layer), server.name), [server.name, layer, PROCESSING, 0, 0.0, 0.0])
            slot[3] += count
            slot[4] += fig.idle
            slot[5] += fig.load_dependent

        entries = tuple(PowerEntry(*acc[k]) for k in sorted(acc))
        return PowerBreakdown(entries)

    def total(self, layers: Sequence[Optional[Layer]]) -> float:
        return self.run(layers).total

    def layers_of(self, assignment: Mapping[str, Layer]) -> List[Layer]:
        ids = [d.id for d in self.scenario.demands]
        extra = set(assignment) - set(ids)
        if extra:
            raise ConfigError(f"assignment: unknown demand id(s) {', '.join(sorted(extra))}")
        out = []
        for demand_id in ids:
            if demand_id not in assignment:
                raise ConfigError(f"assignment: demand {demand_id} is not assigned a layer")
            layer = Layer(assignment[demand_id])
            self.check_enabled(layer)
            out.append(layer)
        return out

    def check_enabled(self, layer: Layer) -> None:
        if layer not in self.scenario.layers:
            raise ConfigError(
                f"placement: layer {layer.label} is disabled (set allow_iot_layer to enable it)"
            )


def _better(total: float, best: Optional[float]) -> bool:
    return best is None or total < best - _TIE_RTOL * abs(best)


def evaluate(scenario: Scenario, assignment: Mapping[str, Layer]) -> PowerBreakdown:
    """Total system power when each demand is served at its assigned layer.

    Raises :class:`OverloadError` if a network device is saturated under
    the topology's overload policy, :class:`ConfigError` if the
    assignment is not total or uses a disabled layer.
    """
    ev = _Evaluator(scenario)
    return ev.run(ev.layers_of(assignment))


def evaluate_uniform(scenario: Scenario, layer: Layer) -> PowerBreakdown:
    ev = _Evaluator(scenario)
    layer = Layer(layer)
    ev.check_enabled(layer)
    return ev.run([layer] * len(scenario.demands))


def optimize_uniform(scenario: Scenario) -> Placement:
    """Best single layer for all demands; ties go to the layer nearest the devices."""
    ev = _Evaluator(scenario)
    n = len(scenario.demands)
    best: Optional[Tuple[Layer, PowerBreakdown]] = None
    skipped: Dict[Layer, str] = {}
    for layer in scenario.layers:
        try:
            bd = ev.run([layer] * n)
        except OverloadError as exc:
            skipped[layer] = str(exc)
            continue
        if _better(bd.total, None if best is None else best[1].total):
            best = (layer, bd)
    if best is None:
        reasons = "; ".join(f"{l.label}: {why}" for l, why in skipped.items())
        raise InfeasibleError(f"no feasible layer ({reasons})")
    layer, bd = best
    return Placement({d.id: layer for d in scenario.demands}, bd, skipped=skipped)


def _exhaustive(ev: _Evaluator) -> Placement:
    scenario = ev.scenario
    best_layers = None
    best_total = None
    last_error = None
    for combo in itertools.product(scenario.layers, repeat=len(scenario.demands)):
        try:
            total = ev.total(combo)
        except OverloadError as exc:
            last_error = exc
            continue
        if _better(total, best_total):
            best_layers, best_total = combo, total
    if best_layers is None:
        raise InfeasibleError(f"no feasible assignment ({last_error})")
    assignment = {d.id: l for d, l in zip(scenario.demands, best_layers)}
    return Placement(assignment, ev.run(best_layers))


def _greedy(ev: _Evaluator) -> Placement:
    scenario = ev.scenario
    demands = scenario.demands
    order = sorted(range(len(demands)), key=lambda i: (-demands[i].mips, i))
    layers: List[Optional[Layer]] = [None] * len(demands)
    for i in order:
        choice = None
        choice_total = None
        last_error = None
        for layer in scenario.layers:
            layers[i] = layer
            try:
                total = ev.total(layers)
            except OverloadError as exc:
                last_error = exc
                continue
            if _better(total, choice_total):
                choice, choice_total = layer, total
        if choice is None:
            raise InfeasibleError(f"demand {demands[i].id} has no feasible layer ({last_error})")
        layers[i] = choice
    assignment = {d.id: l for d, l in zip(demands, layers)}
    return Placement(assignment, ev.run(layers), heuristic=True)


def optimize_joint(scenario: Scenario, exhaustive_limit: int = EXHAUSTIVE_LIMIT) -> Placement:
    """Minimum-power per-demand placement.

    Exact (full enumeration) for up to ``exhaustive_limit`` demands. Larger
    scenarios use a greedy pass in descending MIPS order and the result is
    flagged ``heuristic``.
    """
    ev = _Evaluator(scenario)
    if len(scenario.demands) <= exhaustive_limit:
        return _exhaustive(ev)
    return _greedy(ev)
