"""Traffic-rate sweeps over placement layers, emitted as CSV."""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass, field, replace
from typing import List, Optional, Sequence, Tuple

from .catalog import Layer
from .errors import OverloadError
from .placement import evaluate_uniform
from .scenario import Scenario, uniform_demands

CSV_HEADER = ("rate_mbps", "layer", "total_w", "network_w", "processing_w", "idle_w", "load_w", "feasible")

SCENARIO2_DEVICES = 5


def default_rates() -> List[float]:
    return [round(0.5 * k, 10) for k in range(1, 11)]


def scenario1(rate: float, base: Optional[Scenario] = None) -> Scenario:
    """A single IoT request at ``rate`` Mbps."""
    base = base or Scenario()
    return replace(base, demands=uniform_demands(1, rate, base.workload))


def scenario2(rate_per_device: float, base: Optional[Scenario] = None) -> Scenario:
    """Five IoT devices behind one ONU, each sending ``rate_per_device`` Mbps."""
    base = base or Scenario()
    return replace(base, demands=uniform_demands(SCENARIO2_DEVICES, rate_per_device, base.workload))


@dataclass(frozen=True)
class SweepSpec:
    """Rate grid and layers to sweep.

    Every demand of ``base`` is re-rated to each grid value, with MIPS
    re-derived from the base workload model. ``layers`` defaults to the
    base scenario's enabled layers.
    """

    base: Scenario
    rates: Tuple[float, ...] = field(default_factory=lambda: tuple(default_rates()))
    layers: Optional[Tuple[Layer, ...]] = None

    def __post_init__(self):
        rates = tuple(float(r) for r in self.rates)
        object.__setattr__(self, "rates", rates)
        if any(r < 0 for r in rates):
            raise ValueError("rates: must be >= 0")
        if any(b <= a for a, b in zip(rates, rates[1:])):
            raise ValueError("rates: must be strictly increasing")
        if self.layers is not None:
            object.__setattr__(self, "layers", tuple(Layer(l) for l in self.layers))

    @property
    def sweep_layers(self) -> Tuple[Layer, ...]:
        return self.base.layers if self.layers is None else self.layers


@dataclass(frozen=True)
class SweepRow:
    rate: float
    layer: Layer
    total: Optional[float] = None
    network: Optional[float] = None
    processing: Optional[float] = None
    idle: Optional[float] = None
    load: Optional[float] = None
    feasible: bool = True


SweepSeries = List[SweepRow]


def _cell(scenario: Scenario, rate: float, layer: Layer) -> SweepRow:
    try:
        bd = evaluate_uniform(scenario, layer)
    except OverloadError:
        return SweepRow(rate, layer, feasible=False)
    return SweepRow(rate, layer, bd.total, bd.network, bd.processing, bd.idle, bd.load)


def run_sweep(spec: SweepSpec) -> SweepSeries:
    """Evaluate every (rate, layer) cell; rows are rate-major, then layer order."""
    layers = sorted(spec.sweep_layers)
    rows: SweepSeries = []
    if not layers:
        return rows
    for rate in spec.rates:
        scenario = spec.base.with_rates(rate)
        rows.extend(_cell(scenario, rate, layer) for layer in layers)
    return rows


def _num(x: Optional[float]) -> str:
    return "" if x is None else format(x, ".10g")


def emit_csv(series: Sequence[SweepRow]) -> bytes:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(CSV_HEADER)
    for row in series:
        writer.writerow(
            [
                _num(row.rate),
                row.layer.label,
                _num(row.total),
                _num(row.network),
                _num(row.processing),
                _num(row.idle),
                _num(row.load),
                "true" if row.feasible else "false",
            ]
        )
    return buf.getvalue().encode("utf-8")


def parse_csv(data: bytes) -> SweepSeries:
    """Inverse of :func:`emit_csv`."""
    reader = csv.DictReader(io.StringIO(data.decode("utf-8")))
    if tuple(reader.fieldnames or ()) != CSV_HEADER:
        raise ValueError(f"unexpected CSV header {reader.fieldnames!r}")

    def num(s: str) -> Optional[float]:
        return None if s == "" else float(s)

    return [
        SweepRow(
            rate=float(r["rate_mbps"]),
            layer=Layer.parse(r["layer"]),
            total=num(r["total_w"]),
            network=num(r["network_w"]),
            processing=num(r["processing_w"]),
            idle=num(r["idle_w"]),
            load=num(r["load_w"]),
            feasible=r["feasible"] == "true",
        )
        for r in reader
    ]
