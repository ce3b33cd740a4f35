"""Command-line entry point: ``fogplace evaluate|optimize|sweep|defaults``.

Exit codes: 0 success, 1 configuration/validation error, 2 infeasible
scenario, 3 I/O error. Errors go to stderr as one ``error: ...`` line.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from typing import List, Optional

from . import __version__
from .catalog import Layer, catalog_rows, NetworkDeviceProfile
from .errors import ConfigError, InfeasibleError, OverloadError
from .placement import EXHAUSTIVE_LIMIT, Placement, PowerBreakdown, evaluate_uniform, optimize_joint, optimize_uniform
from .scenario import Scenario, default_scenario, emit_config, load_scenario
from .sweep import SweepSpec, default_rates, emit_csv, run_sweep, scenario1, scenario2

EXIT_OK = 0
EXIT_CONFIG = 1
EXIT_INFEASIBLE = 2
EXIT_IO = 3


class CliError(Exception):
    def __init__(self, message: str, code: int):
        super().__init__(message)
        self.code = code


def parse_rates(text: str) -> List[float]:
    """Parse ``start:stop:step`` ranges and comma-separated values.

    Range endpoints are inclusive within floating-point tolerance.
    """
    rates: List[float] = []
    for part in text.split(","):
        part = part.strip()
        if not part:
            continue
        if ":" in part:
            bits = part.split(":")
            if len(bits) != 3:
                raise ValueError(f"bad range {part!r} (expected start:stop:step)")
            start, stop, step = (float(b) for b in bits)
            if step <= 0:
                raise ValueError(f"bad range {part!r}: step must be > 0")
            count = math.floor((stop - start) / step + 1e-9) + 1
            rates.extend(round(start + k * step, 12) for k in range(max(count, 0)))
        else:
            rates.append(float(part))
    if not rates:
        raise ValueError("empty rate list")
    return rates


def _read_config(path: Optional[str]) -> Scenario:
    try:
        if path in (None, "-"):
            data = sys.stdin.buffer.read()
        else:
            with open(path, "rb") as fh:
                data = fh.read()
    except OSError as exc:
        raise CliError(f"cannot read config {path}: {exc.strerror or exc}", EXIT_IO) from None
    return load_scenario(data)


def _config_path(args) -> Optional[str]:
    return args.config_opt if args.config_opt is not None else args.config


def _format_breakdown(bd: PowerBreakdown) -> str:
    lines = [f"{'device':<22} {'layer':<10} {'kind':<10} {'n':>4} {'idle_w':>14} {'load_w':>14} {'total_w':>14}"]
    for e in bd.entries:
        lines.append(
            f"{e.name:<22} {e.layer.label:<10} {e.kind:<10} {e.instances:>4} "
            f"{e.idle:>14.6f} {e.load:>14.6f} {e.total:>14.6f}"
        )
    lines.append(f"{'network':<50} {bd.network:>14.6f}")
    lines.append(f"{'processing':<50} {bd.processing:>14.6f}")
    lines.append(f"{'total':<50} {bd.total:>14.6f}")
    return "\n".join(lines) + "\n"


def _placement_dict(result: Placement) -> dict:
    return {
        "layer": result.layer.label if result.layer is not None else None,
        "assignment": {k: v.label for k, v in result.assignment.items()},
        "heuristic": result.heuristic,
        "skipped": {k.label: v for k, v in result.skipped.items()},
        "breakdown": result.breakdown.to_dict(),
    }


def _dump_json(doc) -> str:
    return json.dumps(doc, indent=2) + "\n"


def cmd_evaluate(args) -> str:
    scenario = _read_config(_config_path(args))
    layer = Layer.parse(args.placement)
    bd = evaluate_uniform(scenario, layer)
    if args.format == "json":
        return _dump_json({"placement": layer.label, "breakdown": bd.to_dict()})
    return f"placement: {layer.short} ({layer.label})\n" + _format_breakdown(bd)


def cmd_optimize(args) -> str:
    scenario = _read_config(_config_path(args))
    if args.joint:
        result = optimize_joint(scenario, exhaustive_limit=args.exhaustive_limit)
    else:
        result = optimize_uniform(scenario)
    if args.format == "json":
        return _dump_json(_placement_dict(result))
    out = []
    if result.layer is not None and not args.joint:
        out.append(f"selected: {result.layer.short} ({result.layer.label})")
    else:
        out.append("assignment:")
        for demand_id, layer in result.assignment.items():
            out.append(f"  {demand_id}: {layer.short} ({layer.label})")
    if result.heuristic:
        out.append("search: heuristic (greedy)")
    for layer, why in result.skipped.items():
        out.append(f"skipped {layer.short}: {why}")
    return "\n".join(out) + "\n" + _format_breakdown(result.breakdown)


def cmd_sweep(args) -> bytes:
    path = _config_path(args)
    kind = args.scenario or ("file" if path is not None else "1")
    base = _read_config(path) if path is not None else None
    if kind == "1":
        scenario = scenario1(0.0, base)
    elif kind == "2":
        scenario = scenario2(0.0, base)
    else:
        if base is None:
            raise ConfigError("--scenario file needs a config path")
        scenario = base
    try:
        rates = parse_rates(args.rates) if args.rates else default_rates()
        layers = None
        if args.layers:
            layers = tuple(Layer.parse(x) for x in args.layers.split(",") if x.strip())
        spec = SweepSpec(scenario, tuple(rates), layers)
    except ValueError as exc:
        raise ConfigError(str(exc)) from None
    for layer in spec.sweep_layers:
        if layer not in scenario.layers:
            raise ConfigError(f"layers: {layer.label} is disabled (set allow_iot_layer to enable it)")
    return emit_csv(run_sweep(spec))


def cmd_defaults(args) -> str:
    scenario = default_scenario()
    if args.emit or args.format == "json":
        return emit_config(scenario).decode("utf-8")
    lines = [f"{'device':<22} {'layer':<10} {'Gbps/MIPS':>10} {'p_max_w':>9} {'p_idle_w':>9}"]
    for name, prof in catalog_rows(scenario.catalog).items():
        cap = prof.bitrate_gbps if isinstance(prof, NetworkDeviceProfile) else prof.mips
        lines.append(f"{name:<22} {prof.layer.label:<10} {cap:>10g} {prof.p_max:>9g} {prof.p_idle:>9g}")
    return "\n".join(lines) + "\n"


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="fogplace",
        description="Energy of IoT service placement across Access Fog, Metro Fog and Cloud DC layers.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    def with_config(p):
        p.add_argument("config", nargs="?", help="scenario JSON file ('-' for stdin)")
        p.add_argument("--config", dest="config_opt", metavar="PATH", help="scenario JSON file")

    p = sub.add_parser("evaluate", help="power of placing every demand on one layer")
    with_config(p)
    p.add_argument("--placement", required=True, choices=[l.short for l in Layer])
    p.add_argument("--format", choices=["text", "json"], default="text")
    p.set_defaults(func=cmd_evaluate)

    p = sub.add_parser("optimize", help="minimum-power placement")
    with_config(p)
    p.add_argument("--joint", action="store_true", help="choose a layer per demand")
    p.add_argument("--exhaustive-limit", type=int, default=EXHAUSTIVE_LIMIT,
                   help="largest demand count searched exhaustively (default %(default)s)")
    p.add_argument("--format", choices=["text", "json"], default="text")
    p.set_defaults(func=cmd_optimize)

    p = sub.add_parser("sweep", help="sweep per-device traffic rate, write CSV")
    p.add_argument("config", nargs="?", help="scenario JSON file (base parameters)")
    p.add_argument("--config", dest="config_opt", metavar="PATH")
    p.add_argument("--scenario", choices=["1", "2", "file"],
                   help="1: single request, 2: five devices behind one ONU, file: demands from config")
    p.add_argument("--rates", help="e.g. 0.5:5.0:0.5 or 0.5,1,2 (default 0.5:5.0:0.5)")
    p.add_argument("--layers", help="comma-separated layers (default: enabled layers)")
    p.add_argument("--out", help="output path (default stdout)")
    p.add_argument("--format", choices=["csv"], default="csv")
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("defaults", help="show or emit the default catalog and topology")
    p.add_argument("--emit", action="store_true", help="emit a loadable JSON config")
    p.add_argument("--format", choices=["text", "json"], default="text")
    p.set_defaults(func=cmd_defaults)
    return parser


def _write(data, path: Optional[str]) -> None:
    raw = data.encode("utf-8") if isinstance(data, str) else data
    if path is None:
        sys.stdout.buffer.write(raw)
        sys.stdout.flush()
        return
    try:
        with open(path, "wb") as fh:
            fh.write(raw)
    except OSError as exc:
        raise CliError(f"cannot write {path}: {exc.strerror or exc}", EXIT_IO) from None


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        output = args.func(args)
        _write(output, getattr(args, "out", None))
    except CliError as exc:
        code, message = exc.code, str(exc)
    except (ConfigError, ValueError) as exc:
        code, message = EXIT_CONFIG, str(exc)
    except (OverloadError, InfeasibleError) as exc:
        code, message = EXIT_INFEASIBLE, str(exc)
    else:
        return EXIT_OK
    print(f"error: {' '.join(message.split())}", file=sys.stderr)
    return code


if __name__ == "__main__":
    sys.exit(main())
