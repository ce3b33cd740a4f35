"""Energy model and minimum-energy service placement for layered IoT/fog/cloud networks."""

__version__ = "0.1.0"

from .catalog import (
    DeviceCatalog,
    Layer,
    NetworkDeviceProfile,
    ServerProfile,
    default_catalog,
    validate_catalog,
)
from .energy import (
    PowerFigure,
    WorkloadModel,
    device_power,
    energy_per_bit,
    energy_per_instruction,
    traffic_to_mips,
)
from .errors import ConfigError, FogPlaceError, InfeasibleError, OverloadError
from .placement import (
    Placement,
    PowerBreakdown,
    PowerEntry,
    evaluate,
    evaluate_uniform,
    optimize_joint,
    optimize_uniform,
)
from .scenario import Demand, Scenario, emit_config, load_scenario
from .sweep import SweepRow, SweepSpec, emit_csv, parse_csv, run_sweep, scenario1, scenario2
from .topology import Topology, network_load_check, replicas_needed, route_for
