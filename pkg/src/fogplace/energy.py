"""Affine device power model and traffic-to-processing workload mapping."""

from __future__ import annotations

from dataclasses import dataclass

from .catalog import NetworkDeviceProfile, ServerProfile
from .errors import OverloadError

MIPS_PER_MBPS = "mips_per_mbps"
INSTRUCTIONS_PER_BIT = "instructions_per_bit"
WORKLOAD_MODES = (MIPS_PER_MBPS, INSTRUCTIONS_PER_BIT)


@dataclass(frozen=True)
class WorkloadModel:
    """How much processing a unit of traffic needs.

    Only the coefficient selected by ``mode`` is used.
    """

    mode: str = MIPS_PER_MBPS
    mips_per_mbps: float = 1000.0
    instructions_per_bit: float = 750.0

    def __post_init__(self):
        if self.mode not in WORKLOAD_MODES:
            raise ValueError(f"workload.mode: unknown mode {self.mode!r}")
        if not self.mips_per_mbps >= 0:
            raise ValueError(f"workload.mips_per_mbps: must be >= 0 (got {self.mips_per_mbps!r})")
        if not self.instructions_per_bit >= 0:
            raise ValueError(
                f"workload.instructions_per_bit: must be >= 0 (got {self.instructions_per_bit!r})"
            )


@dataclass(frozen=True)
class PowerFigure:
    idle: float
    load_dependent: float

    @property
    def total(self) -> float:
        return self.idle + self.load_dependent


def energy_per_bit(profile: NetworkDeviceProfile) -> float:
    """Dynamic energy of a network device in joules per bit."""
    return (profile.p_max - profile.p_idle) / (profile.bitrate_gbps * 1e9)


def energy_per_instruction(profile: ServerProfile) -> float:
    """Dynamic energy of a server in joules per instruction."""
    return (profile.p_max - profile.p_idle) / (profile.mips * 1e6)


def device_power(p_idle: float, p_max: float, load: float, capacity: float) -> PowerFigure:
    """Power drawn by one device instance at the given load.

    ``load`` and ``capacity`` must share a unit. Loads above capacity
    raise :class:`OverloadError`; replication is the caller's job.
    """
    if load < 0:
        raise ValueError(f"load must be >= 0 (got {load!r})")
    if load > capacity:
        raise OverloadError("device", load, capacity)
    return PowerFigure(idle=p_idle, load_dependent=(p_max - p_idle) * (load / capacity))


def traffic_to_mips(model: WorkloadModel, rate_mbps: float) -> float:
    """Processing requirement (MIPS) of a traffic stream (Mbps)."""
    if rate_mbps < 0:
        raise ValueError(f"rate must be >= 0 (got {rate_mbps!r})")
    if model.mode == INSTRUCTIONS_PER_BIT:
        # Mbps * instr/bit = 1e6 instr/s = MIPS
        return rate_mbps * model.instructions_per_bit
    return rate_mbps * model.mips_per_mbps
