"""Exception types raised by the package."""


class FogPlaceError(Exception):
    """Base class for all package errors."""


class ConfigError(FogPlaceError, ValueError):
    """Malformed or invalid scenario configuration."""


class OverloadError(FogPlaceError):
    """A device was offered more load than its capacity allows.

    Attributes:
        device: Name of the saturated device profile.
        offered: Offered load, in the device's capacity unit.
        capacity: Capacity of the device, same unit.
    """

    def __init__(self, device: str, offered: float, capacity: float, unit: str = ""):
        self.device = device
        self.offered = offered
        self.capacity = capacity
        self.unit = unit
        suffix = f" {unit}" if unit else ""
        super().__init__(
            f"{device} overloaded: offered {offered:g}{suffix} exceeds capacity {capacity:g}{suffix}"
        )


class InfeasibleError(FogPlaceError):
    """No placement satisfies the capacity constraints."""
