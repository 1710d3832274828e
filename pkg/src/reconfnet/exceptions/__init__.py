from .exceptions import (
    ConfigError,
    FormatError,
    InfeasibleError,
    InstanceTooLargeError,
    ReconfnetError,
    SeedInfeasibleError,
    UnroutableError,
    ValidationError,
)

__all__ = [
    "ConfigError",
    "FormatError",
    "InfeasibleError",
    "InstanceTooLargeError",
    "ReconfnetError",
    "SeedInfeasibleError",
    "UnroutableError",
    "ValidationError",
]
