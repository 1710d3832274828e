from .paths import (
    PathSet,
    enumerate_two_hop_paths,
    path_to_relay_splits,
    project_routing,
    relay_to_path_splits,
)
from .solver import solve_ro

__all__ = [
    "PathSet",
    "enumerate_two_hop_paths",
    "path_to_relay_splits",
    "project_routing",
    "relay_to_path_splits",
    "solve_ro",
]
