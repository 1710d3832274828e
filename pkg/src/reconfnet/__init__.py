from . import baselines, classes, exceptions, io, model, routing, topology, workloads
from ._version import __author__, __version__
from .classes import (
    AbsmConfig,
    AtroConfig,
    AtroResult,
    LinkLoads,
    Network,
    RoConfig,
    Routing,
    SolveReport,
    Topology,
    ToSolution,
    TrafficMatrix,
)
from .driver import atro, atro_hot_start
from .model import compute_link_loads, compute_mlu, validate_solution

__all__ = [
    "baselines",
    "classes",
    "exceptions",
    "io",
    "model",
    "routing",
    "topology",
    "workloads",
    "AbsmConfig",
    "AtroConfig",
    "AtroResult",
    "LinkLoads",
    "Network",
    "RoConfig",
    "Routing",
    "SolveReport",
    "Topology",
    "ToSolution",
    "TrafficMatrix",
    "atro",
    "atro_hot_start",
    "compute_link_loads",
    "compute_mlu",
    "validate_solution",
    "__version__",
    "__author__",
]
