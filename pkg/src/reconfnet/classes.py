"""Core data structures: network, traffic, topology, routing, configs and reports."""

import json
import math
from dataclasses import asdict, dataclass, field
from functools import cached_property
from typing import Any, Literal, Optional

import numpy as np

from .exceptions import ConfigError, ValidationError


def _frozen(values, dtype) -> np.ndarray:
    arr = np.array(values, dtype=dtype, copy=True)
    arr.setflags(write=False)
    return arr


def _check_square(arr: np.ndarray, what: str, ndim: int = 2, n: int | None = None):
    n = arr.shape[0] if n is None and arr.ndim else n
    expected = (n,) * ndim
    if arr.ndim != ndim or arr.shape != expected:
        raise ValidationError(201, what=what, shape=arr.shape, expected=expected)


def _check_nonnegative(arr: np.ndarray, what: str):
    if not np.all(np.isfinite(arr)) or np.any(arr < 0):
        raise ValidationError(202, what=what)


def _check_diagonal(arr: np.ndarray, what: str):
    nonzero = np.flatnonzero(np.diagonal(arr))
    if nonzero.size:
        raise ValidationError(203, what=what, pod=int(nonzero[0]))


@dataclass(frozen=True, eq=False)
class Network:
    port_budget: np.ndarray
    port_capacity: np.ndarray

    def __post_init__(self):
        budget = np.asarray(self.port_budget)
        capacity = np.asarray(self.port_capacity, dtype=float)
        if budget.ndim != 1 or budget.shape != capacity.shape:
            raise ValidationError(
                201, what="port_capacity", shape=capacity.shape, expected=budget.shape
            )
        if budget.size < 2:
            raise ValidationError(206, n_pods=budget.size)
        if np.any(budget < 0) or np.any(budget != np.round(budget)):
            raise ValidationError(202, what="port_budget")
        if not np.all(np.isfinite(capacity)) or np.any(capacity <= 0):
            raise ValidationError(202, what="port_capacity")
        object.__setattr__(self, "port_budget", _frozen(budget, np.int64))
        object.__setattr__(self, "port_capacity", _frozen(capacity, float))

    @classmethod
    def uniform(cls, n_pods: int, ports: int, capacity: float = 1.0) -> "Network":
        return cls(np.full(n_pods, ports), np.full(n_pods, float(capacity)))

    @property
    def n_pods(self) -> int:
        return int(self.port_budget.size)

    @property
    def candidate_edges(self) -> int:
        return self.n_pods * (self.n_pods - 1)

    @cached_property
    def link_capacity(self) -> np.ndarray:
        """S_ij = min(S_i, S_j); the diagonal is kept at zero."""
        s = np.minimum.outer(self.port_capacity, self.port_capacity)
        np.fill_diagonal(s, 0.0)
        s.setflags(write=False)
        return s

    def to_dict(self) -> dict[str, Any]:
        return {
            "n_pods": self.n_pods,
            "port_budget": self.port_budget.tolist(),
            "port_capacity": self.port_capacity.tolist(),
        }

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> "Network":
        net = cls(data["port_budget"], data["port_capacity"])
        if "n_pods" in data and data["n_pods"] != net.n_pods:
            raise ValidationError(
                201, what="port_budget", shape=(net.n_pods,), expected=(data["n_pods"],)
            )
        return net

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, Network)
            and np.array_equal(self.port_budget, other.port_budget)
            and np.array_equal(self.port_capacity, other.port_capacity)
        )

    def __repr__(self) -> str:
        return f"Network(n_pods={self.n_pods})"


@dataclass(frozen=True, eq=False)
class TrafficMatrix:
    demand: np.ndarray

    def __post_init__(self):
        demand = np.asarray(self.demand, dtype=float)
        _check_square(demand, "demand")
        _check_nonnegative(demand, "demand")
        _check_diagonal(demand, "demand")
        object.__setattr__(self, "demand", _frozen(demand, float))

    @classmethod
    def zeros(cls, n_pods: int) -> "TrafficMatrix":
        return cls(np.zeros((n_pods, n_pods)))

    @property
    def n_pods(self) -> int:
        return int(self.demand.shape[0])

    @property
    def total(self) -> float:
        return float(self.demand.sum())

    def __add__(self, other: "TrafficMatrix") -> "TrafficMatrix":
        return TrafficMatrix(self.demand + other.demand)

    def __eq__(self, other) -> bool:
        return isinstance(other, TrafficMatrix) and np.array_equal(
            self.demand, other.demand
        )

    def __repr__(self) -> str:
        return f"TrafficMatrix(n_pods={self.n_pods}, total={self.total:g})"


@dataclass(frozen=True, eq=False)
class Topology:
    links: np.ndarray

    def __post_init__(self):
        raw = np.asarray(self.links)
        _check_square(raw, "links")
        if raw.size and (
            not np.all(np.isfinite(raw)) or np.any(raw < 0) or np.any(raw != np.round(raw))
        ):
            raise ValidationError(209)
        links = raw.astype(np.int64)
        _check_diagonal(links, "links")
        asym = np.argwhere(links != links.T)
        if asym.size:
            i, j = (int(x) for x in asym[0])
            raise ValidationError(204, i=i, j=j, a=int(links[i, j]), b=int(links[j, i]))
        object.__setattr__(self, "links", _frozen(links, np.int64))

    @classmethod
    def zeros(cls, n_pods: int) -> "Topology":
        return cls(np.zeros((n_pods, n_pods), dtype=np.int64))

    @property
    def n_pods(self) -> int:
        return int(self.links.shape[0])

    @property
    def used_ports(self) -> np.ndarray:
        return self.links.sum(axis=1)

    @property
    def total_links(self) -> int:
        return int(np.triu(self.links, 1).sum())

    def residual_ports(self, net: Network) -> np.ndarray:
        return net.port_budget - self.used_ports

    def check(self, net: Network) -> "Topology":
        """Raise unless the topology fits the network's size and port budgets."""
        if self.n_pods != net.n_pods:
            raise ValidationError(
                201, what="links", shape=self.links.shape, expected=(net.n_pods,) * 2
            )
        over = np.flatnonzero(self.used_ports > net.port_budget)
        if over.size:
            pod = int(over[0])
            raise ValidationError(
                205,
                pod=pod,
                used=int(self.used_ports[pod]),
                budget=int(net.port_budget[pod]),
            )
        return self

    def __eq__(self, other) -> bool:
        return isinstance(other, Topology) and np.array_equal(self.links, other.links)

    def __repr__(self) -> str:
        return f"Topology(n_pods={self.n_pods}, links={self.total_links})"


@dataclass(frozen=True, eq=False)
class Routing:
    """Relay splits f[i, j, k]: share of D[i, j] sent via k (k == j is direct)."""

    splits: np.ndarray

    def __post_init__(self):
        splits = np.asarray(self.splits, dtype=float)
        _check_square(splits, "splits", ndim=3)
        _check_nonnegative(splits, "splits")
        n = splits.shape[0]
        idx = np.arange(n)
        if np.any(splits[idx, idx, :]):
            i = int(np.flatnonzero(splits[idx, idx, :].any(axis=1))[0])
            raise ValidationError(210, i=i, j=i)
        self_relay = np.argwhere(splits[idx, :, idx] > 0)
        if self_relay.size:
            i, j = (int(x) for x in self_relay[0])
            raise ValidationError(210, i=i, j=j)
        object.__setattr__(self, "splits", _frozen(splits, float))

    @classmethod
    def zeros(cls, n_pods: int) -> "Routing":
        return cls(np.zeros((n_pods, n_pods, n_pods)))

    @property
    def n_pods(self) -> int:
        return int(self.splits.shape[0])

    def check(self, demand: "TrafficMatrix", atol: float = 1e-9) -> "Routing":
        """Raise unless every loaded pair's splits sum to one."""
        if demand.n_pods != self.n_pods:
            raise ValidationError(
                201,
                what="splits",
                shape=self.splits.shape,
                expected=(demand.n_pods,) * 3,
            )
        sums = self.splits.sum(axis=2)
        bad = np.argwhere((demand.demand > 0) & (np.abs(sums - 1.0) > atol))
        if bad.size:
            i, j = (int(x) for x in bad[0])
            raise ValidationError(207, i=i, j=j, total=float(sums[i, j]))
        return self

    def __eq__(self, other) -> bool:
        return isinstance(other, Routing) and np.array_equal(self.splits, other.splits)

    def __repr__(self) -> str:
        return f"Routing(n_pods={self.n_pods})"


@dataclass(frozen=True, eq=False)
class LinkLoads:
    load: np.ndarray

    def __post_init__(self):
        load = np.asarray(self.load, dtype=float)
        _check_square(load, "load")
        _check_nonnegative(load, "load")
        _check_diagonal(load, "load")
        object.__setattr__(self, "load", _frozen(load, float))

    @property
    def n_pods(self) -> int:
        return int(self.load.shape[0])

    def __eq__(self, other) -> bool:
        return isinstance(other, LinkLoads) and np.array_equal(self.load, other.load)

    def __repr__(self) -> str:
        return f"LinkLoads(n_pods={self.n_pods}, total={self.load.sum():g})"


@dataclass(frozen=True)
class SolveReport:
    mlu: float
    iterations: int
    wall_time: float
    converged: bool
    mlu_trajectory: tuple[float, ...] = ()
    method: str = ""
    feasible: bool = True
    total_links: int = 0
    extra: dict[str, Any] = field(default_factory=dict)

    def to_dict(self) -> dict[str, Any]:
        data = asdict(self)
        data["mlu_trajectory"] = list(self.mlu_trajectory)
        return data

    def to_json(self, indent: int | None = 2) -> str:
        # json has no infinity literal; unroutable values are written as null
        data = self.to_dict()
        data["mlu"] = self.mlu if math.isfinite(self.mlu) else None
        return json.dumps(data, indent=indent, sort_keys=True)

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> "SolveReport":
        data = dict(data)
        data["mlu"] = math.inf if data.get("mlu") is None else float(data["mlu"])
        data["mlu_trajectory"] = tuple(float(u) for u in data.get("mlu_trajectory", ()))
        return cls(**data)


def _positive(name: str, value: float):
    if not (isinstance(value, (int, float)) and math.isfinite(value) and value > 0):
        raise ConfigError(field=name, requirement="a positive number", value=value)


def _positive_int(name: str, value: int):
    if not isinstance(value, int) or isinstance(value, bool) or value < 1:
        raise ConfigError(field=name, requirement="a positive integer", value=value)


def _count(name: str, value: int):
    if not isinstance(value, int) or isinstance(value, bool) or value < 0:
        raise ConfigError(field=name, requirement="a non-negative integer", value=value)


@dataclass(frozen=True)
class AbsmConfig:
    epsilon: float = 1e-6
    initial_upper_bound: float | Literal["auto"] = "auto"
    max_iterations: int = 200
    # epsilon is scaled by the upper bound M when relative
    relative: bool = True

    def __post_init__(self):
        _positive("epsilon", self.epsilon)
        if self.initial_upper_bound != "auto":
            _positive("initial_upper_bound", self.initial_upper_bound)
        _positive_int("max_iterations", self.max_iterations)


@dataclass(frozen=True)
class RoConfig:
    tolerance: float = 1e-6
    max_sweeps: int = 50
    epsilon_inner: float = 1e-9
    # joint smoothing steps once the sweeps settle; 0 keeps plain sweeps
    smoothing_iterations: int = 300
    # relative optimality gap that ends smoothing early
    gap: float = 1e-3

    def __post_init__(self):
        _positive("tolerance", self.tolerance)
        _positive_int("max_sweeps", self.max_sweeps)
        _positive("epsilon_inner", self.epsilon_inner)
        _count("smoothing_iterations", self.smoothing_iterations)
        _positive("gap", self.gap)


@dataclass(frozen=True)
class AtroConfig:
    epsilon: float = 1e-4
    max_rounds: int = 10
    enable_refinement: bool = True
    absm: AbsmConfig = field(default_factory=AbsmConfig)
    ro: RoConfig = field(default_factory=RoConfig)

    def __post_init__(self):
        _positive("epsilon", self.epsilon)
        _positive_int("max_rounds", self.max_rounds)


@dataclass(frozen=True)
class ToSolution:
    topology: Topology
    mlu: float
    iterations: int
    feasible: bool
    upper_bound: float = 0.0
    tolerance: float = 0.0


@dataclass(frozen=True)
class AtroResult:
    topology: Topology
    routing: Routing
    report: SolveReport
    loads: Optional[LinkLoads] = None
