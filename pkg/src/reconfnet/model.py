"""Load and utilization arithmetic coupling topology and routing."""

import math

import numpy as np

from .classes import LinkLoads, Network, Routing, Topology, TrafficMatrix
from .exceptions import ValidationError


def compute_link_loads(demand: TrafficMatrix, routing: Routing) -> LinkLoads:
    """Per-link traffic induced by two-hop splits.

    T[i, j] = sum_j' f[i, j', j] D[i, j'] + sum_i' f[i', j, i] D[i', j]: the first
    hop of every pair leaving i through j plus the second hop of every pair
    relayed by i towards j.
    """
    if demand.n_pods != routing.n_pods:
        raise ValidationError(
            201,
            what="splits",
            shape=routing.splits.shape,
            expected=(demand.n_pods,) * 3,
        )
    carried = routing.splits * demand.demand[:, :, None]
    first_hop = carried.sum(axis=1)
    second_hop = carried.sum(axis=0).T
    # direct shares already count as a first hop
    np.fill_diagonal(second_hop, 0.0)
    return LinkLoads(first_hop + second_hop)


def capacity_matrix(topo: Topology, net: Network) -> np.ndarray:
    return topo.links * net.link_capacity


def utilization(loads: LinkLoads, topo: Topology, net: Network) -> np.ndarray:
    """Per-link utilization; loaded pairs without links are infinite."""
    capacity = capacity_matrix(topo, net)
    load = loads.load
    with np.errstate(divide="ignore", invalid="ignore"):
        util = np.where(capacity > 0, load / np.where(capacity > 0, capacity, 1.0), 0.0)
    util[(capacity == 0) & (load > 0)] = math.inf
    return util


def compute_mlu(loads: LinkLoads, topo: Topology, net: Network) -> float:
    util = utilization(loads, topo, net)
    return float(util.max()) if util.size else 0.0


def direct_path_routing(net: Network | int) -> Routing:
    n = net if isinstance(net, int) else net.n_pods
    splits = np.zeros((n, n, n))
    idx = np.arange(n)
    splits[:, idx, idx] = 1.0
    splits[idx, idx, idx] = 0.0
    return Routing(splits)


def port_lower_bound(loads: LinkLoads, net: Network) -> float:
    """max_i of PoD i's heavier traffic direction over its full port capacity."""
    load = loads.load
    heavier = np.maximum(load.sum(axis=1), load.sum(axis=0))
    reach = net.port_budget * net.link_capacity.max(axis=1)
    with np.errstate(divide="ignore", invalid="ignore"):
        bound = np.where(reach > 0, heavier / np.where(reach > 0, reach, 1.0), 0.0)
    bound[(reach == 0) & (heavier > 0)] = math.inf
    return float(bound.max())


def validate_solution(
    demand: TrafficMatrix,
    topo: Topology,
    routing: Routing,
    net: Network,
    atol: float = 1e-9,
) -> bool:
    """Joint feasibility of a (topology, routing) pair; raises on violation."""
    topo.check(net)
    routing.check(demand, atol=atol)

    links = topo.links > 0
    used = (routing.splits > atol) & (demand.demand > 0)[:, :, None]
    for i, j, k in np.argwhere(used):
        i, j, k = int(i), int(j), int(k)
        hops = [(i, j)] if k == j else [(i, k), (k, j)]
        for a, b in hops:
            if not links[a, b]:
                raise ValidationError(208, i=i, j=j, a=a, b=b)
    return True
