"""Exhaustive topology search for tiny instances; the exact one-hop reference."""

import math

import numpy as np

from ..classes import LinkLoads, Network, Topology, ToSolution
from ..exceptions import InstanceTooLargeError
from ..utils import pair_load, upper_pairs

MAX_PODS = 4
MAX_ALLOCATIONS = 2_000_000


def allocation_count(net: Network) -> int:
    rows, cols = upper_pairs(net.n_pods)
    budget = net.port_budget
    return math.prod(int(min(budget[i], budget[j])) + 1 for i, j in zip(rows, cols))


def brute_force_to(loads: LinkLoads, net: Network) -> ToSolution:
    """Minimum-MLU symmetric allocation within the port budgets.

    Ties are broken by fewest links, then lexicographically over the upper
    triangle. Returns an infeasible solution when every allocation leaves a
    loaded pair without links.
    """
    size = allocation_count(net)
    if net.n_pods > MAX_PODS or size > MAX_ALLOCATIONS:
        raise InstanceTooLargeError(size=size, limit=MAX_ALLOCATIONS)

    n = net.n_pods
    rows, cols = upper_pairs(n)
    budget = net.port_budget
    ranges = [np.arange(min(budget[i], budget[j]) + 1) for i, j in zip(rows, cols)]
    grid = np.stack(np.meshgrid(*ranges, indexing="ij"), axis=-1).reshape(-1, len(rows))

    incidence = np.zeros((len(rows), n), dtype=np.int64)
    incidence[np.arange(len(rows)), rows] = 1
    incidence[np.arange(len(rows)), cols] = 1
    fits = np.all(grid @ incidence <= budget, axis=1)

    pair = pair_load(loads.load, net.link_capacity)[rows, cols]
    with np.errstate(divide="ignore", invalid="ignore"):
        ratio = np.where(grid > 0, pair / np.where(grid > 0, grid, 1), 0.0)
    ratio[(grid == 0) & (pair > 0)] = math.inf
    util = ratio.max(axis=1) if len(rows) else np.zeros(len(grid))
    util[~fits] = math.inf

    best = float(util.min())
    if math.isinf(best):
        return ToSolution(Topology.zeros(n), math.inf, size, False)

    optimal = np.flatnonzero(np.isclose(util, best, rtol=1e-9, atol=1e-12))
    total = grid[optimal].sum(axis=1)
    # grid rows are already in lexicographic order
    choice = grid[optimal[np.argmin(total)]]

    links = np.zeros((n, n), dtype=np.int64)
    links[rows, cols] = choice
    links[cols, rows] = choice
    return ToSolution(Topology(links), best, size, True)
