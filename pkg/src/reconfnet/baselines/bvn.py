"""Matching-decomposition baseline: one maximum-weight matching per port round.

The per-round priority rule (heaviest residual demand first) stands in for the
unspecified priority heuristics of Birkhoff-von Neumann style schedulers.
"""

import math

import numpy as np

from ..classes import Network, Topology, TrafficMatrix
from ..log import get_logger
from .hungarian import Matching, hungarian

logger = get_logger(__name__)


def symmetric_matching(matching: Matching, remaining: np.ndarray) -> list[tuple[int, int]]:
    """Turn a permutation into disjoint unordered pairs.

    Edges are accepted heaviest first (ties by pair index) while both endpoints
    are free in this round and still have ports.
    """
    edges = sorted(
        ((min(i, j), max(i, j), w) for i, j, w in matching.edges),
        key=lambda e: (-e[2], e[0], e[1]),
    )
    busy: set[int] = set()
    pairs = []
    for i, j, _ in edges:
        if i in busy or j in busy or remaining[i] <= 0 or remaining[j] <= 0:
            continue
        busy.update((i, j))
        pairs.append((i, j))
    return pairs


def bvn_topology(demand: TrafficMatrix, net: Network) -> Topology:
    residual = np.maximum(demand.demand, demand.demand.T)
    capacity = net.link_capacity
    remaining = net.port_budget.copy()
    links = np.zeros((net.n_pods, net.n_pods), dtype=np.int64)

    for r in range(int(remaining.max(initial=0))):
        active = remaining > 0
        if active.sum() < 2:
            break
        weights = np.where(active[:, None] & active[None, :], residual, -math.inf)
        pairs = symmetric_matching(hungarian(weights), remaining)
        if not pairs:
            break
        for i, j in pairs:
            links[i, j] += 1
            links[j, i] += 1
            remaining[i] -= 1
            remaining[j] -= 1
            residual[i, j] = residual[j, i] = residual[i, j] - min(residual[i, j], capacity[i, j])
        logger.debug("bvn: round %d matched %d pairs", r + 1, len(pairs))

    return Topology(links)
