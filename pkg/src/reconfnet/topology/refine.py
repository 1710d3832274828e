"""Traffic-aware refinement: spend residual ports on the busiest PoD pairs."""

import numpy as np

from ..classes import LinkLoads, Network, Topology
from ..log import get_logger

logger = get_logger(__name__)


def ranked_pairs(loads: LinkLoads, net: Network) -> list[tuple[int, int]]:
    """Unordered pairs by descending max(u_ij, u_ji), ties ascending (i, j)."""
    capacity = net.link_capacity
    with np.errstate(divide="ignore", invalid="ignore"):
        util = np.where(capacity > 0, loads.load / np.where(capacity > 0, capacity, 1.0), 0.0)
    sym = np.maximum(util, util.T)
    rows, cols = np.triu_indices(net.n_pods, 1)
    # lexsort: last key is primary
    order = np.lexsort((cols, rows, -sym[rows, cols]))
    return [(int(rows[x]), int(cols[x])) for x in order]


def refine(topo: Topology, loads: LinkLoads, net: Network) -> Topology:
    topo.check(net)
    links = topo.links.copy()
    remaining = topo.residual_ports(net).copy()

    for i, j in ranked_pairs(loads, net):
        if remaining[i] == 0 or remaining[j] == 0:
            continue
        delta = min(remaining[i], remaining[j])
        links[i, j] += delta
        links[j, i] += delta
        remaining[i] -= delta
        remaining[j] -= delta
        logger.debug("refine: +%d links on (%d, %d)", delta, i, j)

    return Topology(links)
