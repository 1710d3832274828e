"""Min-cost-flow topology baseline.

Logical links are unit flows from a source through out-port and in-port nodes
to a sink; port budgets cap the source and sink arcs. A pair's arc has convex
cost: its k-th unit costs -L/k for the pair's normalized load L, so busy pairs
fill first with diminishing returns. The flow is solved by successive shortest
paths with node potentials, then made symmetric by the pointwise minimum.
"""

import heapq
import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from ..classes import LinkLoads, Network, Topology
from ..log import get_logger
from ..utils import pair_load

logger = get_logger(__name__)


@dataclass(eq=False)
class Arc:
    src: int
    dst: int
    cap: int
    # normalized load; zero for the port arcs
    weight: float = 0.0
    flow: int = 0
    reverse: Optional["Arc"] = field(default=None, repr=False)
    forward: bool = True

    @property
    def residual(self) -> int:
        return self.cap - self.flow if self.forward else self.reverse.flow

    @property
    def cost(self) -> float:
        """Marginal cost of pushing one more unit along this residual arc."""
        if self.forward:
            return -self.weight / (self.flow + 1) if self.weight else 0.0
        undo = self.reverse
        return undo.weight / undo.flow if undo.weight else 0.0

    def push(self):
        if self.forward:
            self.flow += 1
        else:
            self.reverse.flow -= 1


class FlowNetwork:
    def __init__(self, n_vertices: int):
        self.adj: list[list[Arc]] = [[] for _ in range(n_vertices)]

    def __len__(self) -> int:
        return len(self.adj)

    def add_arc(self, src: int, dst: int, cap: int, weight: float = 0.0) -> Arc:
        arc = Arc(src, dst, cap, weight)
        back = Arc(dst, src, 0, forward=False, reverse=arc)
        arc.reverse = back
        self.adj[src].append(arc)
        self.adj[dst].append(back)
        return arc

    def shortest_path(
        self, source: int, sink: int, potential: np.ndarray
    ) -> tuple[float, Optional[list[Arc]]]:
        """Dijkstra on reduced costs; returns the true path cost and its arcs."""
        dist = np.full(len(self), math.inf)
        parent: list[Optional[Arc]] = [None] * len(self)
        dist[source] = 0.0
        heap = [(0.0, source)]
        while heap:
            d, v = heapq.heappop(heap)
            if d > dist[v]:
                continue
            for arc in self.adj[v]:
                if arc.residual <= 0:
                    continue
                # clamp float noise; reduced costs are nonnegative in exact arithmetic
                reduced = max(arc.cost + potential[v] - potential[arc.dst], 0.0)
                if d + reduced < dist[arc.dst] - 1e-15:
                    dist[arc.dst] = d + reduced
                    parent[arc.dst] = arc
                    heapq.heappush(heap, (dist[arc.dst], arc.dst))

        reachable = np.isfinite(dist)
        potential[reachable] += dist[reachable]
        if not reachable[sink]:
            return math.inf, None

        path = []
        v = sink
        while v != source:
            arc = parent[v]
            path.append(arc)
            v = arc.src
        path.reverse()
        return float(sum(arc.cost for arc in path)), path

    def min_cost_flow(self, source: int, sink: int, potential: np.ndarray) -> int:
        """Augment one unit at a time while the cheapest path still lowers the cost."""
        units = 0
        while True:
            cost, path = self.shortest_path(source, sink, potential)
            if path is None or cost >= 0:
                return units
            for arc in path:
                arc.push()
            units += 1


def mcf_topology(loads: LinkLoads, net: Network) -> Topology:
    n = net.n_pods
    budget = net.port_budget
    pair = pair_load(loads.load, net.link_capacity)

    # vertices: source, out-ports 1..n, in-ports n+1..2n, sink
    source, sink = 0, 2 * n + 1
    graph = FlowNetwork(2 * n + 2)
    for i in range(n):
        graph.add_arc(source, 1 + i, int(budget[i]))
        graph.add_arc(1 + n + i, sink, int(budget[i]))
    arcs: dict[tuple[int, int], Arc] = {}
    for i, j in np.argwhere(pair > 0):
        i, j = int(i), int(j)
        arcs[i, j] = graph.add_arc(1 + i, 1 + n + j, int(min(budget[i], budget[j])), float(pair[i, j]))

    # the initial graph is layered, so its shortest distances are direct
    potential = np.zeros(len(graph))
    for (i, j), arc in arcs.items():
        potential[1 + n + j] = min(potential[1 + n + j], arc.cost)
    potential[sink] = potential[1 + n : 1 + 2 * n].min(initial=0.0)

    units = graph.min_cost_flow(source, sink, potential)
    logger.debug("mcf: routed %d link units", units)

    directed = np.zeros((n, n), dtype=np.int64)
    for (i, j), arc in arcs.items():
        directed[i, j] = arc.flow
    return Topology(np.minimum(directed, directed.T))
