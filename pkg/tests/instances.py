"""Instance builders shared by the tests."""

import numpy as np

from reconfnet.classes import LinkLoads, Network, Topology, TrafficMatrix


def spare_port_instance(ab: float = 0.4, ac: float = 0.2) -> tuple[TrafficMatrix, Network]:
    """Three PoDs, four ports each: A-B carries `ab`, A-C carries `ac` (both directions).

    With the defaults direct routing bottoms out at 0.2; spending the spare ports
    on B-C lets A-C relay through B and reach 0.15.
    """
    demand = np.array(
        [
            [0.0, ab, ac],
            [ab, 0.0, 0.0],
            [ac, 0.0, 0.0],
        ]
    )
    return TrafficMatrix(demand), Network.uniform(3, 4)


def triangle(n_ab: int = 1, n_ac: int = 1, n_bc: int = 1) -> Topology:
    return Topology(np.array([[0, n_ab, n_ac], [n_ab, 0, n_bc], [n_ac, n_bc, 0]]))


def random_loads(rng: np.random.Generator, n: int, high: int = 20) -> LinkLoads:
    load = rng.integers(0, high + 1, size=(n, n)).astype(float)
    np.fill_diagonal(load, 0.0)
    return LinkLoads(load)


def random_one_hop_instance(rng: np.random.Generator) -> tuple[LinkLoads, Network]:
    n = int(rng.integers(2, 5))
    net = Network(rng.integers(2, 7, size=n), np.ones(n))
    return random_loads(rng, n), net


def random_demand(rng: np.random.Generator, n: int, density: float = 0.7) -> TrafficMatrix:
    demand = rng.uniform(0.1, 1.0, size=(n, n)) * (rng.random((n, n)) < density)
    np.fill_diagonal(demand, 0.0)
    return TrafficMatrix(demand)


def connected_topology(rng: np.random.Generator, n: int, ports: int) -> Topology:
    """Ring plus random chords within `ports` per PoD."""
    links = np.zeros((n, n), dtype=np.int64)
    for i in range(n):
        j = (i + 1) % n
        links[i, j] = links[j, i] = 1
    for i, j in zip(*np.triu_indices(n, 2)):
        spare = min(ports - links[i].sum(), ports - links[j].sum())
        if spare > 0 and rng.random() < 0.5:
            extra = int(rng.integers(1, spare + 1))
            links[i, j] += extra
            links[j, i] += extra
    return Topology(links)


def routable_only(demand: TrafficMatrix, topo: Topology) -> TrafficMatrix:
    """Drop the pairs with neither a direct link nor a common neighbour."""
    links = topo.links > 0
    reachable = links | ((links.astype(int) @ links.astype(int)) > 0)
    return TrafficMatrix(np.where(reachable, demand.demand, 0.0))
