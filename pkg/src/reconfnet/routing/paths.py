"""Two-hop candidate paths and conversions between relay splits and path splits."""

from dataclasses import dataclass
from functools import cached_property

import numpy as np

from ..classes import Network, Routing, Topology, TrafficMatrix
from ..exceptions import UnroutableError, ValidationError

Path = tuple[int, ...]


@dataclass(frozen=True, eq=False)
class PathSet:
    """usable[s, d, k]: the path s -> k -> d exists (k == d is the direct path)."""

    usable: np.ndarray

    @property
    def n_pods(self) -> int:
        return int(self.usable.shape[0])

    def paths(self, s: int, d: int) -> list[Path]:
        relays = np.flatnonzero(self.usable[s, d])
        out: list[Path] = [(s, d)] if self.usable[s, d, d] else []
        out.extend((s, int(k), d) for k in relays if k != d)
        return out

    @cached_property
    def counts(self) -> np.ndarray:
        return self.usable.sum(axis=2)

    def unroutable(self, demand: TrafficMatrix) -> list[tuple[int, int]]:
        bad = np.argwhere((demand.demand > 0) & (self.counts == 0))
        return [(int(i), int(j)) for i, j in bad]

    def require_routable(self, demand: TrafficMatrix):
        bad = self.unroutable(demand)
        if bad:
            i, j = bad[0]
            raise UnroutableError(i=i, j=j)

    def __iter__(self):
        n = self.n_pods
        for s in range(n):
            for d in range(n):
                if s != d and self.counts[s, d]:
                    yield (s, d), self.paths(s, d)


def enumerate_two_hop_paths(topo: Topology, net: Network | None = None) -> PathSet:
    if net is not None:
        topo.check(net)
    links = topo.links > 0
    usable = links[:, None, :] & links.T[None, :, :]
    idx = np.arange(topo.n_pods)
    usable[:, idx, idx] = links
    usable[idx, idx, :] = False
    usable.setflags(write=False)
    return PathSet(usable)


def relay_to_path_splits(routing: Routing) -> dict[tuple[int, int], dict[Path, float]]:
    splits = routing.splits
    out: dict[tuple[int, int], dict[Path, float]] = {}
    for s, d, k in np.argwhere(splits > 0):
        s, d, k = int(s), int(d), int(k)
        path = (s, d) if k == d else (s, k, d)
        out.setdefault((s, d), {})[path] = float(splits[s, d, k])
    return out


def path_to_relay_splits(
    path_splits: dict[tuple[int, int], dict[Path, float]], n_pods: int
) -> Routing:
    splits = np.zeros((n_pods, n_pods, n_pods))
    for (s, d), shares in path_splits.items():
        for path, share in shares.items():
            if path[0] != s or path[-1] != d or len(path) not in (2, 3):
                raise ValidationError(208, i=s, j=d, a=path[0], b=path[-1])
            splits[s, d, path[1] if len(path) == 3 else d] = share
    return Routing(splits)


def project_routing(
    routing: Routing, topo: Topology, demand: TrafficMatrix, net: Network
) -> Routing:
    """Move a routing onto a new topology.

    Shares on vanished paths are renormalized onto the pair's surviving paths;
    a pair with no surviving share restarts on its widest path (ties: direct,
    then lowest relay). Zero-demand rows are cleared.
    """
    paths = enumerate_two_hop_paths(topo, net)
    paths.require_routable(demand)
    loaded = demand.demand > 0
    splits = np.where(paths.usable & loaded[:, :, None], routing.splits, 0.0)
    sums = splits.sum(axis=2)

    stranded = np.argwhere(loaded & (sums <= 0))
    if stranded.size:
        width = path_widths(topo, net)
        for s, d in stranded:
            s, d = int(s), int(d)
            k = max(
                np.flatnonzero(paths.usable[s, d]),
                key=lambda k: (width[s, d, k], k == d, -k),
            )
            splits[s, d, k] = 1.0

    sums = splits.sum(axis=2, keepdims=True)
    return Routing(np.divide(splits, sums, out=np.zeros_like(splits), where=sums > 0))


def path_widths(topo: Topology, net: Network) -> np.ndarray:
    """width[s, d, k]: bottleneck capacity of path s -> k -> d (direct at k == d)."""
    capacity = topo.links * net.link_capacity
    width = np.minimum(capacity[:, None, :], capacity.T[None, :, :])
    idx = np.arange(topo.n_pods)
    width[:, idx, idx] = capacity
    width[idx, idx, :] = 0.0
    return width
