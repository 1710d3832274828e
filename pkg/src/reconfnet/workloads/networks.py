"""Synthetic full-mesh networks, named presets and topology statistics."""

from pathlib import Path
from typing import Any

from ..classes import Network, Topology
from ..exceptions import FormatError
from ..io import load_network_json

# name -> (PoDs, OCS ports per PoD)
PRESETS: dict[str, tuple[int, int]] = {
    "meta-pod": (4, 16),
    "topo16": (16, 32),
    "topo32": (32, 64),
    "topo64": (64, 128),
    "topo128": (128, 256),
    "topo256": (256, 512),
    "topo512": (512, 1024),
}


def gen_full_mesh(n_pods: int, ports: int, capacity: float = 1.0) -> Network:
    """Every PoD pair is a candidate edge; uniform budgets and capacities."""
    return Network.uniform(n_pods, ports, capacity)


def preset(name: str, capacity: float = 1.0) -> Network:
    if name not in PRESETS:
        raise FormatError(403, kind="network", spec=name)
    n_pods, ports = PRESETS[name]
    return gen_full_mesh(n_pods, ports, capacity)


def parse_network_spec(spec: str) -> Network:
    """`full-mesh:N:PORTS[:CAPACITY]`, a preset name, or a network JSON file."""
    if spec in PRESETS:
        return preset(spec)
    if spec.startswith("full-mesh:"):
        parts = spec.split(":")[1:]
        try:
            if len(parts) not in (2, 3):
                raise ValueError
            n_pods, ports = int(parts[0]), int(parts[1])
            capacity = float(parts[2]) if len(parts) == 3 else 1.0
        except ValueError:
            raise FormatError(403, kind="network", spec=spec)
        return gen_full_mesh(n_pods, ports, capacity)
    if Path(spec).is_file():
        return load_network_json(spec)
    raise FormatError(403, kind="network", spec=spec)


def topology_stats(
    topo: Topology, net: Network, reference_links: int | None = None
) -> dict[str, Any]:
    used = topo.used_ports
    stats: dict[str, Any] = {
        "total_links": topo.total_links,
        "used_ports": used.tolist(),
        "max_used_ports": int(used.max(initial=0)),
        "residual_ports": int(topo.residual_ports(net).sum()),
        "connected_pairs": int((topo.links > 0).sum() // 2),
    }
    if reference_links:
        stats["links_normalized"] = topo.total_links / reference_links
    return stats
