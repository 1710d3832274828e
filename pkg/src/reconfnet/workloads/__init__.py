from .networks import PRESETS, gen_full_mesh, parse_network_spec, preset, topology_stats
from .traffic import (
    gen_ai_traffic,
    gen_gravity_traffic,
    mix_traffic,
    parse_traffic_spec,
    random_derangement,
)

__all__ = [
    "PRESETS",
    "gen_ai_traffic",
    "gen_full_mesh",
    "gen_gravity_traffic",
    "mix_traffic",
    "parse_network_spec",
    "parse_traffic_spec",
    "preset",
    "random_derangement",
    "topology_stats",
]
