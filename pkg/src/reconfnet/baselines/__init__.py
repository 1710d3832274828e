from .brute import brute_force_to
from .bvn import bvn_topology
from .hungarian import Matching, hungarian
from .mcf import mcf_topology

__all__ = ["Matching", "brute_force_to", "bvn_topology", "hungarian", "mcf_topology"]
